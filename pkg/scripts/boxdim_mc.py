"""Monte Carlo box dimension of f(E) across seeds, with the predicted value.

Example: python3 scripts/boxdim_mc.py --set cantor:ratio=0.25 --depth 22 --seeds 8
"""

import argparse

import numpy as np

from cascade_dim.point_sets import parse_set
from cascade_dim.runs import boxdim_estimates, target_dimension
from cascade_dim.weights import parse_model


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--model", default="lognormal:sigma2=0.6931471805599453")
    ap.add_argument("--set", dest="set_spec", default="seq:p=1")
    ap.add_argument("--depth", type=int, nargs="+", default=[16, 19, 22])
    ap.add_argument("--seeds", type=int, default=8)
    args = ap.parse_args()
    model, spec = parse_model(args.model), parse_set(args.set_spec)
    target = target_dimension(model, spec)
    print(f"target {target:.5f}")
    print("depth,mean_slope,sem,mean_window_hi")
    for k in args.depth:
        ests = boxdim_estimates(model, spec, k, list(range(args.seeds)), range(1, k + 3))
        s = np.array([e.slope for e in ests])
        hi = np.mean([e.window[1] for e in ests])
        print(f"{k},{s.mean():.5f},{s.std(ddof=1) / np.sqrt(s.size):.5f},{hi:.1f}")


if __name__ == "__main__":
    main()
