"""Growth of the number of level-n paths with weight product >= 2^{-(x+delta)n}.

Prints the per-seed regression slope of log2(count) on n next to 1 + psi(x).
"""

import argparse

import numpy as np

from cascade_dim.runs import ldp_counts, ldp_slope, map_ordered
from cascade_dim.theory import legendre_psi
from cascade_dim.weights import parse_model


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--model", default="lognormal:sigma2=0.6931471805599453")
    ap.add_argument("--x", type=float, nargs="+", default=[0.1, 0.25, 0.4])
    ap.add_argument("--delta", type=float, default=0.05)
    ap.add_argument("--n-min", type=int, default=12)
    ap.add_argument("--n-max", type=int, default=22)
    ap.add_argument("--seeds", type=int, default=8)
    args = ap.parse_args()
    model = parse_model(args.model)
    ns = list(range(args.n_min, args.n_max + 1))
    print("x,target,mean_slope,sd_slope")
    for x in args.x:
        slopes = map_ordered(lambda s: ldp_slope(ns, ldp_counts(model, s, ns, x, args.delta)),
                             list(range(args.seeds)))
        target = 1 + legendre_psi(model, x).value
        print(f"{x},{target:.6f},{np.mean(slopes):.6f},{np.std(slopes, ddof=1):.6f}")


if __name__ == "__main__":
    main()
