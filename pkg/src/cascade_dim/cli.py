"""``cascade-dim`` command line: theory curves, simulations and the verification suite.

Exit codes: 0 ok, 1 verification failure, 2 bad model/regime/arguments,
3 resource guard.
"""

from __future__ import annotations

import argparse
import shlex
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .acceptance import CRITERIA, run_acceptance
from .csvio import RunManifest, write_csv
from .errors import CascadeDimError, ResourceError, WindowError
from .point_sets import parse_set
from .runs import BOXDIM_HEADER, LDP_HEADER, SCALES_HEADER, boxdim_tables, ldp_table
from .theory import bounds_table, psi_values
from .weights import gamma, parse_model, require_subcritical

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3


def parse_seeds(text: str) -> list[int]:
    """``"0-7"``, ``"1,5,9"`` or a mix such as ``"0-3,10"``."""
    seeds: set[int] = set()
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.partition("-")
        try:
            if sep:
                a, b = int(lo), int(hi)
                if a > b:
                    raise ValueError
                seeds.update(range(a, b + 1))
            else:
                seeds.add(int(part))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad seed list {text!r}") from None
    if not seeds:
        raise argparse.ArgumentTypeError("empty seed list")
    return sorted(seeds)


def parse_window(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must look like LO:HI, got {text!r}") from None
    return lo, hi


def _add_model(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", required=True,
                   help="lognormal:sigma2=<v> or twopoint:xi=<v>")
    p.add_argument("--sigma-convention", choices=("sigma", "sigma2"), default="sigma2",
                   help="read the log-normal number as a variance (default) or a standard deviation")


def _add_out(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default="-", help="output CSV path ('-' for stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cascade-dim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cascade-dim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theory-curves", help="S1, dim and S2 over a grid of p")
    _add_model(p)
    p.add_argument("--p", type=float, nargs="+", help="explicit p values (overrides the grid)")
    p.add_argument("--p-min", type=float, default=0.05)
    p.add_argument("--p-max", type=float, default=5.0)
    p.add_argument("--steps", type=int, default=200)
    _add_out(p)

    p = sub.add_parser("legendre", help="psi(x) and its minimizer over a grid of x")
    _add_model(p)
    p.add_argument("--x-min", default="0")
    p.add_argument("--x-max", default="gamma", help="number or 'gamma'")
    p.add_argument("--steps", type=int, default=101)
    _add_out(p)

    p = sub.add_parser("simulate-boxdim", help="Monte Carlo box dimension of f(E)")
    _add_model(p)
    p.add_argument("--set", required=True, dest="set_spec",
                   help="seq:p=<v>, thyrse:alpha=<v>, cantor:ratio=<v> or file:<path>")
    p.add_argument("--depth", type=int, default=20)
    p.add_argument("--seeds", "--seed", type=parse_seeds, default=[0])
    p.add_argument("--scales", type=parse_window, default=None,
                   help="r exponents LO:HI (default 1:depth+2)")
    p.add_argument("--window", type=parse_window, default=None,
                   help="regression window LO:HI (default drops coarse and warned scales)")
    _add_out(p)

    p = sub.add_parser("simulate-ldp", help="counts of paths with large weight products")
    _add_model(p)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--n", type=int, required=True, help="largest level")
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--seeds", "--seed", type=parse_seeds, default=[0])
    _add_out(p)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--only", nargs="+", choices=sorted(CRITERIA), help="subset of criteria")
    p.add_argument("--tamper", nargs="+", default=[], choices=sorted(CRITERIA),
                   help="test hook: make these criteria impossible to pass")
    _add_out(p)
    return parser


def _manifest(argv: Sequence[str], model: str = "", seeds=(), depth=None) -> RunManifest:
    return RunManifest(" ".join(shlex.quote(a) for a in ["cascade-dim", *argv]),
                       model, tuple(seeds), depth)


def _model(args):
    model = parse_model(args.model, args.sigma_convention)
    require_subcritical(model)
    return model


def cmd_theory_curves(args, argv) -> int:
    model = _model(args)
    if args.p:
        grid = sorted(set(args.p))
    else:
        if not 0 < args.p_min < args.p_max or args.steps < 2:
            raise argparse.ArgumentTypeError("need 0 < p-min < p-max and steps >= 2")
        grid = np.linspace(args.p_min, args.p_max, args.steps).tolist()
    rows = [(r.p, r.s1, r.dim, r.s2) for r in bounds_table(model, grid)]
    write_csv(args.out, ["p", "s1", "dim", "s2"], rows, _manifest(argv, model.spec_string()))
    return EXIT_OK


def _x_value(text: str, g: float) -> float:
    return g if text.strip().lower() == "gamma" else float(text)


def cmd_legendre(args, argv) -> int:
    model = _model(args)
    g = gamma(model)
    lo, hi = _x_value(args.x_min, g), _x_value(args.x_max, g)
    if not 0 <= lo <= hi or args.steps < 2:
        raise argparse.ArgumentTypeError("need 0 <= x-min <= x-max and steps >= 2")
    xs = np.linspace(lo, hi, args.steps)
    if args.x_max.strip().lower() == "gamma":
        xs[-1] = g
    psi, t = psi_values(model, xs)
    rows = zip(xs.tolist(), psi.tolist(), t.tolist())
    write_csv(args.out, ["x", "psi", "t_star"], rows, _manifest(argv, model.spec_string()))
    return EXIT_OK


def cmd_simulate_boxdim(args, argv) -> int:
    model = _model(args)
    spec = parse_set(args.set_spec)
    lo, hi = args.scales if args.scales else (1, args.depth + 2)
    try:
        summary, per_scale = boxdim_tables(model, spec, args.depth, args.seeds,
                                           range(lo, hi + 1), args.window)
    except WindowError as exc:
        raise WindowError(f"{exc}; pass --window LO:HI or raise --depth") from None
    manifest = _manifest(argv, model.spec_string(), args.seeds, args.depth)
    write_csv(args.out, BOXDIM_HEADER, summary, manifest)
    scales_target = None if args.out == "-" else f"{args.out}.scales.csv"
    if scales_target is not None:
        write_csv(scales_target, SCALES_HEADER, per_scale, manifest)
    return EXIT_OK


def cmd_simulate_ldp(args, argv) -> int:
    model = _model(args)
    rows = ldp_table(model, args.x, args.delta, args.n_min, args.n, args.seeds)
    write_csv(args.out, LDP_HEADER, rows,
              _manifest(argv, model.spec_string(), args.seeds, args.n))
    return EXIT_OK


def cmd_verify(args, argv) -> int:
    results = run_acceptance(args.only, args.tamper)
    for r in results:
        print(r.line(), file=sys.stderr)
    rows = [(r.cid, r.passed, r.measured, r.tolerance, round(r.seconds, 3), r.time_limit)
            for r in results]
    write_csv(args.out, ["id", "pass", "measured", "tolerance", "seconds", "time_limit"],
              rows, _manifest(argv))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


COMMANDS = {
    "theory-curves": cmd_theory_curves,
    "legendre": cmd_legendre,
    "simulate-boxdim": cmd_simulate_boxdim,
    "simulate-ldp": cmd_simulate_ldp,
    "verify": cmd_verify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, argv)
    except ResourceError as exc:
        print(f"cascade-dim: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (CascadeDimError, argparse.ArgumentTypeError, ValueError) as exc:
        print(f"cascade-dim: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
