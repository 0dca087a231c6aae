"""Multi-seed experiments shared by the CLI, the verification suite and scripts/."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Optional, Sequence, TypeVar

import numpy as np

from .boxdim import DimEstimate, default_window, image_count_series, regression_dimension
from .cascade import CascadeConfig, count_large_product_paths
from .errors import DomainError, ResourceError
from .point_sets import PointSetSpec
from .theory import hausdorff_image_dim, legendre_psi, sequence_image_dim, thyrse_image_dim
from .weights import WeightModel

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "CASCADE_DIM_THREADS"
LDP_MAX_N = 26


def thread_count(threads: Optional[int] = None) -> int:
    if threads is None:
        raw = os.environ.get(THREADS_ENV, "")
        threads = int(raw) if raw.strip() else (os.cpu_count() or 1)
    return max(1, int(threads))


def map_ordered(fn: Callable[[T], R], items: Sequence[T], threads: Optional[int] = None) -> list[R]:
    """``[fn(x) for x in items]``, possibly on a thread pool; order is preserved."""
    n = min(thread_count(threads), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def target_dimension(model: WeightModel, spec: PointSetSpec) -> float:
    """Almost-sure box dimension of ``f(E)`` predicted for ``spec`` (nan if none applies)."""
    if spec.kind == "power_sequence":
        return sequence_image_dim(model, spec.param)
    if spec.kind == "thyrse":
        return thyrse_image_dim(model, spec.param)
    if spec.kind == "cantor":
        return hausdorff_image_dim(model, spec.box_dimension())
    return math.nan


def boxdim_estimates(model: WeightModel, spec: PointSetSpec, depth: int, seeds: Sequence[int],
                     scales: Iterable[int], window: Optional[tuple[int, int]] = None,
                     threads: Optional[int] = None) -> list[DimEstimate]:
    scales = list(scales)

    def one(seed: int) -> DimEstimate:
        cfg = CascadeConfig(model, seed, depth)
        series, warned = image_count_series(cfg, spec, scales)
        win = window if window is not None else default_window(series.ns.tolist(), warned)
        est = regression_dimension(series, win)
        return DimEstimate(est.slope, est.stderr, est.window, series, warned)

    return map_ordered(one, list(seeds), threads)


BOXDIM_HEADER = ["seed", "slope", "stderr", "n_lo", "n_hi", "warn", "target"]
SCALES_HEADER = ["seed", "n", "count", "warn"]


def boxdim_tables(model: WeightModel, spec: PointSetSpec, depth: int, seeds: Sequence[int],
                  scales: Iterable[int], window: Optional[tuple[int, int]] = None,
                  threads: Optional[int] = None):
    """Per-seed summary rows (plus a final ``mean`` row) and per-scale rows."""
    seeds = sorted(set(int(s) for s in seeds))
    if not seeds:
        raise DomainError("no seeds given")
    target = target_dimension(model, spec)
    ests = boxdim_estimates(model, spec, depth, seeds, scales, window, threads)
    summary, per_scale = [], []
    for seed, est in zip(seeds, ests):
        summary.append([seed, est.slope, est.stderr, est.window[0], est.window[1],
                        bool(est.warned), target])
        for n, count in est.series.entries:
            per_scale.append([seed, n, count, n in est.warned])
    slopes = np.array([e.slope for e in ests])
    sem = float(slopes.std(ddof=1) / math.sqrt(len(slopes))) if len(slopes) > 1 else math.nan
    summary.append(["mean", float(slopes.mean()), sem, "", "",
                    any(e.warned for e in ests), target])
    return summary, per_scale


LDP_HEADER = ["n", "count", "log2count_over_n", "target", "seed"]


def ldp_counts(model: WeightModel, seed: int, ns: Sequence[int], x: float, delta: float) -> list[int]:
    cfg = CascadeConfig(model, seed, max(ns))
    return [count_large_product_paths(cfg, n, x, delta) for n in ns]


def ldp_table(model: WeightModel, x: float, delta: float, n_min: int, n_max: int,
              seeds: Sequence[int], threads: Optional[int] = None) -> list[list]:
    """Rows ``(n, count, log2(count)/n, 1 + psi(x), seed)`` sorted by ``(n, seed)``."""
    if not 1 <= n_min <= n_max:
        raise DomainError("need 1 <= n_min <= n_max")
    if n_max > LDP_MAX_N:
        raise ResourceError(f"n={n_max} exceeds the path-count guard of {LDP_MAX_N}")
    target = 1.0 + legendre_psi(model, x).value
    ns = list(range(n_min, n_max + 1))
    seeds = sorted(set(int(s) for s in seeds))
    counts = map_ordered(lambda s: ldp_counts(model, s, ns, x, delta), seeds, threads)
    rows = []
    for i, n in enumerate(ns):
        for seed, cs in zip(seeds, counts):
            c = cs[i]
            rows.append([n, c, math.log2(c) / n if c > 0 else -math.inf, target, seed])
    return rows


def ldp_slope(ns: Sequence[int], counts: Sequence[int]) -> float:
    """Least-squares slope of ``log2 count`` on ``n``."""
    c = np.asarray(counts, dtype=float)
    if np.any(c <= 0):
        return -math.inf
    return float(np.polyfit(np.asarray(ns, dtype=float), np.log2(c), 1)[0])
