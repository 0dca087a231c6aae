"""Dyadic cover counts and box-dimension estimates for sets and cascade images.

Image covers use the stopping family from the upper-bound argument: walk the
dyadic tree from the root, keep only intervals meeting ``E``, and stop at the
first interval whose image is shorter than ``r``. The number of stopped
intervals is within a factor two of the minimal number of ``r``-intervals
meeting ``f(E)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy import stats

from .cascade import Cascade, CascadeConfig
from .errors import DomainError, WindowError
from .point_sets import PointSetSpec, resolution_points

WARN_FRACTION = 0.01
DROP_COARSE = 4


@dataclass(frozen=True)
class CountSeries:
    """``(n, N_{2^-n})`` pairs in increasing ``n``."""

    entries: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        entries = tuple(sorted((int(n), int(c)) for n, c in self.entries))
        if any(c < 1 for _, c in entries):
            raise DomainError("counts must be >= 1")
        object.__setattr__(self, "entries", entries)

    @property
    def ns(self) -> np.ndarray:
        return np.array([n for n, _ in self.entries], dtype=int)

    @property
    def counts(self) -> np.ndarray:
        return np.array([c for _, c in self.entries], dtype=int)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class DimEstimate:
    slope: float
    stderr: float
    window: tuple[int, int]
    series: CountSeries
    warned: tuple[int, ...] = field(default=())


@dataclass(frozen=True)
class CoverResult:
    """Stopped intervals for one ``r``; ``capped`` of them hit the depth limit still at size ``>= r``."""

    count: int
    capped: int
    warning: bool


def _check_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 1 or pts.size == 0:
        raise DomainError("points must be a nonempty one-dimensional array")
    if np.any(pts < 0) or np.any(pts > 1) or np.any(~np.isfinite(pts)):
        raise DomainError("points must lie in [0, 1]")
    if np.any(np.diff(pts) < 0):
        pts = np.sort(pts)
    return pts


def occupied_indices(points: np.ndarray, n: int) -> np.ndarray:
    """Sorted distinct ``floor(x 2^n)`` over sorted ``points`` (``x = 1`` joins the last cell)."""
    idx = np.floor(points * 2.0**n).astype(np.int64)
    np.minimum(idx, (1 << n) - 1, out=idx)
    keep = np.ones(idx.size, dtype=bool)
    keep[1:] = idx[1:] != idx[:-1]
    return idx[keep]


def dyadic_cover_count(points, n: int) -> int:
    """Number of level-``n`` dyadic intervals meeting ``points``."""
    if n < 0:
        raise DomainError("n must be >= 0")
    return int(occupied_indices(_check_points(points), n).size)


def cover_count_series(points, ns: Iterable[int]) -> CountSeries:
    pts = _check_points(points)
    return CountSeries(tuple((n, occupied_indices(pts, n).size) for n in ns))


class _ImageCoverer:
    def __init__(self, cascade: Cascade, points: np.ndarray):
        self.cascade = cascade
        depth = cascade.cfg.trunc_depth
        self.occupied = [occupied_indices(points, k) for k in range(depth + 1)]

    def cover(self, r: float) -> CoverResult:
        casc = self.cascade
        depth = casc.cfg.trunc_depth
        if not r > 0:
            raise DomainError("r must be positive")
        if r >= casc.total_mass:
            return CoverResult(1, 0, False)
        frontier = np.zeros(1, dtype=np.int64)
        stopped = capped = 0
        for k in range(depth + 1):
            masses = casc.level_masses(k)[frontier]
            small = masses < r
            stopped += int(np.count_nonzero(small))
            split = frontier[~small]
            if k == depth:
                capped = int(split.size)
                break
            children = np.empty(2 * split.size, dtype=np.int64)
            children[0::2] = 2 * split
            children[1::2] = 2 * split + 1
            occ = self.occupied[k + 1]
            pos = np.searchsorted(occ, children)
            pos[pos == occ.size] = 0
            frontier = children[occ[pos] == children]
            if frontier.size == 0:
                break
        total = stopped + capped
        return CoverResult(total, capped, capped > WARN_FRACTION * total)


def adaptive_image_cover(cfg: CascadeConfig, spec, r: float, *,
                         cascade: Optional[Cascade] = None) -> CoverResult:
    """Size of the stopping family ``{I in J_k : |f(I)| < r <= |f(parent)|}``.

    ``spec`` is a :class:`PointSetSpec` (resolved at the truncation depth)
    or an array of points. Intervals still of size ``>= r`` at depth ``K``
    are counted as stopped and reported in ``capped``.
    """
    cascade = cascade if cascade is not None else Cascade(cfg)
    points = (resolution_points(spec, cfg.trunc_depth) if isinstance(spec, PointSetSpec)
              else _check_points(spec))
    return _ImageCoverer(cascade, points).cover(r)


def brute_force_image_cover(cascade: Cascade, points, r: float) -> int:
    """Literal stopping-family count by enumerating every interval of level ``<= K``.

    Reference implementation for tests; costs ``O(2^K log #points)``.
    """
    pts = _check_points(points)
    depth = cascade.cfg.trunc_depth
    if r >= cascade.total_mass:
        return 1
    count = 0
    for k in range(depth + 1):
        size = 2.0**-k
        left = np.arange(1 << k) * size
        # I = [left, left + size), the last interval closed on the right
        first = np.searchsorted(pts, left, side="left")
        meets = first < pts.size
        inside = np.zeros(1 << k, dtype=bool)
        inside[meets] = pts[first[meets]] < left[meets] + size
        if pts[-1] == 1.0:
            inside[-1] = True
        masses = cascade.level_masses(k)
        if k == 0:
            continue
        parent = cascade.level_masses(k - 1)[np.arange(1 << k) // 2]
        count += int(np.count_nonzero(inside & (masses < r) & (parent >= r)))
        if k == depth:
            count += int(np.count_nonzero(inside & (masses >= r)))
    return count


def regression_dimension(series: CountSeries, window: tuple[int, int]) -> DimEstimate:
    """Least-squares slope of ``log2 N`` against ``n`` over ``n_lo <= n <= n_hi``."""
    n_lo, n_hi = int(window[0]), int(window[1])
    if n_lo >= n_hi:
        raise WindowError(f"empty window {window}")
    ns, counts = series.ns, series.counts
    sel = (ns >= n_lo) & (ns <= n_hi)
    if np.count_nonzero(sel) < 4:
        raise WindowError(f"window {window} holds {np.count_nonzero(sel)} scales, need >= 4")
    fit = stats.linregress(ns[sel].astype(float), np.log2(counts[sel].astype(float)))
    return DimEstimate(float(fit.slope), float(fit.stderr), (n_lo, n_hi), series)


def default_window(ns: Sequence[int], warned: Iterable[int] = (),
                   drop_coarse: int = DROP_COARSE) -> tuple[int, int]:
    """Drop the coarsest scales, then stop before the first warned scale."""
    ns = sorted(ns)
    warned = set(warned)
    usable = []
    for n in ns[drop_coarse:]:
        if n in warned:
            break
        usable.append(n)
    if len(usable) < 4:
        raise WindowError(
            f"only {len(usable)} usable scales after dropping {drop_coarse} coarse and warned ones"
        )
    return usable[0], usable[-1]


def estimate_set_boxdim(points, window: tuple[int, int]) -> DimEstimate:
    series = cover_count_series(points, range(window[0], window[1] + 1))
    return regression_dimension(series, window)


def image_count_series(cfg: CascadeConfig, spec, r_exponents: Iterable[int], *,
                       cascade: Optional[Cascade] = None) -> tuple[CountSeries, tuple[int, ...]]:
    """Stopping-family counts at ``r = 2^-n * total mass``; also returns the warned ``n``."""
    cascade = cascade if cascade is not None else Cascade(cfg)
    points = (resolution_points(spec, cfg.trunc_depth) if isinstance(spec, PointSetSpec)
              else _check_points(spec))
    coverer = _ImageCoverer(cascade, points)
    total = cascade.total_mass
    entries, warned = [], []
    for n in sorted(set(int(n) for n in r_exponents)):
        res = coverer.cover(math.ldexp(total, -n))
        entries.append((n, res.count))
        if res.warning:
            warned.append(n)
    return CountSeries(tuple(entries)), tuple(warned)


def estimate_image_boxdim(cfg: CascadeConfig, spec, r_exponents: Iterable[int],
                          window: Optional[tuple[int, int]] = None) -> DimEstimate:
    """Box-dimension estimate of ``f(E)`` for one realization.

    Scales are relative to the realized total mass. Without an explicit
    ``window`` the four coarsest scales and everything from the first scale
    with a resolution warning onward are dropped.
    """
    series, warned = image_count_series(cfg, spec, r_exponents)
    if window is None:
        window = default_window(series.ns.tolist(), warned)
    est = regression_dimension(series, window)
    return DimEstimate(est.slope, est.stderr, est.window, series, warned)
