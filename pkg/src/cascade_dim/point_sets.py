"""Deterministic subsets of [0, 1]: power sequences, thyrse sets, Cantor sets, explicit lists."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, ResourceError, ShapeError

MAX_POINTS = 1 << 26
_KINDS = ("power_sequence", "thyrse", "cantor", "explicit")


@dataclass(frozen=True)
class PointSetSpec:
    """Declarative description of ``E``.

    ``param`` is ``p`` for power sequences ``{n^-p} u {0}``, ``alpha`` for the
    thyrse set ``E^alpha``, and the contraction ratio for the symmetric
    Cantor set. ``cutoff`` is ``n_max``, ``k_max`` or the construction depth
    respectively; ``None`` means "as fine as the resolution asks for".
    """

    kind: str
    param: float = 0.0
    cutoff: Optional[int] = None
    points: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise DomainError(f"unknown set kind {self.kind!r}")
        if self.kind in ("power_sequence", "thyrse") and not self.param > 0:
            raise DomainError(f"{self.kind} parameter must be positive, got {self.param}")
        if self.kind == "cantor" and not 0 < self.param <= 0.5:
            raise DomainError(f"Cantor ratio must lie in (0, 1/2], got {self.param}")
        if self.cutoff is not None and self.cutoff < 1:
            raise DomainError("cutoff must be >= 1")
        if self.kind == "explicit":
            if any(not 0 <= x <= 1 for x in self.points):
                raise DomainError("explicit points must lie in [0, 1]")

    @classmethod
    def power_sequence(cls, p: float, n_max: int | None = None) -> "PointSetSpec":
        return cls("power_sequence", float(p), n_max)

    @classmethod
    def thyrse(cls, alpha: float, k_max: int | None = None) -> "PointSetSpec":
        return cls("thyrse", float(alpha), k_max)

    @classmethod
    def cantor(cls, ratio: float, depth: int | None = None) -> "PointSetSpec":
        return cls("cantor", float(ratio), depth)

    @classmethod
    def explicit(cls, points: Sequence[float]) -> "PointSetSpec":
        return cls("explicit", points=tuple(float(x) for x in points))

    def box_dimension(self) -> float:
        """Box dimension of the infinite set (not of a truncation)."""
        if self.kind == "power_sequence":
            return 1.0 / (1.0 + self.param)
        if self.kind == "thyrse":
            return self.param / (1.0 + self.param)
        if self.kind == "cantor":
            return math.log(2.0) / -math.log(self.param)
        return 0.0

    def spec_string(self) -> str:
        if self.kind == "power_sequence":
            return f"seq:p={self.param!r}"
        if self.kind == "thyrse":
            return f"thyrse:alpha={self.param!r}"
        if self.kind == "cantor":
            return f"cantor:ratio={self.param!r}"
        return f"explicit:{len(self.points)}"


_SET_RE = re.compile(r"^\s*(seq|thyrse|cantor)\s*:\s*(\w+)\s*=\s*([^\s,]+)\s*$")


def parse_set(text: str) -> PointSetSpec:
    """Parse ``seq:p=..``, ``thyrse:alpha=..``, ``cantor:ratio=..`` or ``file:<path>``."""
    if text.startswith("file:"):
        path = Path(text[5:])
        try:
            lines = path.read_text().splitlines()
        except OSError as exc:
            raise DomainError(f"cannot read point file {path}: {exc}") from None
        try:
            pts = [float(s) for s in lines if s.strip()]
        except ValueError as exc:
            raise DomainError(f"bad number in {path}: {exc}") from None
        return PointSetSpec.explicit(pts)
    m = _SET_RE.match(text)
    if not m:
        raise DomainError(f"cannot parse set spec {text!r}")
    family, key, raw = m.groups()
    expected = {"seq": "p", "thyrse": "alpha", "cantor": "ratio"}[family]
    if key != expected:
        raise DomainError(f"{family} spec takes {expected}=, got {key}=")
    try:
        value = float(raw)
    except ValueError:
        raise DomainError(f"bad number {raw!r} in set spec {text!r}") from None
    if family == "seq":
        return PointSetSpec.power_sequence(value)
    if family == "thyrse":
        return PointSetSpec.thyrse(value)
    return PointSetSpec.cantor(value)


def _stem_width(alpha: float, k: int) -> int:
    # floor(alpha * k), robust to alpha * k landing a hair below an integer
    return math.floor(alpha * k + 1e-9)


def _guard(count: int) -> None:
    if count > MAX_POINTS:
        raise ResourceError(f"{count} points exceed the guard of {MAX_POINTS}")


def _cantor_lefts(ratio: float, depth: int) -> np.ndarray:
    lefts = np.zeros(1)
    for j in range(depth):
        lefts = np.concatenate([lefts, lefts + (1.0 - ratio) * ratio**j])
    return lefts


def enumerate_points(spec: PointSetSpec) -> np.ndarray:
    """Sorted, deduplicated points of the truncated set ``spec``."""
    if spec.kind == "explicit":
        return np.unique(np.asarray(spec.points, dtype=float))
    if spec.cutoff is None:
        raise DomainError(f"{spec.kind} needs a finite cutoff; see resolution_points")
    if spec.kind == "power_sequence":
        _guard(spec.cutoff)
        n = np.arange(1, spec.cutoff + 1, dtype=float)
        pts = np.concatenate([[0.0], n ** -spec.param])
    elif spec.kind == "thyrse":
        widths = [_stem_width(spec.param, k) for k in range(1, spec.cutoff + 1)]
        _guard(sum(1 << m for m in widths))
        parts = [np.zeros(1)]
        for k, m in enumerate(widths, start=1):
            j = np.arange(1 << m, dtype=float)
            parts.append(2.0**-k + j * 2.0 ** -(k + m))
        pts = np.concatenate(parts)
    else:
        _guard(2 << spec.cutoff)
        lefts = _cantor_lefts(spec.param, spec.cutoff)
        # the set is symmetric, so right endpoints are 1 - left endpoints (never above 1)
        pts = np.concatenate([lefts, 1.0 - lefts])
    return np.unique(pts)


def resolution_points(spec: PointSetSpec, depth: int) -> np.ndarray:
    """Points meeting exactly the same dyadic intervals of level ``<= depth`` as ``E``.

    Where the set is denser than ``2**-depth`` it is replaced by the grid
    ``j * 2**-depth``, which touches the same dyadic intervals. A finite
    ``cutoff`` in ``spec`` is honoured literally instead.
    """
    if spec.kind == "explicit" or spec.cutoff is not None:
        return enumerate_points(spec)
    h = 2.0**-depth
    if spec.kind == "power_sequence":
        p = spec.param
        # gaps n^-p - (n+1)^-p ~ p n^(-p-1) drop below h near this n
        guess = int((p / h) ** (1.0 / (p + 1.0))) + 2
        _guard(2 * guess)
        n = np.arange(1, 2 * guess + 2, dtype=float)
        a = n**-p
        small = np.nonzero(a[:-1] - a[1:] < h)[0]
        last = int(small[0]) if small.size else len(a) - 1
        grid = np.arange(0, math.floor(a[last] / h) + 1, dtype=float) * h
        return np.unique(np.concatenate([a[: last + 1], grid]))
    if spec.kind == "thyrse":
        alpha = spec.param
        parts = [np.zeros(1)]
        total = 1
        for k in range(1, depth + 1):
            m = _stem_width(alpha, k)
            if k + m <= depth:
                j = np.arange(1 << m, dtype=float)
                parts.append(2.0**-k + j * 2.0 ** -(k + m))
                total += 1 << m
            else:
                i = np.arange(1 << (depth - k), dtype=float)
                parts.append(2.0**-k + i * h)
                total += 1 << (depth - k)
            _guard(total)
        return np.unique(np.concatenate(parts))
    ratio = spec.param
    levels = max(1, math.ceil(depth * math.log(2.0) / -math.log(ratio) - 1e-9))
    return enumerate_points(PointSetSpec.cantor(ratio, levels))


@dataclass(frozen=True)
class SpEstimate:
    exponent: float
    tail_slope: float
    n: int


def _as_decreasing(seq, name: str = "sequence") -> np.ndarray:
    a = np.asarray(seq, dtype=float)
    if a.ndim != 1:
        raise ShapeError(f"{name} must be one-dimensional")
    if np.any(a <= 0) or np.any(np.diff(a) >= 0):
        raise ShapeError(f"{name} must be strictly decreasing and positive")
    return a


def sp_exponent(seq) -> SpEstimate:
    """Estimate ``p`` with ``-log a_n / log n -> p`` (``n`` counted from 1).

    The exponent is read off at the last term; ``tail_slope`` is the
    least-squares slope of ``-log a_n`` on ``log n`` over the second half.
    """
    a = _as_decreasing(seq)
    if len(a) < 16:
        raise ShapeError("need at least 16 terms")
    n = np.arange(1, len(a) + 1, dtype=float)
    est = -math.log(a[-1]) / math.log(n[-1])
    half = len(a) // 2
    slope = float(np.polyfit(np.log(n[half:]), -np.log(a[half:]), 1)[0])
    return SpEstimate(est, slope, len(a))


def eventually_separates(a, b, n0: int = 1) -> Optional[bool]:
    """Whether every gap ``[a_{n+1}, a_n]`` with ``n >= n0`` holds some ``b_m``.

    Indices are 1-based. Returns ``None`` when no gap fails but some gap lies
    entirely below the last available ``b_m``, so the finite data cannot decide.
    """
    a = _as_decreasing(a, "a")
    b = _as_decreasing(b, "b")
    if n0 < 1:
        raise DomainError("n0 must be >= 1")
    hi = a[n0 - 1:-1]
    lo = a[n0:]
    if hi.size == 0:
        return None
    bs = b[::-1]
    hits = np.searchsorted(bs, hi, side="right") - np.searchsorted(bs, lo, side="left")
    empty = hits == 0
    unknown = empty & (bs[0] > hi)
    if np.any(empty & ~unknown):
        return False
    if np.any(unknown):
        return None
    return True


def decreasing_gaps(a, rtol: float = 1e-12) -> bool:
    """True iff ``a_n - a_{n+1}`` is nonincreasing (up to rounding of size ``rtol * max|a|``)."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or len(a) < 3:
        raise ShapeError("need a one-dimensional sequence of length >= 3")
    gaps = a[:-1] - a[1:]
    tol = rtol * float(np.max(np.abs(a)))
    return bool(np.all(gaps[1:] <= gaps[:-1] + tol))
