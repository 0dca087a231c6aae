"""Lazy realization of one cascade sample truncated at a finite depth.

With truncation depth ``K`` and ``m`` extra tail levels the realized measure
lives on level ``D = K + m``: each level-``D`` interval carries
``2**-D * W_{i_1} ... W_{i_1...i_D}`` and coarser intervals carry the pairwise
sum of their two children. ``m = 0`` is the unit tail (``L_i`` replaced by 1
at level ``K``); ``m > 0`` replaces ``L_i`` at level ``K`` by its level-``m``
martingale approximant. Because coarse masses are literal pairwise sums,
``mass(i) == mass(i0) + mass(i1)`` holds exactly in floating point.

Weight products are carried as ``log2`` sums, accumulated root to leaf in a
fixed order, so every code path (single interval, batch, full pyramid)
produces bit-identical numbers.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .errors import DepthError, DomainError, GridError, ResourceError
from .weights import (
    WeightModel,
    child_keys,
    log2_weights_from_keys,
    require_subcritical,
    root_keys,
    step_key,
)

MAX_DEPTH = 40
# subtrees are expanded in blocks of at most 2**CHUNK_BITS leaves
CHUNK_BITS = 20
MAX_SUBTREE_BITS = 24


@dataclass(frozen=True)
class DyadicPath:
    """Binary word ``i_1 ... i_k`` addressing ``[sum i_j 2^-j, sum i_j 2^-j + 2^-k)``."""

    bits: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise DomainError(f"path bits must be 0 or 1, got {self.bits}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def parse(cls, text: str) -> "DyadicPath":
        return cls(tuple(int(c) for c in text.strip()))

    @classmethod
    def from_index(cls, length: int, index: int) -> "DyadicPath":
        if length < 0 or not 0 <= index < (1 << length):
            raise DomainError(f"index {index} out of range for length {length}")
        return cls(tuple((index >> (length - 1 - j)) & 1 for j in range(length)))

    @property
    def length(self) -> int:
        return len(self.bits)

    @property
    def index(self) -> int:
        v = 0
        for b in self.bits:
            v = 2 * v + b
        return v

    def interval(self) -> tuple[Fraction, Fraction]:
        left = Fraction(self.index, 1 << self.length)
        return left, left + Fraction(1, 1 << self.length)

    def child(self, bit: int) -> "DyadicPath":
        return DyadicPath(self.bits + (bit,))

    @property
    def parent(self) -> "DyadicPath":
        if not self.bits:
            raise DomainError("the root has no parent")
        return DyadicPath(self.bits[:-1])

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return "".join(map(str, self.bits)) or "<root>"


@dataclass(frozen=True)
class CascadeConfig:
    """One realization: weight law, seed, truncation depth ``K`` and tail rule.

    ``tail_levels = 0`` is the unit tail; ``tail_levels = m > 0`` is the
    extended tail of depth ``m``.
    """

    model: WeightModel
    seed: int
    trunc_depth: int
    tail_levels: int = 0

    def __post_init__(self) -> None:
        require_subcritical(self.model)
        if not 1 <= self.trunc_depth <= MAX_DEPTH:
            raise DomainError(f"truncation depth must be in [1, {MAX_DEPTH}], got {self.trunc_depth}")
        if self.tail_levels < 0:
            raise DomainError("tail_levels must be >= 0")

    @property
    def mass_depth(self) -> int:
        return self.trunc_depth + self.tail_levels

    @property
    def tail_rule(self) -> str:
        return "unit_tail" if self.tail_levels == 0 else f"extended_tail({self.tail_levels})"


@dataclass(frozen=True)
class MassResult:
    path: DyadicPath
    mass: float


# -- level expansion ---------------------------------------------------------


def _expand(model: WeightModel, keys: np.ndarray, logp: np.ndarray, levels: int):
    for _ in range(levels):
        keys = child_keys(keys)
        logp = np.repeat(logp, 2, axis=-1) + log2_weights_from_keys(model, keys)
    return keys, logp


def _pairwise_sum(a: np.ndarray) -> np.ndarray:
    while a.shape[-1] > 1:
        a = a[..., 0::2] + a[..., 1::2]
    return a[..., 0]


def iter_level_log_products(model: WeightModel, seed: int, level: int,
                            chunk_bits: int = CHUNK_BITS) -> Iterator[np.ndarray]:
    """Yield ``log2(W_{i_1} ... W_{i_1..i_level})`` for all nodes of ``level``.

    Blocks come out in index order and hold at most ``2**chunk_bits`` nodes.
    """
    top = max(level - chunk_bits, 0)
    keys, logp = _expand(model, root_keys(seed), np.zeros(1), top)
    if top == level:
        yield logp
        return
    for i in range(keys.shape[0]):
        _, block = _expand(model, keys[i:i + 1], logp[i:i + 1], level - top)
        yield block


def _step(model: WeightModel, state, bit: int):
    keys, logp = state
    keys = step_key(keys, bit)
    return keys, logp + log2_weights_from_keys(model, keys)


def _path_state(model: WeightModel, seed: int, bits: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    state = (root_keys(seed), np.zeros(1))
    for b in bits:
        state = _step(model, state, b)
    return state


def _subtree_mass(cfg: CascadeConfig, keys: np.ndarray, logp: np.ndarray, k: int) -> float:
    depth = cfg.mass_depth
    extra = depth - k
    if extra > MAX_SUBTREE_BITS:
        raise ResourceError(
            f"mass at level {k} needs a 2**{extra}-leaf subtree; "
            f"limit is 2**{MAX_SUBTREE_BITS}"
        )
    _, leaf_logp = _expand(cfg.model, keys, logp, extra)
    return float(_pairwise_sum(np.exp2(leaf_logp - depth)))


def _as_path(path) -> DyadicPath:
    if isinstance(path, DyadicPath):
        return path
    if isinstance(path, str):
        return DyadicPath.parse(path)
    return DyadicPath(tuple(path))


def interval_mass(cfg: CascadeConfig, path) -> MassResult:
    """Realized mass ``|f(I_path)|`` under the configured tail rule."""
    path = _as_path(path)
    if path.length > cfg.trunc_depth:
        raise DepthError(f"path of length {path.length} is deeper than K={cfg.trunc_depth}")
    keys, logp = _path_state(cfg.model, cfg.seed, path.bits)
    return MassResult(path, _subtree_mass(cfg, keys, logp, path.length))


def image_lengths_at_level(cfg: CascadeConfig, paths: Sequence) -> list[MassResult]:
    """Batch :func:`interval_mass`; weight products of shared prefixes are built once."""
    paths = [_as_path(p) for p in paths]
    for p in paths:
        if p.length > cfg.trunc_depth:
            raise DepthError(f"path of length {p.length} is deeper than K={cfg.trunc_depth}")
    states: dict[tuple[int, ...], tuple[np.ndarray, np.ndarray]] = {
        (): (root_keys(cfg.seed), np.zeros(1))
    }
    masses: dict[tuple[int, ...], float] = {}
    for p in paths:
        if p.bits in masses:
            continue
        j = p.length
        while p.bits[:j] not in states:
            j -= 1
        for n in range(j, p.length):
            states[p.bits[:n + 1]] = _step(cfg.model, states[p.bits[:n]], p.bits[n])
        keys, logp = states[p.bits]
        masses[p.bits] = _subtree_mass(cfg, keys, logp, p.length)
    return [MassResult(p, masses[p.bits]) for p in paths]


class Cascade:
    """Realized masses of every dyadic interval down to the truncation depth.

    The full pyramid is built on first use and then cached on the instance,
    so one object should serve one task. Building it costs ``2**D`` node
    draws for ``D = K + tail_levels``.
    """

    MAX_PYRAMID_DEPTH = MAX_SUBTREE_BITS

    def __init__(self, cfg: CascadeConfig):
        self.cfg = cfg

    @functools.cached_property
    def _levels(self) -> list[np.ndarray]:
        cfg = self.cfg
        depth = cfg.mass_depth
        if depth > self.MAX_PYRAMID_DEPTH:
            raise ResourceError(
                f"pyramid of depth {depth} exceeds the limit {self.MAX_PYRAMID_DEPTH}"
            )
        blocks = [np.exp2(b - depth) for b in iter_level_log_products(cfg.model, cfg.seed, depth)]
        a = np.concatenate(blocks)
        levels = []
        for k in range(depth, -1, -1):
            if k <= cfg.trunc_depth:
                a.setflags(write=False)
                levels.append(a)
            if k:
                a = a[0::2] + a[1::2]
        levels.reverse()
        return levels

    def level_masses(self, k: int) -> np.ndarray:
        if not 0 <= k <= self.cfg.trunc_depth:
            raise DepthError(f"level {k} outside [0, {self.cfg.trunc_depth}]")
        return self._levels[k]

    @property
    def total_mass(self) -> float:
        return float(self._levels[0][0])

    def mass(self, path) -> float:
        path = _as_path(path)
        if path.length > self.cfg.trunc_depth:
            raise DepthError(f"path of length {path.length} is deeper than K={self.cfg.trunc_depth}")
        return float(self._levels[path.length][path.index])

    def cdf(self, x) -> float:
        return cdf_value(self.cfg, x, cascade=self)


def _grid_index(x, depth: int) -> int:
    try:
        fx = Fraction(x)
    except (TypeError, ValueError):
        raise GridError(f"cannot interpret {x!r} as a grid point") from None
    if not 0 <= fx <= 1:
        raise GridError(f"x={x} outside [0, 1]")
    j = fx * (1 << depth)
    if j.denominator != 1:
        raise GridError(f"x={x} is not on the level-{depth} dyadic grid")
    return int(j)


def cdf_value(cfg: CascadeConfig, x, cascade: Cascade | None = None) -> float:
    """``f_K(x) = mu_K([0, x))`` for ``x`` on the level-``K`` dyadic grid.

    Walks the path of ``x`` and adds the masses of left siblings, top level
    first. ``x = 1`` returns the total mass.
    """
    depth = cfg.trunc_depth
    j = _grid_index(x, depth)
    if cascade is None and cfg.mass_depth <= Cascade.MAX_PYRAMID_DEPTH:
        cascade = Cascade(cfg)

    def mass(k: int, idx: int) -> float:
        if cascade is not None:
            return float(cascade.level_masses(k)[idx])
        return interval_mass(cfg, DyadicPath.from_index(k, idx)).mass

    if j == 1 << depth:
        return mass(0, 0)
    total = 0.0
    for k in range(1, depth + 1):
        idx = j >> (depth - k)
        if idx & 1:
            total += mass(k, idx - 1)
    return total


def count_large_product_paths(cfg: CascadeConfig, n: int, x: float, delta: float) -> int:
    """``#{i in {0,1}^n : W_{i_1} ... W_{i_1..i_n} >= 2^(-(x + delta) n)}``."""
    if not 1 <= n <= cfg.trunc_depth:
        raise DepthError(f"n={n} outside [1, K={cfg.trunc_depth}]")
    if not x > 0 or delta < 0:
        raise DomainError("need x > 0 and delta >= 0")
    threshold = -(x + delta) * n
    return int(sum(np.count_nonzero(b >= threshold)
                   for b in iter_level_log_products(cfg.model, cfg.seed, n)))


def total_masses(model: WeightModel, seeds: Sequence[int], depth: int,
                 tail_levels: int = 0) -> np.ndarray:
    """Total realized mass for many seeds at once.

    Equal, bit for bit, to ``Cascade(CascadeConfig(model, s, depth, tail_levels)).total_mass``.
    """
    require_subcritical(model)
    d = depth + tail_levels
    if d > 16:
        raise ResourceError("batched total mass is limited to depth 16")
    seeds = list(seeds)
    keys = root_keys(seeds).reshape(len(seeds), 1)
    _, logp = _expand(model, keys, np.zeros((len(seeds), 1)), d)
    return _pairwise_sum(np.exp2(logp - d))
