"""Dimension formulas for cascade images.

``psi(x) = inf_{t >= 0} (x t + log2 E W^t)`` is evaluated by bisection on the
derivative of the strictly convex objective. ``phi(beta)`` maximizes
``(1 + psi(x)) / (1 + x + beta)`` over ``x in [0, gamma]`` with a dense grid
followed by golden-section refinement; the objective is not known to be
unimodal, so the grid does the global work.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import ConsistencyError, DomainError
from .solvers import bisect_increasing, bisect_increasing_vec, golden_max
from .weights import (
    LN2,
    LOG4,
    WeightModel,
    gamma,
    log2_moment,
    log2_moment_slope,
    require_subcritical,
)

T_TOL = 1e-12
ROOT_TOL = 1e-14
PHI_GRID = 2048


@dataclass(frozen=True)
class LegendreResult:
    x: float
    value: float
    minimizer_t: float


@dataclass(frozen=True)
class PhiResult:
    beta: float
    value: float
    maximizer_x: float


@dataclass(frozen=True)
class BoundsRow:
    p: float
    s1: float
    dim: float
    s2: float


def _nonneg(name: str, v: float) -> float:
    v = float(v)
    if not math.isfinite(v) or v < 0:
        raise DomainError(f"{name} must be finite and >= 0, got {v}")
    return v


def _positive(name: str, v: float) -> float:
    v = float(v)
    if not math.isfinite(v) or v <= 0:
        raise DomainError(f"{name} must be finite and > 0, got {v}")
    return v


def _unit(name: str, v: float) -> float:
    v = float(v)
    if not 0.0 <= v <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {v}")
    return v


def _scalar_moment_fns(model: WeightModel) -> tuple[Callable[[float], float], Callable[[float], float]]:
    # plain-float versions of log2_moment / log2_moment_slope for tight loops
    if model.kind == "log_normal":
        g = gamma(model)
        s2 = model.sigma2

        def m(t: float) -> float:
            return s2 * t * (t - 1.0) / (2.0 * LN2)

        def slope(t: float) -> float:
            return g * (2.0 * t - 1.0)

        return m, slope

    lo, hi = model.support
    a, b = math.log(lo), math.log(hi)

    def m(t: float) -> float:
        x, y = t * a, t * b
        big = max(x, y)
        return (big + math.log(math.exp(x - big) + math.exp(y - big)) - LN2) / LN2

    def slope(t: float) -> float:
        z = t * (b - a)
        w_lo = 1.0 / (1.0 + math.exp(z)) if z < 700 else 0.0
        return (w_lo * a + (1.0 - w_lo) * b) / LN2

    return m, slope


def _bracket_t(slope: Callable[[float], float], x: float) -> float:
    hi = 1.0
    while slope(hi) + x <= 0:
        hi *= 2.0
        if hi > 1e6:
            raise ConsistencyError("could not bracket the Legendre minimizer")
    return hi


def legendre_psi(model: WeightModel, x: float) -> LegendreResult:
    """``psi(x)`` and its minimizing ``t``."""
    require_subcritical(model)
    x = _nonneg("x", x)
    g = gamma(model)
    if x >= g:
        return LegendreResult(x, 0.0, 0.0)
    m, slope = _scalar_moment_fns(model)
    hi = _bracket_t(slope, x)
    t = bisect_increasing(lambda s: slope(s) + x, 0.0, hi, tol=T_TOL)
    return LegendreResult(x, min(x * t + m(t), 0.0), t)


def psi_values(model: WeightModel, xs) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ``psi`` over an array of ``x >= 0``; returns ``(psi, t_star)``."""
    require_subcritical(model)
    xs = np.asarray(xs, dtype=float)
    if np.any(~np.isfinite(xs)) or np.any(xs < 0):
        raise DomainError("x must be finite and >= 0")
    g = gamma(model)
    inner = xs < g
    t = np.zeros_like(xs)
    if np.any(inner):
        xi = xs[inner]
        hi = 1.0
        while np.any(log2_moment_slope(model, hi) + xi <= 0):
            hi *= 2.0
        t[inner] = bisect_increasing_vec(
            lambda s: log2_moment_slope(model, s) + xi,
            np.zeros_like(xi), np.full_like(xi, hi), tol=T_TOL,
        )
    values = np.where(inner, np.minimum(xs * t + log2_moment(model, t), 0.0), 0.0)
    return values, t


@functools.lru_cache(maxsize=128)
def _psi_grid(model: WeightModel) -> tuple[np.ndarray, np.ndarray]:
    xs = np.linspace(0.0, gamma(model), PHI_GRID + 1)
    values, _ = psi_values(model, xs)
    xs.setflags(write=False)
    values.setflags(write=False)
    return xs, values


def phi(model: WeightModel, beta: float) -> PhiResult:
    """``sup_x (1 + psi(x)) / (1 + x + beta)``."""
    require_subcritical(model)
    beta = _nonneg("beta", beta)
    xs, psis = _psi_grid(model)
    eta = (1.0 + psis) / (1.0 + xs + beta)
    i = int(np.argmax(eta))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]

    m, slope = _scalar_moment_fns(model)
    g = gamma(model)

    def objective(x: float) -> float:
        if x >= g:
            return 1.0 / (1.0 + x + beta)
        t = bisect_increasing(lambda s: slope(s) + x, 0.0, _bracket_t(slope, x), tol=T_TOL)
        return (1.0 + min(x * t + m(t), 0.0)) / (1.0 + x + beta)

    x_best, v_best = golden_max(objective, float(lo), float(hi))
    if v_best < eta[i]:
        x_best, v_best = float(xs[i]), float(eta[i])
    return PhiResult(beta, v_best, x_best)


def hausdorff_image_dim(model: WeightModel, d: float) -> float:
    """Root ``s`` in ``[0, 1]`` of ``s - log2 E(W^s) = d``.

    This is the almost-sure Hausdorff dimension of ``f(E)`` when
    ``dim_H E = d``, and the general upper bound for the upper box
    dimension of ``f(E)`` when the upper box dimension of ``E`` is ``d``.
    """
    require_subcritical(model)
    d = _unit("d", d)
    if d == 0.0:
        return 0.0
    if d == 1.0:
        return 1.0
    m, _ = _scalar_moment_fns(model)
    return bisect_increasing(lambda s: s - m(s) - d, 0.0, 1.0, tol=ROOT_TOL)


def lower_bound_s1(model: WeightModel, d: float) -> float:
    """General lower bound ``d / (1 + gamma)``."""
    require_subcritical(model)
    d = _unit("d", d)
    return d / (1.0 + gamma(model))


def sequence_image_dim(model: WeightModel, p: float) -> float:
    """Box dimension of ``f(E_a)`` for a decreasing sequence with decreasing gaps in ``S_p``."""
    require_subcritical(model)
    p = _positive("p", p)
    return phi(model, (1.0 + gamma(model)) * p).value


def thyrse_image_dim(model: WeightModel, alpha: float) -> float:
    """Box dimension of ``f(E^alpha)``; the thyrse set lies in ``S_{1/alpha}``."""
    alpha = _positive("alpha", alpha)
    return sequence_image_dim(model, 1.0 / alpha)


def lognormal_sequence_dim_closed_form(sigma2: float, p: float) -> float:
    """Explicit log-normal evaluation of :func:`sequence_image_dim`.

    ``x0`` is the positive critical point of the objective in ``x``. When
    it is not positive the objective is decreasing on ``[0, gamma]`` and the
    supremum sits at ``x = 0``.
    """
    sigma2 = _positive("sigma2", sigma2)
    p = _positive("p", p)
    require_subcritical(WeightModel.log_normal(sigma2))
    g = sigma2 / LOG4
    a = 1.0 + p + p * g
    x0 = math.sqrt(a * a + 2 * p * g + g * g + 2 * p * g * g - 2 * g) - a
    if not math.isfinite(x0) or x0 >= g:
        raise ConsistencyError(f"critical point x0={x0} outside (0, gamma={g})")
    x = max(x0, 0.0)
    return (1.0 - (x - g) ** 2 / (4.0 * g)) / (1.0 + x + (1.0 + g) * p)


def asymptotic_ratio(model: WeightModel, d: float) -> float:
    """Upper bound over lower bound, ``s(d) / (d / (1 + gamma))``; tends to 1 as d -> 0."""
    d = _unit("d", d)
    if d == 0.0:
        raise DomainError("ratio is 0/0 at d = 0")
    return hausdorff_image_dim(model, d) / lower_bound_s1(model, d)


def bounds_table(model: WeightModel, p_grid: Iterable[float]) -> list[BoundsRow]:
    """``(p, S1, dim, S2)`` rows for the power sequences ``a_n = n^-p``."""
    ps = [_positive("p", p) for p in p_grid]
    if not ps:
        raise DomainError("p grid is empty")
    rows = []
    for p in ps:
        d = 1.0 / (1.0 + p)
        rows.append(BoundsRow(
            p=p,
            s1=lower_bound_s1(model, d),
            dim=sequence_image_dim(model, p),
            s2=hausdorff_image_dim(model, d),
        ))
    return rows
