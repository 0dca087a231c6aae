"""Cascade weight laws, their moment functionals, and per-node sampling.

Two mean-one laws are supported: log-normal ``W = exp(X)`` with
``X ~ N(-sigma2/2, sigma2)`` and the symmetric two-point law on
``{1 - xi, 1 + xi}``. All moment functionals are closed forms.

Node weights are drawn from a chained counter-based hash. The key of a node
is ``mix(parent_key + BIT_SALT[bit])`` starting from ``mix(seed ^ ROOT_SALT)``
at the root, where ``mix`` is the SplitMix64 finaliser (a bijection on 64-bit
words). Any node can therefore be realized on its own, in any order, and a
whole level can be produced from the previous one with array operations.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import ndtri

from .errors import DomainError, RegimeError

LN2 = math.log(2.0)
LOG4 = math.log(4.0)
CRITICAL_TOL = 1e-12

_MASK64 = (1 << 64) - 1
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_ROOT_SALT = np.uint64(0x9E3779B97F4A7C15)
_BIT_SALT = (np.uint64(0x632BE59BD9B4E019), np.uint64(0xD1B54A32D192ED03))
_DRAW_SALT = np.uint64(0x8CB92BA72F3D8DD7)


@dataclass(frozen=True)
class WeightModel:
    """Law of the cascade weight ``W``.

    Use :meth:`log_normal` or :meth:`two_point` rather than the raw
    constructor. ``sigma2`` is read only for ``kind == "log_normal"`` and
    ``xi`` only for ``kind == "two_point"``.
    """

    kind: str
    sigma2: float = 0.0
    xi: float = 0.0

    def __post_init__(self) -> None:
        if self.kind == "log_normal":
            if not (math.isfinite(self.sigma2) and self.sigma2 > 0):
                raise DomainError(f"log-normal variance must be positive, got {self.sigma2}")
        elif self.kind == "two_point":
            if not 0 < self.xi < 1:
                raise DomainError(f"two-point offset must lie in (0, 1), got {self.xi}")
        else:
            raise DomainError(f"unknown weight law {self.kind!r}")

    @classmethod
    def log_normal(cls, sigma2: float) -> "WeightModel":
        return cls("log_normal", sigma2=float(sigma2))

    @classmethod
    def two_point(cls, xi: float) -> "WeightModel":
        return cls("two_point", xi=float(xi))

    @property
    def mu(self) -> float:
        """Location of ``log W`` for the log-normal law, pinned by ``E(W) = 1``."""
        return -self.sigma2 / 2.0

    @property
    def support(self) -> tuple[float, float]:
        return (1.0 - self.xi, 1.0 + self.xi)

    def spec_string(self) -> str:
        if self.kind == "log_normal":
            return f"lognormal:sigma2={self.sigma2!r}"
        return f"twopoint:xi={self.xi!r}"

    def __str__(self) -> str:
        return self.spec_string()


@dataclass(frozen=True)
class RegimeReport:
    regime: str
    w_logw: float
    gamma: float

    @property
    def subcritical(self) -> bool:
        return self.regime == "subcritical"


_SPEC_RE = re.compile(r"^\s*(lognormal|twopoint)\s*:\s*(\w+)\s*=\s*([^\s,]+)\s*$")


def parse_model(text: str, sigma_convention: str = "sigma2") -> WeightModel:
    """Parse ``lognormal:sigma2=<float>`` or ``twopoint:xi=<float>``.

    With ``sigma_convention="sigma"`` the log-normal number is read as the
    standard deviation and squared. ``lognormal:sigma=<float>`` is accepted
    as an explicit spelling of the same thing.
    """
    m = _SPEC_RE.match(text)
    if not m:
        raise DomainError(f"cannot parse model spec {text!r}")
    family, key, raw = m.groups()
    try:
        value = float(raw)
    except ValueError:
        raise DomainError(f"bad number {raw!r} in model spec {text!r}") from None
    if family == "twopoint":
        if key != "xi":
            raise DomainError(f"two-point spec takes xi=, got {key}=")
        return WeightModel.two_point(value)
    if key not in ("sigma2", "sigma"):
        raise DomainError(f"log-normal spec takes sigma2=, got {key}=")
    if sigma_convention not in ("sigma", "sigma2"):
        raise DomainError(f"unknown sigma convention {sigma_convention!r}")
    if key == "sigma" or sigma_convention == "sigma":
        value = value * value
    return WeightModel.log_normal(value)


def _check_t(t) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0):
        raise DomainError("moment order t must be finite and nonnegative")
    return arr


def _scalar_or_array(arr: np.ndarray, like):
    return float(arr) if np.ndim(like) == 0 else arr


def log2_moment(model: WeightModel, t):
    """``log2 E(W**t)`` for ``t >= 0`` (scalar or array)."""
    tt = _check_t(t)
    if model.kind == "log_normal":
        out = model.sigma2 * tt * (tt - 1.0) / (2.0 * LN2)
    else:
        lo, hi = model.support
        out = (np.logaddexp(tt * math.log(lo), tt * math.log(hi)) - LN2) / LN2
    return _scalar_or_array(out, t)


def log2_moment_slope(model: WeightModel, t):
    """Derivative in ``t`` of :func:`log2_moment`, i.e. ``E(W^t log2 W) / E(W^t)``."""
    tt = _check_t(t)
    if model.kind == "log_normal":
        out = gamma(model) * (2.0 * tt - 1.0)
    else:
        lo, hi = model.support
        a, b = math.log(lo), math.log(hi)
        # weight of the low atom under the tilted law W^t / E(W^t)
        w_lo = 1.0 / (1.0 + np.exp(tt * (b - a)))
        out = (w_lo * a + (1.0 - w_lo) * b) / LN2
    return _scalar_or_array(out, t)


def gamma(model: WeightModel) -> float:
    """``-E(log2 W)``, the drift of log-weight products along a fixed path."""
    if model.kind == "log_normal":
        return model.sigma2 / LOG4
    return -0.5 * math.log2(1.0 - model.xi * model.xi)


def w_log2w(model: WeightModel) -> float:
    """``E(W log2 W)``."""
    if model.kind == "log_normal":
        return model.sigma2 / (2.0 * LN2)
    lo, hi = model.support
    return 0.5 * (lo * math.log2(lo) + hi * math.log2(hi))


def classify_regime(model: WeightModel) -> RegimeReport:
    v = w_log2w(model)
    if abs(v - 1.0) <= CRITICAL_TOL:
        regime = "critical"
    elif v < 1.0:
        regime = "subcritical"
    else:
        regime = "supercritical"
    return RegimeReport(regime, v, gamma(model))


def require_subcritical(model: WeightModel) -> None:
    report = classify_regime(model)
    if not report.subcritical:
        raise RegimeError(
            f"{model} is {report.regime} (E(W log2 W) = {report.w_logw:.6g}); "
            "only subcritical cascades are supported"
        )


# -- counter-based node keys -------------------------------------------------


def _mix(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * _M1
    z = z ^ (z >> np.uint64(27))
    z = z * _M2
    return z ^ (z >> np.uint64(31))


def root_keys(seed) -> np.ndarray:
    """Key of the root node for one seed (shape ``(1,)``) or many."""
    s = np.atleast_1d(np.asarray(seed, dtype=object))
    words = np.array([int(v) & _MASK64 for v in s.ravel()], dtype=np.uint64)
    return _mix(words ^ _ROOT_SALT).reshape(s.shape)


def child_keys(keys: np.ndarray) -> np.ndarray:
    """Keys of the next level: node ``i`` gets children ``2i`` and ``2i + 1``.

    Works along the last axis, so a leading seed axis is carried through.
    """
    out = np.empty(keys.shape[:-1] + (2 * keys.shape[-1],), dtype=np.uint64)
    out[..., 0::2] = _mix(keys + _BIT_SALT[0])
    out[..., 1::2] = _mix(keys + _BIT_SALT[1])
    return out


def step_key(keys: np.ndarray, bit: int) -> np.ndarray:
    return _mix(keys + _BIT_SALT[1 if bit else 0])


def _draws(keys: np.ndarray) -> np.ndarray:
    return _mix(keys ^ _DRAW_SALT)


def log2_weights_from_keys(model: WeightModel, keys: np.ndarray) -> np.ndarray:
    """``log2 W`` for each node key."""
    d = _draws(keys)
    if model.kind == "log_normal":
        u = ((d >> np.uint64(12)).astype(np.float64) + 0.5) * 2.0**-52
        return (model.mu + math.sqrt(model.sigma2) * ndtri(u)) / LN2
    lo, hi = model.support
    return np.where((d >> np.uint64(63)) == 1, math.log2(hi), math.log2(lo))


def weights_from_keys(model: WeightModel, keys: np.ndarray) -> np.ndarray:
    d = _draws(keys)
    if model.kind == "log_normal":
        u = ((d >> np.uint64(12)).astype(np.float64) + 0.5) * 2.0**-52
        return np.exp(model.mu + math.sqrt(model.sigma2) * ndtri(u))
    lo, hi = model.support
    return np.where((d >> np.uint64(63)) == 1, hi, lo)


def _path_bits(path) -> Sequence[int]:
    return path.bits if hasattr(path, "bits") else tuple(path)


def path_keys(seed, path) -> np.ndarray:
    """Keys of every node along ``path`` (excluding the root).

    Returns shape ``(len(path),)`` for an integer seed, or
    ``(n_seeds, len(path))`` for a sequence of seeds.
    """
    bits = _path_bits(path)
    k = root_keys(seed)
    out = np.empty(k.shape + (len(bits),), dtype=np.uint64)
    for j, b in enumerate(bits):
        k = step_key(k, b)
        out[..., j] = k
    return out[0] if np.ndim(seed) == 0 else out


def path_log2_weights(model: WeightModel, seed, path) -> np.ndarray:
    """``log2 W`` at every node along ``path``, in root-to-leaf order."""
    return log2_weights_from_keys(model, path_keys(seed, path))


def sample_weight(model: WeightModel, seed: int, path) -> float:
    """The weight ``W_i`` of node ``path`` in realization ``seed``."""
    bits = _path_bits(path)
    if len(bits) < 1:
        raise DomainError("the root carries no weight; path length must be >= 1")
    keys = path_keys(seed, bits)
    return float(weights_from_keys(model, keys[-1:])[0])
