"""One-dimensional root finding and maximization used by the dimension formulas."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def bisect_increasing(f: Callable[[float], float], lo: float, hi: float,
                      tol: float = 1e-13, max_iter: int = 200) -> float:
    """Root of an increasing ``f`` with ``f(lo) <= 0 <= f(hi)``."""
    flo, fhi = f(lo), f(hi)
    if flo > 0 or fhi < 0:
        raise ValueError(f"root not bracketed: f({lo})={flo}, f({hi})={fhi}")
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid
        if fm < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bisect_increasing_vec(f: Callable[[np.ndarray], np.ndarray], lo: np.ndarray,
                          hi: np.ndarray, tol: float = 1e-12,
                          max_iter: int = 200) -> np.ndarray:
    """Elementwise :func:`bisect_increasing` for a vectorized ``f``.

    ``f(x)[i]`` must depend on ``x[i]`` only and be increasing in it.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    for _ in range(max_iter):
        if not np.any(hi - lo > tol):
            break
        mid = 0.5 * (lo + hi)
        neg = f(mid) < 0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    return 0.5 * (lo + hi)


def golden_max(f: Callable[[float], float], lo: float, hi: float,
               tol: float = 1e-11, max_iter: int = 200) -> tuple[float, float]:
    """Golden-section search for a maximum of ``f`` on ``[lo, hi]``.

    Returns ``(argmax, max)``. The endpoints are compared at the end, so a
    monotone ``f`` still yields its best endpoint.
    """
    a, b = lo, hi
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
    best_x, best_f = (x1, f1) if f1 >= f2 else (x2, f2)
    for x in (lo, hi):
        fx = f(x)
        if fx > best_f:
            best_x, best_f = x, fx
    return best_x, best_f
