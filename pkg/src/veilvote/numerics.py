"""Scalar root finding and maximisation used by the numerical solvers."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def bisect(f: Callable[[float], float], lo: float, hi: float,
           xtol: float = 1e-12, maxiter: int = 400) -> float:
    """Root of f on [lo, hi]; f(lo) and f(hi) must differ in sign."""
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError(f"root not bracketed: f({lo})={flo}, f({hi})={fhi}")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= xtol or mid == lo or mid == hi:
            return mid
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def golden_section_max(f: Callable[[float], float], lo: float, hi: float,
                       xtol: float = 1e-12, maxiter: int = 200) -> tuple[float, float]:
    """Golden-section search for a maximum of a unimodal f on [lo, hi].

    Returns (x, f(x)) where x is the best point evaluated, endpoints included.
    """
    best_x, best_f = lo, f(lo)
    fh = f(hi)
    if fh > best_f:
        best_x, best_f = hi, fh
    a, b = lo, hi
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(maxiter):
        if b - a <= xtol:
            break
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
    for x, fx in ((x1, f1), (x2, f2)):
        if fx > best_f or (fx == best_f and x < best_x):
            best_x, best_f = x, fx
    return best_x, best_f


def _slope(f, t: float, h: float, lo: float, hi: float) -> float:
    # five-point stencil inside, second-order one-sided near the edges
    if t - 2 * h >= lo and t + 2 * h <= hi:
        return (f(t - 2 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2 * h)) / (12 * h)
    if t - h < lo:
        return (-3.0 * f(t) + 4.0 * f(t + h) - f(t + 2 * h)) / (2 * h)
    if t + h > hi:
        return (3.0 * f(t) - 4.0 * f(t - h) + f(t - 2 * h)) / (2 * h)
    return (f(t + h) - f(t - h)) / (2 * h)


def _polish(slope, t: float, lo: float, hi: float, dlo: float, dhi: float,
            width: float) -> float:
    """Sharpen a golden-section estimate by bisecting the slope sign.

    Comparing function values pins a smooth maximum only to about
    sqrt(machine eps) relative; the slope crosses zero linearly, which
    recovers close to full precision.  [lo, hi] is the refinement bracket,
    [dlo, dhi] the domain.
    """
    while True:
        a = max(lo, t - width)
        b = min(hi, t + width)
        sa = slope(a)
        sb = slope(b)
        if sa > 0.0 and sb < 0.0:
            break
        if a == dlo and sa <= 0.0 and sb <= 0.0:
            return dlo
        if b == dhi and sb >= 0.0 and sa >= 0.0:
            return dhi
        if a == lo and b == hi:
            return t
        width *= 8.0
    for _ in range(200):
        m = 0.5 * (a + b)
        if m == a or m == b:
            break
        if slope(m) > 0.0:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


@dataclass(frozen=True)
class MaxResult:
    x: float
    value: float
    grid_x: np.ndarray
    grid_values: np.ndarray


def maximize_on_interval(f: Callable, lo: float, hi: float, grid_size: int = 512,
                         n_starts: int = 3, xtol: float | None = None,
                         slope: Callable[[float], float] | None = None) -> MaxResult:
    """Global scan on a uniform grid, then golden-section refinement.

    ``f`` must accept a numpy array (vectorised scan) and a float.  The best
    ``n_starts`` grid local maxima are refined inside their neighbouring
    grid cells and polished; ties go to the smaller abscissa.  ``slope``,
    if given, need only have the sign of f'; it replaces the finite
    difference used in polishing, which matters when f is flat at the top.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    if not hi >= lo:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    if hi == lo:
        v = float(f(lo))
        return MaxResult(lo, v, np.array([lo]), np.array([v]))
    grid = np.linspace(lo, hi, grid_size)
    vals = np.asarray(f(grid), dtype=float)
    if xtol is None:
        xtol = 1e-13 * max(1.0, abs(hi))
    # local maxima of the scan, endpoints included
    left = np.concatenate(([-np.inf], vals[:-1]))
    right = np.concatenate((vals[1:], [-np.inf]))
    peaks = np.flatnonzero((vals >= left) & (vals >= right))
    order = sorted(peaks, key=lambda i: (-vals[i], i))[:n_starts]
    span = hi - lo
    h = max(1e-5 * span, 1e-13 * max(1.0, abs(hi)))
    fs = lambda x: float(f(x))
    if slope is None:
        slope = lambda x: _slope(fs, x, h, lo, hi)
    best_x, best_v = None, -math.inf
    for i in order:
        a = grid[max(i - 1, 0)]
        b = grid[min(i + 1, grid_size - 1)]
        x, _ = golden_section_max(fs, a, b, xtol=xtol)
        x = _polish(slope, x, a, b, lo, hi, width=max(16 * xtol, 1e-7 * span))
        v = fs(x)
        if v > best_v or (v == best_v and x < best_x):
            best_x, best_v = x, v
    # never return something worse than the scan itself
    j = int(np.argmax(vals))
    if vals[j] > best_v + 1e-12 * max(1.0, abs(best_v)):
        best_x, best_v = float(grid[j]), float(vals[j])
    return MaxResult(float(best_x), float(best_v), grid, vals)
