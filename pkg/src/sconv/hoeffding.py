"""Legendre-type machinery for convex rate functions and anti-divergences.

A rate function here is convex on ``[1, t_hi]`` with ``f(1) = 0`` and
``f >= 0``; typical instances are cumulant limits ``alpha -> psi_bar(alpha)``
of state families.  Two transforms are provided:

* the polar ``f_polar(a) = sup_{t > 1} { a (t - 1) - f(t) }``, and
* the anti-divergence ``H_r = sup_{t > 1} (r (t - 1) - f(t)) / t``,

with the standard case split: ``H_r = 0`` for ``r`` at most the right
derivative of ``f`` at 1, a linear tail ``H_r = r - a_max`` beyond
``r_max = f_polar(a_max) + a_max`` when the slope at infinity ``a_max`` is
finite, and otherwise the interior value ``r - a_r`` where ``a_r`` is the
unique root of ``f_polar(a) + a = r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

DEFAULT_T_HI = 64.0
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0

__all__ = [
    "ConvexRate",
    "HoeffdingResult",
    "PolarResult",
    "polar",
    "polar_detail",
    "hoeffding_anti",
    "sc_lower_bound_curve",
    "rate_from_samples",
]


def _golden_max(g, lo, hi, xtol=1e-10):
    """Golden-section maximizer of a unimodal function on [lo, hi]."""
    a, b = float(lo), float(hi)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    gc, gd = g(c), g(d)
    while b - a > xtol:
        if gc >= gd:
            b, d, gd = d, c, gc
            c = b - _INVPHI * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + _INVPHI * (b - a)
            gd = g(d)
    t = 0.5 * (a + b)
    return t, g(t)


def _convex_minorant(x, y):
    """Greatest convex minorant of points on a grid; returns minorant values."""
    hull = [0]
    for i in range(1, len(x)):
        while len(hull) >= 2:
            i0, i1 = hull[-2], hull[-1]
            cross = (x[i1] - x[i0]) * (y[i] - y[i0]) - (y[i1] - y[i0]) * (x[i] - x[i0])
            if cross <= 0.0:
                hull.pop()
            else:
                break
        hull.append(i)
    hx = x[hull]
    hy = y[hull]
    return np.interp(x, hx, hy)


@dataclass
class ConvexRate:
    """Convex rate function on ``[1, t_hi]`` with ``f(1) = 0``.

    ``slope_at_infinity`` may be ``math.inf``; when it comes from a last-chord
    proxy rather than an exact limit, ``slope_is_exact`` is False and regime
    labels derived from it are best-available rather than certified.
    """

    fn: Callable[[float], float]
    right_derivative_at_1: float
    slope_at_infinity: float = math.inf
    t_hi: float = DEFAULT_T_HI
    slope_is_exact: bool = True
    grid: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None
    residuals: Optional[np.ndarray] = field(default=None, repr=False)

    def __call__(self, t):
        if not 1.0 <= t <= self.t_hi + 1e-12:
            raise ValueError(f"t = {t!r} outside domain [1, {self.t_hi}]")
        return float(self.fn(min(t, self.t_hi)))

    @classmethod
    def from_callable(
        cls,
        fn,
        right_derivative_at_1=None,
        slope_at_infinity=math.inf,
        t_hi=DEFAULT_T_HI,
        slope_is_exact=True,
    ):
        f1 = fn(1.0)
        if abs(f1) > 1e-9:
            raise ValueError(f"rate function must vanish at 1, got f(1) = {f1!r}")
        if right_derivative_at_1 is None:
            h = 1e-6
            right_derivative_at_1 = (fn(1.0 + h) - f1) / h
        return cls(
            fn=lambda t: fn(t) - f1,
            right_derivative_at_1=float(right_derivative_at_1),
            slope_at_infinity=float(slope_at_infinity),
            t_hi=float(t_hi),
            slope_is_exact=slope_is_exact,
        )

    @classmethod
    def from_samples(cls, alphas, values, residuals=None, slope_at_infinity=None,
                     right_derivative_at_1=None):
        """Piecewise-linear convex rate through sampled points.

        The grid must start at ``alpha = 1`` where the value must vanish to
        1e-8.  Data is projected onto its greatest convex minorant; a
        projection distance beyond ``1e-6 * scale`` is an error.  Linear
        interpolation keeps the curve convex, and Legendre-type sups then
        agree exactly with discrete sups over the grid.  When the exact
        derivative at 1 is known (e.g. a closed-form relative-entropy rate),
        pass it; the first-chord default overestimates it by O(grid step).
        """
        a = np.asarray(alphas, dtype=float)
        v = np.asarray(values, dtype=float).copy()
        if a.ndim != 1 or a.shape != v.shape or a.size < 2:
            raise ValueError("need matching 1-d grids with at least two points")
        if np.diff(a).min() <= 0:
            raise ValueError("alpha grid must be strictly increasing")
        if abs(a[0] - 1.0) > 1e-12:
            raise ValueError("alpha grid must start at 1")
        if abs(v[0]) > 1e-8:
            raise ValueError(f"rate at alpha = 1 must vanish, got {v[0]!r}")
        v[0] = 0.0
        minorant = _convex_minorant(a, v)
        scale = max(np.abs(v).max(), 1.0)
        worst = float((v - minorant).max())
        if worst > 1e-6 * scale:
            raise ValueError(
                f"samples are not convex: deviation {worst:.3e} above gate"
            )
        v = minorant
        chord_last = (v[-1] - v[-2]) / (a[-1] - a[-2])
        exact = slope_at_infinity is not None
        if right_derivative_at_1 is None:
            right_derivative_at_1 = (v[1] - v[0]) / (a[1] - a[0])
        return cls(
            fn=lambda t: float(np.interp(t, a, v)),
            right_derivative_at_1=float(right_derivative_at_1),
            slope_at_infinity=float(slope_at_infinity) if exact else float(chord_last),
            t_hi=float(a[-1]),
            slope_is_exact=exact,
            grid=a,
            values=v,
            residuals=None if residuals is None else np.asarray(residuals, float),
        )


@dataclass
class PolarResult:
    value: float
    argmax_t: Optional[float]
    tail_dominated: bool


def polar_detail(f, a, xtol=1e-10, tail_slope_tol=1e-8):
    """Polar transform with diagnostics.

    ``tail_dominated`` means the objective was still climbing at ``t_hi``; the
    supremum then lives at infinity.  In that case the value is ``inf`` when
    ``a`` exceeds the slope of ``f`` at infinity and the boundary value (best
    available) otherwise.
    """
    if a <= f.right_derivative_at_1:
        return PolarResult(0.0, None, False)

    def g(t):
        return a * (t - 1.0) - f(t)

    t_hi = f.t_hi
    delta = min(1e-6, (t_hi - 1.0) * 1e-3)
    climbing = g(t_hi) - g(t_hi - delta) > tail_slope_tol * delta
    if climbing:
        if a > f.slope_at_infinity:
            return PolarResult(math.inf, None, True)
        return PolarResult(g(t_hi), t_hi, True)
    t_star, val = _golden_max(g, 1.0, t_hi, xtol=xtol)
    end = g(t_hi)
    if end > val:
        t_star, val = t_hi, end
    return PolarResult(max(val, 0.0), t_star, False)


def polar(f, a, xtol=1e-10):
    """``sup_{t > 1} { a (t - 1) - f(t) }``; exactly 0 below the derivative at 1."""
    return polar_detail(f, a, xtol=xtol).value


@dataclass
class HoeffdingResult:
    """Outcome of the anti-divergence case split at a given rate ``r``."""

    r: float
    value: float
    regime: str  # "zero" | "interior" | "linear_tail"
    a_r: Optional[float] = None
    attaining_t: Optional[float] = None
    tail_dominated: bool = False


def hoeffding_anti(f, r, xtol=1e-10):
    """Anti-divergence ``sup_{t > 1} (r (t - 1) - f(t)) / t`` with case split.

    Returns a :class:`HoeffdingResult`; ``value`` is zero iff ``r`` does not
    exceed the right derivative of ``f`` at 1 (within 1e-9).
    """
    a_min = f.right_derivative_at_1
    if r <= a_min + 1e-9:
        return HoeffdingResult(r=r, value=0.0, regime="zero")
    a_max = f.slope_at_infinity
    if math.isfinite(a_max):
        tail = polar_detail(f, a_max, xtol=xtol)
        if math.isfinite(tail.value):
            r_max = tail.value + a_max
            if r >= r_max - 1e-12:
                return HoeffdingResult(
                    r=r,
                    value=r - a_max,
                    regime="linear_tail",
                    a_r=a_max,
                    attaining_t=None,
                    tail_dominated=tail.tail_dominated,
                )
        # an infinite polar at a_max pushes r_max to infinity: always interior

    def h(a):
        return polar(f, a, xtol=xtol) + a - r

    lo = a_min
    if math.isfinite(a_max):
        hi = a_max
    else:
        hi = r + 1.0  # h(hi) >= hi - r = 1 since the polar is nonnegative
    # h is strictly increasing (polar slope >= 0 plus the +a term)
    if h(hi) <= 0.0:
        a_r = hi
    else:
        for _ in range(200):
            if hi - lo <= 1e-10:
                break
            mid = 0.5 * (lo + hi)
            if h(mid) > 0.0:
                hi = mid
            else:
                lo = mid
        a_r = 0.5 * (lo + hi)
    detail = polar_detail(f, a_r, xtol=xtol)
    return HoeffdingResult(
        r=r,
        value=r - a_r,
        regime="interior",
        a_r=a_r,
        attaining_t=detail.argmax_t,
        tail_dominated=detail.tail_dominated,
    )


def sc_lower_bound_curve(f, r, xtol=1e-10, tail_slope_tol=1e-8):
    """Direct evaluation of ``sup_{t > 1} (r (t - 1) - f(t)) / t``.

    Numerically identical to ``hoeffding_anti(f, r).value``; exposed
    separately so reports can cross-check the two routes.
    """

    def g(t):
        return (r * (t - 1.0) - f(t)) / t

    t_hi = f.t_hi
    delta = min(1e-6, (t_hi - 1.0) * 1e-3)
    if g(t_hi) - g(t_hi - delta) > tail_slope_tol * delta:
        if math.isfinite(f.slope_at_infinity):
            return max(r - f.slope_at_infinity, g(t_hi), 0.0)
        return max(g(t_hi), 0.0)
    _, val = _golden_max(g, 1.0, t_hi, xtol=xtol)
    return max(val, g(t_hi), 0.0)


def rate_from_samples(n_list, alphas, psi_matrix, scaling=1.0, slope_at_infinity=None):
    """Extrapolated rate curve from finite-size cumulant samples.

    Parameters
    ----------
    n_list : increasing sample sizes (at least three).
    alphas : order grid starting at 1.
    psi_matrix : array (len(n_list), len(alphas)) of raw ``psi_n(alpha)``.
    scaling : exponent ``s`` with ``psi_n ~ n^s``; extrapolation is first-order
        Richardson in ``1/n^s`` using the two largest sizes, and the reported
        per-alpha residual is the shift relative to the next-coarser pair.
    """
    n = np.asarray(n_list, dtype=float)
    a = np.asarray(alphas, dtype=float)
    m = np.asarray(psi_matrix, dtype=float)
    if n.size < 3:
        raise ValueError("need at least three sample sizes for extrapolation")
    if np.diff(n).min() <= 0:
        raise ValueError("sample sizes must be strictly increasing")
    if m.shape != (n.size, a.size):
        raise ValueError(f"psi matrix shape {m.shape} does not match grids")
    x = 1.0 / n**scaling
    y = m * x[:, None]

    def richardson(i, j):
        d = (y[i] - y[j]) / (x[i] - x[j])
        return y[i] - d * x[i]

    c_fine = richardson(-1, -2)
    c_coarse = richardson(-2, -3)
    residuals = np.abs(c_fine - c_coarse)
    return ConvexRate.from_samples(
        a, c_fine, residuals=residuals, slope_at_infinity=slope_at_infinity
    )
