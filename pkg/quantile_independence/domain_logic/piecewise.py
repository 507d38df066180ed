"""Exact algebra on nondecreasing piecewise-linear curves.

All functions accept scalars or numpy arrays for the evaluation point and return a result
of the same shape. Curves are never mutated.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from quantile_independence.exceptions import ArgumentError, OutOfRangeError
from quantile_independence.models.curve import KNOT_TOLERANCE, MonotoneCurve

if TYPE_CHECKING:
    from quantile_independence.types import ArrayLike, Continuity, FloatArray


def evaluate(curve: MonotoneCurve, x: ArrayLike, side: Continuity = "right") -> ArrayLike:
    """Evaluate ``curve`` at ``x``.

    Arguments
    ---------
    curve
        The curve to evaluate.
    x
        Point(s) inside the curve's domain (a ``1e-12`` slack is tolerated).
    side
        ``"right"`` returns the value at jumps (right-continuous convention),
        ``"left"`` returns the left limit instead.
    """
    points = _check_domain(curve, x)
    xs, ys = curve.xs, curve.ys
    last = len(xs) - 1
    if side == "right":
        lo = np.searchsorted(xs, points, side="right") - 1
        hi = np.minimum(lo + 1, last)
    else:
        hi = np.searchsorted(xs, points, side="left")
        lo = np.maximum(hi - 1, 0)
        # Exact hits on a knot take that knot, which is the left member of a jump pair.
        lo = np.where(xs[hi] == points, hi, lo)
    values = _interpolate(xs, ys, lo, hi, points)
    return _like(x, values)


def left_inverse(curve: MonotoneCurve, q: ArrayLike) -> ArrayLike:
    """Return ``inf{x : curve(x) >= q}``.

    On a flat stretch at level ``q`` the left endpoint of the flat is returned; at a
    jump over ``q`` the jump location is returned.

    Raises
    ------
    OutOfRangeError
        For cdfs when ``q`` is outside ``(0, 1)``; for other curves when ``q`` is outside
        ``[y_first, y_last]``.
    """
    levels = np.asarray(q, dtype=np.float64)
    if curve.is_cdf:
        if np.any(levels <= 0.0) or np.any(levels >= 1.0):
            raise OutOfRangeError("Quantile level must lie in (0, 1)", q=q)
    elif np.any(levels < curve.y_first - KNOT_TOLERANCE) or np.any(
        levels > curve.y_last + KNOT_TOLERANCE
    ):
        raise OutOfRangeError(
            "Level outside the curve's range", q=q, range=(curve.y_first, curve.y_last)
        )
    levels = np.clip(levels, curve.y_first, curve.y_last)

    xs, ys = curve.xs, curve.ys
    k = np.searchsorted(ys, levels, side="left")
    prev = np.maximum(k - 1, 0)
    rise = ys[k] - ys[prev]
    run = xs[k] - xs[prev]
    safe_rise = np.where(rise > 0.0, rise, 1.0)
    inside = xs[prev] + (levels - ys[prev]) / safe_rise * run
    result = np.where((k == 0) | (run == 0.0), xs[k], inside)
    return _like(q, result)


def cumulative(curve: MonotoneCurve, x: ArrayLike) -> ArrayLike:
    """Return the definite integral of ``curve`` from the left end of its domain to ``x``."""
    points = _check_domain(curve, x)
    xs, ys = curve.xs, curve.ys
    areas = np.diff(xs) * (ys[:-1] + ys[1:]) / 2.0
    totals = np.concatenate(([0.0], np.cumsum(areas)))
    j = np.minimum(np.searchsorted(xs, points, side="right") - 1, len(xs) - 2)
    value_at = _interpolate(xs, ys, j, j + 1, points)
    values = totals[j] + (points - xs[j]) * (ys[j] + value_at) / 2.0
    return _like(x, values)


def integrate(curve: MonotoneCurve, lo: float, hi: float) -> float:
    """Integrate ``curve`` over ``[lo, hi]`` exactly (trapezoids are exact on linear pieces)."""
    if lo > hi:
        raise ArgumentError("Integration bounds are reversed", lo=lo, hi=hi)
    return float(cumulative(curve, hi) - cumulative(curve, lo))


def convex_combine(f: MonotoneCurve, g: MonotoneCurve, eps: float) -> MonotoneCurve:
    """Return the pointwise mixture ``eps * f + (1 - eps) * g`` on the union of knots."""
    if not 0.0 <= eps <= 1.0:
        raise OutOfRangeError("Mixture weight must lie in [0, 1]", eps=eps)
    if not np.allclose(f.domain, g.domain, rtol=0.0, atol=KNOT_TOLERANCE):
        raise ArgumentError("Curves must share a domain", f=f.domain, g=g.domain)

    grid = np.unique(np.concatenate((f.xs, g.xs)))
    grid[0], grid[-1] = f.domain
    left = eps * evaluate(f, grid, side="left") + (1.0 - eps) * evaluate(g, grid, side="left")
    right = eps * evaluate(f, grid) + (1.0 - eps) * evaluate(g, grid)
    return _from_limits(grid, left, right, is_cdf=f.is_cdf and g.is_cdf)


def compose(outer: MonotoneCurve, inner: MonotoneCurve, is_cdf: bool = False) -> MonotoneCurve:
    """Return ``outer(inner(x))`` on the domain of ``inner``.

    ``outer`` must be continuous; ``inner`` may jump. The range of ``inner`` must lie in the
    domain of ``outer``.
    """
    if np.any(np.diff(outer.xs) == 0.0):
        raise ArgumentError("The outer curve of a composition must be continuous")
    xs: list[float] = []
    vs: list[float] = []
    for x0, y0, x1, y1 in zip(inner.xs[:-1], inner.ys[:-1], inner.xs[1:], inner.ys[1:]):
        xs.append(x0)
        vs.append(y0)
        if x1 > x0 and y1 > y0:
            crossed = outer.xs[(outer.xs > y0) & (outer.xs < y1)]
            xs.extend(x0 + (crossed - y0) / (y1 - y0) * (x1 - x0))
            vs.extend(crossed)
    xs.append(inner.xs[-1])
    vs.append(inner.ys[-1])
    return MonotoneCurve(
        xs=np.array(xs), ys=evaluate(outer, np.array(vs, dtype=np.float64)), is_cdf=is_cdf
    )


def invert(curve: MonotoneCurve, is_cdf: bool = False) -> MonotoneCurve:
    """Reflect ``curve`` about the diagonal.

    Flats become jumps and jumps become flats. Evaluating the result with ``side="left"``
    reproduces :func:`left_inverse`; for strictly increasing continuous curves both sides
    agree.
    """
    return MonotoneCurve(xs=curve.ys.copy(), ys=curve.xs.copy(), is_cdf=is_cdf)


def max_abs_difference(f: MonotoneCurve, g: MonotoneCurve, points: FloatArray) -> float:
    """Largest ``|f - g|`` over ``points``, checking both one-sided limits."""
    right = np.abs(evaluate(f, points) - evaluate(g, points))
    left = np.abs(evaluate(f, points, side="left") - evaluate(g, points, side="left"))
    return float(max(right.max(initial=0.0), left.max(initial=0.0)))


def _from_limits(
    grid: FloatArray, left: FloatArray, right: FloatArray, is_cdf: bool
) -> MonotoneCurve:
    xs: list[float] = []
    ys: list[float] = []
    for x, lv, rv in zip(grid.tolist(), left.tolist(), right.tolist()):
        if rv - lv > KNOT_TOLERANCE:
            xs.extend((x, x))
            ys.extend((lv, rv))
        else:
            xs.append(x)
            ys.append(rv)
    return MonotoneCurve(xs=np.array(xs), ys=np.array(ys), is_cdf=is_cdf)


def _check_domain(curve: MonotoneCurve, x: ArrayLike) -> FloatArray:
    points = np.asarray(x, dtype=np.float64)
    lo, hi = curve.domain
    if np.any(points < lo - KNOT_TOLERANCE) or np.any(points > hi + KNOT_TOLERANCE):
        raise OutOfRangeError("Point outside the curve's domain", x=x, domain=(lo, hi))
    return np.clip(points, lo, hi)


def _interpolate(
    xs: FloatArray, ys: FloatArray, lo: FloatArray, hi: FloatArray, points: FloatArray
) -> FloatArray:
    run = xs[hi] - xs[lo]
    safe_run = np.where(run > 0.0, run, 1.0)
    weight = np.where(run > 0.0, (points - xs[lo]) / safe_run, 0.0)
    return ys[lo] + weight * (ys[hi] - ys[lo])


def _like(template: ArrayLike, values: FloatArray) -> ArrayLike:
    if np.ndim(template) == 0:
        return float(values)
    return values
