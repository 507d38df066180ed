"""Constructors of latent propensity scores ``p(u) = P(X = 1 | U = u)`` on a uniform grid.

``U`` is normalized to be uniform on ``[0, 1]``, so the grid lives on ranks.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy.special import ndtr, ndtri

from quantile_independence.domain_logic import grid
from quantile_independence.domain_logic.bounds import cdf_bounds
from quantile_independence.domain_logic.piecewise import evaluate
from quantile_independence.exceptions import (
    ArgumentError,
    ConsistencyError,
    ConstructionError,
    EvaluationError,
    OutOfRangeError,
)
from quantile_independence.models.curve import MonotoneCurve
from quantile_independence.models.propensity import GridPropensity
from quantile_independence.models.spec import IndependenceKind

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from quantile_independence.models.spec import IndependenceSpec
    from quantile_independence.types import Arm, FloatArray, Side

logger = logging.getLogger(__name__)

MARGINAL_TOLERANCE = 1e-9


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise OutOfRangeError(f"{name} must lie in [0, 1]", **{name: value})


def _check_cells(n: int) -> None:
    if n < 1:
        raise OutOfRangeError("The grid needs at least one cell", n=n)


def constant(p1: float, n: int) -> GridPropensity:
    """Full independence: the same treatment probability at every rank."""
    _check_probability("p1", p1)
    _check_cells(n)
    return GridPropensity(values=np.full(n, float(p1)))


def eighths() -> tuple[float, ...]:
    """The seven evenly spaced quantiles ``k / 8`` used to illustrate oscillation."""
    return tuple(k / 8 for k in range(1, 8))


def sawtooth(p1: float, taus: Sequence[float], amplitude: float, n: int) -> GridPropensity:
    """One symmetric tent per segment between consecutive points of ``taus`` and ``{0, 1}``.

    Each tent runs from ``p1 - amplitude`` at the segment ends to ``p1 + amplitude`` in
    the middle and is shifted so that its grid average is exactly ``p1``; the result
    passes the T-independence check for ``T = taus``.

    Raises
    ------
    ConstructionError
        When the amplitude pushes a value outside ``[0, 1]`` or a segment has no cells.
    """
    _check_probability("p1", p1)
    _check_cells(n)
    points = sorted(taus)
    if any(not 0.0 < t < 1.0 for t in points):
        raise OutOfRangeError("Quantile points must lie in (0, 1)", taus=points)
    edges = grid.snap([0.0, *points, 1.0], n)

    values = np.empty(n)
    for start, stop in zip(edges[:-1], edges[1:]):
        width = stop - start
        if width <= 0:
            raise ConstructionError("A sawtooth segment is narrower than one cell", n=n)
        local = (np.arange(width) + 0.5) / width
        tent = 1.0 - 4.0 * np.abs(local - 0.5)
        values[start:stop] = p1 + amplitude * (tent - tent.mean())

    if values.min() < -1e-12 or values.max() > 1.0 + 1e-12:
        raise ConstructionError(
            "Sawtooth amplitude leaves [0, 1]", p1=p1, amplitude=amplitude
        )
    return GridPropensity(values=values)


def extreme_attainer(p1: float, a: float, b: float, n: int) -> GridPropensity:
    """Treat everyone at ranks ``[a, a + p1 (b - a))``, no one up to ``b``, ``p1`` elsewhere.

    The average over ``[a, b]`` is ``p1`` while the level sets ``{p = 0}`` and ``{p = 1}``
    have positive measure.
    """
    _check_probability("p1", p1)
    _check_cells(n)
    if not 0.0 < a < b < 1.0:
        raise ArgumentError("Need 0 < a < b < 1", a=a, b=b)
    start, middle, stop = grid.snap([a, a + p1 * (b - a), b], n)
    values = np.full(n, float(p1))
    values[start:middle] = 1.0
    values[middle:stop] = 0.0
    return GridPropensity(values=values)


def roy_propensity(mu: Callable[[FloatArray], FloatArray | float], n: int) -> GridPropensity:
    """Selection on gains: ``p(u) = Phi(mu(Phi^{-1}(u)))`` at each cell midpoint.

    ``mu`` receives the vector of untreated outcomes ``Phi^{-1}(u_i)`` and returns the
    expected gain from treatment at each.

    Raises
    ------
    EvaluationError
        When ``mu`` returns a non-finite value.
    """
    _check_cells(n)
    y0 = ndtri(grid.midpoints(n))
    gains = np.broadcast_to(np.asarray(mu(y0), dtype=np.float64), y0.shape)
    if not np.all(np.isfinite(gains)):
        n_bad = int((~np.isfinite(gains)).sum())
        raise EvaluationError("Expected gain is not finite", n_bad=n_bad)
    return GridPropensity(values=ndtr(gains))


def bound_attainer(
    spec: IndependenceSpec, p_x: float, side: Side, n: int, arm: Arm = 1
) -> GridPropensity:
    """Return the propensity whose conditional cdf of ``U`` given ``X = arm`` is a bound.

    The treatment probability of arm ``arm`` on cell ``i`` is ``p_x`` times ``N`` times the
    increment of the ``side`` cdf bound over the cell. The result is expressed as
    ``P(X = 1 | U)``; an upper bound for arm 1 and a lower bound for arm 0 (with
    ``p_x = 1 - p1``) give the same propensity.

    Raises
    ------
    ArgumentError
        When ``spec`` is not a T- or U-interval inside ``(0, 1)``.
    """
    if spec.kind not in (IndependenceKind.T_SET, IndependenceKind.U_SET):
        raise ArgumentError("Attainers exist for T- and U-sets only", spec=spec.label)
    a, b = spec.endpoints()
    if not 0.0 < a <= b < 1.0:
        raise ArgumentError("Need 0 < a <= b < 1", a=a, b=b)
    if side not in ("lower", "upper"):
        raise ArgumentError("side must be 'lower' or 'upper'", side=side)
    _check_cells(n)

    pair = cdf_bounds(spec, p_x)
    envelope = pair.upper if side == "upper" else pair.lower
    increments = np.diff(evaluate(envelope, grid.boundaries(n)))
    own = np.clip(p_x * n * increments, 0.0, 1.0)
    return GridPropensity(values=own if arm == 1 else 1.0 - own)


def cdf_from_propensity(p: GridPropensity, p_x: float, arm: Arm) -> MonotoneCurve:
    """``F_{U|X}(u | arm)`` by exact cell summation of ``P(X = arm | U)``.

    Raises
    ------
    ConsistencyError
        When the propensity does not average to ``p_x`` within ``1e-9``.
    """
    weights = p.values if arm == 1 else 1.0 - p.values
    mean = float(weights.mean())
    if not p_x > 0.0 or abs(mean - p_x) > MARGINAL_TOLERANCE:
        raise ConsistencyError(
            "Propensity does not average to the arm probability", arm=arm, p_x=p_x, mean=mean
        )
    levels = grid.prefix_sums(weights) / (p.n_cells * p_x)
    levels[-1] = 1.0
    return MonotoneCurve(xs=grid.boundaries(p.n_cells), ys=np.minimum(levels, 1.0), is_cdf=True)
