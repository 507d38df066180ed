"""Checks of independence relaxations against latent propensity scores.

A propensity on ``N`` cells satisfies T-independence when its average over every interval
with endpoints in ``T`` and ``{0, 1}`` equals its overall mean; U-independence when it is
flat on ``U``; mean independence when it is uncorrelated with the rank.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from quantile_independence.domain_logic import grid
from quantile_independence.exceptions import ArgumentError, ConsistencyError, OutOfRangeError
from quantile_independence.models.results import (
    AverageWitness,
    CellWitness,
    MomentWitness,
    MonotonicityReport,
    StochasticMonotonicity,
    StochasticMonotonicityVerdict,
    Verdict,
)
from quantile_independence.models.spec import IndependenceKind

if TYPE_CHECKING:
    from collections.abc import Sequence

    from quantile_independence.models.propensity import GridPropensity
    from quantile_independence.models.spec import IndependenceSpec
    from quantile_independence.types import FloatArray

logger = logging.getLogger(__name__)

ZERO_DIFFERENCE = 1e-12


def _constraint_boundaries(spec: IndependenceSpec, n_cells: int) -> np.ndarray:
    """Grid boundary indices of ``T`` together with 0 and 1.

    For an interval every boundary inside it is included, which covers every pair of
    endpoints in the interval at grid resolution.
    """
    if spec.kind != IndependenceKind.T_SET:
        raise ArgumentError(
            "Expected a T-set; full independence is a different kind", spec=spec.label
        )
    if spec.interval is not None:
        start, stop = grid.snap_interior(spec.interval, n_cells)
        inside = np.arange(start, stop + 1)
    else:
        inside = grid.snap_interior(spec.points, n_cells)
    return np.unique(np.concatenate(([0, n_cells], inside)))


def _worst_average(
    values: FloatArray, expected: float, boundaries: np.ndarray, tolerance: float
) -> AverageWitness | None:
    prefix = grid.prefix_sums(values)
    i, j = np.triu_indices(len(boundaries), k=1)
    lo, hi = boundaries[i], boundaries[j]
    averages = grid.interval_average(prefix, lo, hi)
    deviation = np.abs(averages - expected)
    worst = int(np.argmax(deviation))
    if deviation[worst] <= tolerance:
        return None
    n = len(values)
    return AverageWitness(
        t1=float(lo[worst] / n),
        t2=float(hi[worst] / n),
        average=float(averages[worst]),
        expected=float(expected),
    )


def check_t_independence(p: GridPropensity, spec: IndependenceSpec) -> Verdict:
    """Average-value check of T-independence.

    Fails with the interval whose average deviates most from the overall mean.
    """
    boundaries = _constraint_boundaries(spec, p.n_cells)
    witness = _worst_average(
        p.values, p.implied_p1, boundaries, spec.grid_tolerance(p.n_cells)
    )
    return Verdict(passed=witness is None, witness=witness)


def check_u_independence(p: GridPropensity, spec: IndependenceSpec) -> Verdict:
    """Flatness check of U-independence on the cells of ``U``."""
    if spec.kind != IndependenceKind.U_SET:
        raise ArgumentError("Expected a U-set", spec=spec.label)
    if spec.is_vacuous:
        logger.warning("U-set %s has probability zero; the assumption is vacuous", spec.label)
        return Verdict(passed=True, note="vacuous")
    start, stop = grid.snap(spec.interval, p.n_cells)
    if stop <= start:
        logger.warning("U-set %s covers no grid cell at N=%d", spec.label, p.n_cells)
        return Verdict(passed=True, note="vacuous")

    expected = p.implied_p1
    deviation = np.abs(p.values[start:stop] - expected)
    worst = int(np.argmax(deviation))
    if deviation[worst] <= spec.grid_tolerance(p.n_cells):
        return Verdict(passed=True)
    cell = start + worst
    return Verdict(
        passed=False,
        witness=CellWitness(
            u=float(p.midpoints[cell]), value=float(p.values[cell]), expected=expected
        ),
    )


def check_mean_independence(p: GridPropensity, tolerance: float | None = None) -> Verdict:
    """Mean independence of ``U`` and ``X`` holds iff ``cov(U, p(U)) = 0``.

    The covariance is always reported in the witness.
    """
    tolerance = tolerance if tolerance is not None else 2.0 / p.n_cells
    covariance = float(np.mean(p.midpoints * p.values) - 0.5 * p.implied_p1)
    return Verdict(
        passed=abs(covariance) <= tolerance,
        witness=MomentWitness("covariance", covariance, 0.0, tolerance),
    )


def check_weighted_mean_constraint(
    p: GridPropensity, p1: float, tolerance: float | None = None
) -> Verdict:
    """Check ``integral of 2 u p(u) du == p1``.

    The integral equals ``2 cov(U, p(U)) + p1``, so the check is run at twice the
    covariance tolerance and agrees with :func:`check_mean_independence`.

    Raises
    ------
    ConsistencyError
        When ``p`` does not average to ``p1``.
    """
    if abs(p.implied_p1 - p1) > 1e-9:
        raise ConsistencyError(
            "Propensity does not average to p1", p1=p1, mean=p.implied_p1
        )
    tolerance = 2.0 * (tolerance if tolerance is not None else 2.0 / p.n_cells)
    moment = float(2.0 * np.mean(p.midpoints * p.values))
    return Verdict(
        passed=abs(moment - p1) <= tolerance,
        witness=MomentWitness("weighted_mean", moment, p1, tolerance),
    )


def monotonicity_report(p: GridPropensity) -> MonotonicityReport:
    """Count direction changes of the step function, ignoring flat stretches."""
    steps = np.diff(p.values)
    moving = np.flatnonzero(np.abs(steps) > ZERO_DIFFERENCE)
    signs = np.sign(steps[moving])
    turns = moving[1:][signs[1:] != signs[:-1]]

    midpoints = p.midpoints
    # A turn at step k means the extremum is reached at cell k.
    cuts = [0, *turns.tolist(), p.n_cells - 1]
    partition = tuple(
        (float(midpoints[start]), float(midpoints[stop])) for start, stop in zip(cuts, cuts[1:])
    )
    return MonotonicityReport(
        is_monotone=len(turns) == 0, direction_changes=len(turns), partition=partition
    )


def _survival_matrix(cond_survival: Sequence[Sequence[float]] | FloatArray) -> FloatArray:
    try:
        matrix = np.array(cond_survival, dtype=np.float64)
    except ValueError as e:
        raise ArgumentError("Conditional survival matrix is ragged") from e
    if matrix.ndim == 1:
        matrix = matrix[:, np.newaxis]
    if matrix.ndim != 2 or matrix.size == 0:
        raise ArgumentError("Conditional survival must be a non-empty matrix", shape=matrix.shape)
    if np.any(matrix < 0.0) or np.any(matrix > 1.0):
        raise OutOfRangeError("Survival probabilities must lie in [0, 1]")
    return matrix


def check_stochastic_monotonicity(
    cond_survival: Sequence[Sequence[float]] | FloatArray, tolerance: float = 1e-12
) -> StochasticMonotonicityVerdict:
    """Classify ``P(X > x_j | U = u_i)`` as regression dependent up, down or neither.

    Rows index the rank grid and columns the treatment levels. A law where every column
    is constant is both; it is reported as increasing with ``degenerate`` set.
    """
    steps = np.diff(_survival_matrix(cond_survival), axis=0)
    increasing = bool(np.all(steps >= -tolerance))
    decreasing = bool(np.all(steps <= tolerance))
    if increasing:
        return StochasticMonotonicityVerdict(
            StochasticMonotonicity.MONOTONE_INCREASING, degenerate=decreasing
        )
    if decreasing:
        return StochasticMonotonicityVerdict(StochasticMonotonicity.MONOTONE_DECREASING)
    return StochasticMonotonicityVerdict(StochasticMonotonicity.NON_MONOTONE)


def check_t_independence_general(
    cond_survival: Sequence[Sequence[float]] | FloatArray,
    spec: IndependenceSpec,
    marginal_survival: Sequence[float] | FloatArray,
) -> Verdict:
    """Average-value check of T-independence for a multi-valued treatment.

    Each column ``j`` of ``cond_survival`` must average to ``marginal_survival[j]`` over
    every interval with endpoints in ``T`` and ``{0, 1}``.
    """
    matrix = _survival_matrix(cond_survival)
    marginal = np.atleast_1d(np.asarray(marginal_survival, dtype=np.float64))
    if marginal.shape != (matrix.shape[1],):
        raise ArgumentError(
            "Marginal survival does not match the number of columns",
            n_columns=matrix.shape[1],
            n_marginal=marginal.size,
        )
    n_cells = matrix.shape[0]
    boundaries = _constraint_boundaries(spec, n_cells)
    tolerance = spec.grid_tolerance(n_cells)
    for column, expected in enumerate(marginal):
        witness = _worst_average(matrix[:, column], float(expected), boundaries, tolerance)
        if witness is not None:
            return Verdict(
                passed=False,
                witness=AverageWitness(
                    witness.t1, witness.t2, witness.average, witness.expected, column=column
                ),
            )
    return Verdict(passed=True)
