"""Brute-force certification of the closed-form bounds.

Every assumption handled here turns into block-sum constraints on a grid propensity, so
extremal conditional cdfs are linear programs. A structured greedy solver packs each
block's treated mass as early or as late as possible; a dense simplex solver from scipy
solves the same programs independently.
"""

from __future__ import annotations

import logging
import time
from typing import TYPE_CHECKING

import numpy as np
from scipy.optimize import linprog

from quantile_independence.domain_logic import grid, piecewise
from quantile_independence.domain_logic.bounds import cdf_bounds
from quantile_independence.exceptions import (
    ArgumentError,
    ConsistencyError,
    InfeasibleProgramError,
    OutOfRangeError,
)
from quantile_independence.models.program import ConstraintBlock, FeasibleProgram
from quantile_independence.models.propensity import GridPropensity
from quantile_independence.models.results import VerificationReport
from quantile_independence.models.spec import IndependenceKind

if TYPE_CHECKING:
    from quantile_independence.models.observed import ObservedJoint
    from quantile_independence.models.spec import IndependenceSpec
    from quantile_independence.types import Direction, FloatArray

logger = logging.getLogger(__name__)

MIN_CELLS = 100
SOLVER_AGREEMENT = 1e-9


def build_program(
    spec: IndependenceSpec,
    p_x: float,
    n_cells: int,
    objective_cell: int = 0,
    direction: Direction = "max",
) -> FeasibleProgram:
    """Translate an assumption into a partition of the grid into block-sum constraints.

    Raises
    ------
    ArgumentError
        For mean independence, which is not a block-sum constraint.
    """
    if not 0.0 < p_x < 1.0:
        raise OutOfRangeError("Arm probability must lie in (0, 1)", p_x=p_x)
    cells = np.arange(n_cells)

    def block(members: np.ndarray) -> ConstraintBlock:
        return ConstraintBlock(members, len(members) * p_x)

    if spec.kind == IndependenceKind.NONE or spec.is_vacuous:
        blocks = [block(cells)]
    elif spec.kind == IndependenceKind.FULL:
        blocks = [block(cells[i : i + 1]) for i in range(n_cells)]
    elif spec.kind == IndependenceKind.T_SET and spec.interval is None:
        edges = np.unique(grid.snap_interior([0.0, *spec.points, 1.0], n_cells))
        blocks = [block(cells[lo:hi]) for lo, hi in zip(edges[:-1], edges[1:])]
    elif spec.kind == IndependenceKind.T_SET:
        start, stop = grid.snap_interior(spec.interval, n_cells)
        blocks = [block(cells[i : i + 1]) for i in range(start, stop)]
        blocks.extend(block(part) for part in (cells[:start], cells[stop:]) if len(part))
    elif spec.kind == IndependenceKind.U_SET:
        start, stop = grid.snap(spec.interval, n_cells)
        blocks = [block(cells[i : i + 1]) for i in range(start, stop)]
        rest = np.concatenate((cells[:start], cells[stop:]))
        if len(rest):
            blocks.append(block(rest))
    else:
        raise ArgumentError("No block-sum program for this assumption", spec=spec.label)
    return FeasibleProgram(n_cells, p_x, tuple(blocks), objective_cell, direction)


def _packing(program: FeasibleProgram, early: bool) -> FloatArray:
    """Fill each block with its mass in its earliest (or latest) cells."""
    q = np.empty(program.n_cells)
    for block in program.blocks:
        fill = np.clip(block.total - np.arange(block.size), 0.0, 1.0)
        q[block.cells] = fill if early else fill[::-1]
    return q


def _as_propensity(program: FeasibleProgram, q: FloatArray) -> GridPropensity:
    return GridPropensity(values=q if program.arm == 1 else 1.0 - q)


def extremal_cdfs(program: FeasibleProgram) -> tuple[FloatArray, FloatArray]:
    """Pointwise minimum and maximum of ``F_{U|X}(k / N | arm)`` for every boundary ``k``.

    Front-loading every block maximizes all prefix sums at once and back-loading
    minimizes them, so one packing per direction serves the whole grid.
    """
    scale = program.n_cells * program.p_x
    lower = grid.prefix_sums(_packing(program, early=False)) / scale
    upper = grid.prefix_sums(_packing(program, early=True)) / scale
    return lower, upper


def solve_extremal_cdf(program: FeasibleProgram) -> tuple[float, GridPropensity]:
    """Greedy optimum of the program and a propensity attaining it."""
    q = _packing(program, early=program.direction == "max")
    value = float(q[: program.objective_cell].sum() / (program.n_cells * program.p_x))
    return value, _as_propensity(program, q)


def solve_extremal_cdf_simplex(program: FeasibleProgram) -> float:
    """Optimum of the program by dense dual simplex after eliminating single-cell blocks.

    Raises
    ------
    InfeasibleProgramError
        When the solver does not report an optimum.
    """
    k = program.objective_cell
    fixed = 0.0
    free: list[ConstraintBlock] = []
    for block in program.blocks:
        if block.size == 1:
            fixed += block.total if block.cells[0] < k else 0.0
        else:
            free.append(block)
    if not free:
        return fixed / (program.n_cells * program.p_x)

    variables = np.concatenate([block.cells for block in free])
    a_eq = np.zeros((len(free), len(variables)))
    offset = 0
    for row, block in enumerate(free):
        a_eq[row, offset : offset + block.size] = 1.0
        offset += block.size
    sign = -1.0 if program.direction == "max" else 1.0
    objective = np.where(variables < k, sign, 0.0)

    result = linprog(
        objective,
        A_eq=a_eq,
        b_eq=[block.total for block in free],
        bounds=(0.0, 1.0),
        method="highs-ds",
    )
    if result.status != 0:
        raise InfeasibleProgramError(
            "Simplex solver failed", status=result.status, message=result.message
        )
    return (fixed + sign * result.fun) / (program.n_cells * program.p_x)


def verify_bounds(
    spec: IndependenceSpec, p_x: float, n_cells: int, simplex_stride: int = 10
) -> VerificationReport:
    """Compare the oracle envelope with the closed-form cdf bounds at every grid boundary.

    The simplex path re-solves every ``simplex_stride``-th boundary in both directions.

    Raises
    ------
    OutOfRangeError
        When ``n_cells`` is below 100.
    """
    if n_cells < MIN_CELLS:
        raise OutOfRangeError(f"Verification needs at least {MIN_CELLS} cells", n_cells=n_cells)
    if simplex_stride < 1:
        raise ArgumentError("simplex_stride must be positive", simplex_stride=simplex_stride)
    started = time.perf_counter()
    program = build_program(spec, p_x, n_cells)
    oracle_lower, oracle_upper = extremal_cdfs(program)

    pair = cdf_bounds(spec, p_x)
    points = grid.boundaries(n_cells)
    gaps = np.maximum(
        np.abs(oracle_lower - piecewise.evaluate(pair.lower, points)),
        np.abs(oracle_upper - piecewise.evaluate(pair.upper, points)),
    )
    worst = int(np.argmax(gaps))

    solver_gap = 0.0
    checks = 0
    for k in range(0, n_cells + 1, simplex_stride):
        for direction, greedy in (("min", oracle_lower[k]), ("max", oracle_upper[k])):
            simplex = solve_extremal_cdf_simplex(program.with_objective(k, direction))
            solver_gap = max(solver_gap, abs(simplex - greedy))
            checks += 1
    if solver_gap > SOLVER_AGREEMENT:
        logger.warning("Greedy and simplex solvers disagree by %g on %s", solver_gap, spec.label)

    report = VerificationReport(
        spec=spec,
        p_x=p_x,
        n_cells=n_cells,
        max_discrepancy=float(gaps[worst]),
        worst_u=float(points[worst]),
        passed=bool(gaps[worst] <= 3.0 / n_cells),
        solver_gap=float(solver_gap),
        simplex_checks=checks,
    )
    logger.debug(
        "Verified %s at p_x=%g, N=%d in %.2fs: %s",
        spec.label,
        p_x,
        n_cells,
        time.perf_counter() - started,
        report,
    )
    return report


def expected_y0_given_x1(p: GridPropensity, obs: ObservedJoint) -> float:
    """``E(Y0 | X = 1)`` implied by a propensity on the rank grid of ``Y0``.

    Walking up the ranks, the untreated share ``s`` advances with ``1 - p`` and the treated
    share with ``p``; treated cells inherit the untreated quantiles ``Q_{Y|X}(s | 0)``
    their ranks map to.

    Raises
    ------
    ConsistencyError
        When ``p`` does not average to ``obs.p1``.
    """
    if abs(p.implied_p1 - obs.p1) > 1e-9:
        raise ConsistencyError("Propensity does not average to p1", p1=obs.p1, mean=p.implied_p1)
    n = p.n_cells
    q = p.values
    q0 = obs.q_y_given_x0
    s = np.clip(grid.prefix_sums(1.0 - q) / (n * obs.p0), 0.0, 1.0)
    area = np.diff(piecewise.cumulative(q0, s))
    step = np.diff(s)
    at_start = piecewise.evaluate(q0, s[:-1])
    moving = step > 1e-12
    average = np.where(moving, area / np.where(moving, step, 1.0), at_start)
    return float(np.sum(q * average) / (n * obs.p1))


def extremal_mean(
    spec: IndependenceSpec, obs: ObservedJoint, direction: Direction, n_cells: int
) -> float:
    """Oracle extremum of ``E(Y0 | X = 1)`` over feasible grid propensities.

    The maximum puts treated mass at the highest ranks each block allows and the minimum
    at the lowest, which is pointwise extremal for the treated rank distribution.
    Unbounded supports give an infinite value.
    """
    if direction not in ("min", "max"):
        raise ArgumentError("direction must be 'min' or 'max'", direction=direction)
    low, high = obs.support_x0
    if not (np.isfinite(low) and np.isfinite(high)):
        logger.warning("Oracle mean under %s is unbounded", spec.label)
        return float("inf") if direction == "max" else float("-inf")
    program = build_program(spec, obs.p1, n_cells)
    q = _packing(program, early=direction == "min")
    return expected_y0_given_x1(_as_propensity(program, q), obs)
