from __future__ import annotations

from dataclasses import asdict, dataclass
from enum import Enum
from typing import TYPE_CHECKING, Any, Union

from quantile_independence.domain_logic import piecewise
from quantile_independence.models.spec import IndependenceKind

if TYPE_CHECKING:
    from quantile_independence.models.curve import MonotoneCurve
    from quantile_independence.models.spec import IndependenceSpec


class BoundTarget(str, Enum):  # noqa: D101
    CDF_U_GIVEN_X = "cdf_u_given_x"
    QUANTILE_Y0_GIVEN_X1 = "quantile_y0_given_x1"


@dataclass(frozen=True)
class BoundPair:
    """Lower and upper envelopes of a conditional cdf or quantile function.

    Attributes
    ----------
    lower, upper
        Pointwise envelopes, ``lower <= upper``.
    target
        What the envelopes bound.
    spec
        The assumption they were derived under. Cdf pairs record it in rank units
        ``F_U(u)``, so it stays inside ``[0, 1]`` for any marginal.
    p_x
        Probability of the conditioning arm. Cdf pairs built for ``epsilon_mixture``
        are arm-1 pairs, so ``p_x`` is ``P(X = 1)``.
    f_u
        Marginal cdf of ``U`` (cdf pairs only).
    """

    lower: MonotoneCurve
    upper: MonotoneCurve
    target: BoundTarget
    spec: IndependenceSpec
    p_x: float
    f_u: MonotoneCurve | None = None

    def at(self, point: float) -> tuple[float, float]:
        """Return ``(lower, upper)`` at ``point``.

        Quantile envelopes are left-continuous in ``tau`` and are read as left limits.
        Under T-independence, quantiles inside ``[a, b]`` are point identified, so both
        values are pinned to the conditional quantile of the untreated arm.
        """
        if self.target == BoundTarget.CDF_U_GIVEN_X:
            return float(piecewise.evaluate(self.lower, point)), float(
                piecewise.evaluate(self.upper, point)
            )
        lower = float(piecewise.evaluate(self.lower, point, side="left"))
        upper = float(piecewise.evaluate(self.upper, point, side="left"))
        if self.spec.kind == IndependenceKind.T_SET:
            a, b = self.spec.endpoints()
            if a <= point <= b:
                return upper, upper
        return lower, upper


@dataclass(frozen=True)
class IdentifiedSet:
    """A closed interval ``[lo, hi]`` of parameter values consistent with the data.

    Only the interior is known to be sharp; whether the endpoints are attained is left
    open, which ``interior_sharp`` records. ``unbounded`` marks an infinite endpoint
    coming from an unbounded outcome support.
    """

    param: str
    lo: float
    hi: float
    spec: IndependenceSpec
    interior_sharp: bool = True
    unbounded: bool = False

    @property
    def width(self) -> float:  # noqa: D102
        return self.hi - self.lo

    def contains(self, other: IdentifiedSet, tol: float = 0.0) -> bool:  # noqa: D102
        return self.lo - tol <= other.lo and other.hi <= self.hi + tol

    def to_dict(self) -> dict[str, Any]:  # noqa: D102
        return {
            "param": self.param,
            "lo": self.lo,
            "hi": self.hi,
            "interior_sharp": self.interior_sharp,
            "spec": self.spec.label,
        }


@dataclass(frozen=True)
class AverageWitness:
    """An interval ``[t1, t2]`` over which the propensity does not average to ``expected``.

    ``column`` indexes the treatment level for multi-valued treatments.
    """

    t1: float
    t2: float
    average: float
    expected: float
    column: int | None = None


@dataclass(frozen=True)
class CellWitness:
    """A grid cell inside a U-set where the propensity is not flat."""

    u: float
    value: float
    expected: float


@dataclass(frozen=True)
class MomentWitness:
    """A moment condition that failed: ``statistic`` evaluated to ``value``."""

    statistic: str
    value: float
    expected: float
    tolerance: float


Witness = Union[AverageWitness, CellWitness, MomentWitness]


@dataclass(frozen=True)
class Verdict:
    """Outcome of an independence check. Truthy when the check passed."""

    passed: bool
    witness: Witness | None = None
    note: str | None = None

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict[str, Any]:  # noqa: D102
        return {
            "pass": self.passed,
            "witness": asdict(self.witness) if self.witness is not None else None,
            "note": self.note,
        }


@dataclass(frozen=True)
class MonotonicityReport:
    """Direction changes of a step-function propensity.

    Attributes
    ----------
    is_monotone
        All nonzero first differences share a sign.
    direction_changes
        Sign changes among the nonzero first differences.
    partition
        Maximal monotone pieces ``(u_start, u_end)`` in cell-midpoint coordinates; the
        boundaries between pieces are the turning points.
    """

    is_monotone: bool
    direction_changes: int
    partition: tuple[tuple[float, float], ...]

    def to_dict(self) -> dict[str, Any]:  # noqa: D102
        return {
            "is_monotone": self.is_monotone,
            "direction_changes": self.direction_changes,
            "partition": [list(piece) for piece in self.partition],
        }


class StochasticMonotonicity(str, Enum):  # noqa: D101
    MONOTONE_INCREASING = "monotone_increasing"
    MONOTONE_DECREASING = "monotone_decreasing"
    NON_MONOTONE = "non_monotone"


@dataclass(frozen=True)
class StochasticMonotonicityVerdict:
    """Regression-dependence direction; ``degenerate`` when every column is constant."""

    direction: StochasticMonotonicity
    degenerate: bool = False


@dataclass(frozen=True)
class VerificationReport:
    """Oracle envelope against the closed-form cdf bounds over every grid point.

    Attributes
    ----------
    max_discrepancy
        Largest absolute gap between oracle and closed form over all grid points and
        both directions.
    worst_u
        Grid point where it occurs.
    passed
        ``max_discrepancy <= 3 / n_cells``.
    solver_gap
        Largest disagreement between the greedy and simplex solver paths.
    simplex_checks
        Number of programs solved by both paths.
    """

    spec: IndependenceSpec
    p_x: float
    n_cells: int
    max_discrepancy: float
    worst_u: float
    passed: bool
    solver_gap: float
    simplex_checks: int

    def to_dict(self) -> dict[str, Any]:  # noqa: D102
        return {
            "spec": self.spec.label,
            "p_x": self.p_x,
            "n_cells": self.n_cells,
            "max_discrepancy": self.max_discrepancy,
            "worst_u": self.worst_u,
            "pass": self.passed,
            "solver_gap": self.solver_gap,
        }
