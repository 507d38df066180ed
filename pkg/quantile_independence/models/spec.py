from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Any

from quantile_independence.exceptions import ArgumentError, OutOfRangeError

if TYPE_CHECKING:
    from quantile_independence.types import SpecFamily

ANALYTIC_TOLERANCE = 1e-8


class IndependenceKind(str, Enum):
    """Which relaxation of full independence between ``U`` and ``X`` is maintained."""

    FULL = "full"
    T_SET = "t_set"
    U_SET = "u_set"
    MEAN = "mean"
    NONE = "none"


@dataclass(frozen=True)
class IndependenceSpec:
    """An independence assumption.

    ``T_SET`` and ``U_SET`` carry either a finite set of quantile ``points`` or a
    closed ``interval``, never both. ``FULL``, ``MEAN`` and ``NONE`` carry neither.

    Attributes
    ----------
    kind
        The relaxation.
    points
        Sorted quantile levels inside ``(0, 1)``.
    interval
        ``(a, b)`` with ``0 <= a <= b <= 1``.
    tolerance
        Overrides the default check tolerance (``1e-8`` analytic, ``2 / N`` on a grid).
    """

    kind: IndependenceKind
    points: tuple[float, ...] = ()
    interval: tuple[float, float] | None = None
    tolerance: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", IndependenceKind(self.kind))
        object.__setattr__(self, "points", tuple(sorted(float(t) for t in self.points)))
        if self.interval is not None:
            a, b = self.interval
            object.__setattr__(self, "interval", (float(a), float(b)))

        if self.kind in (IndependenceKind.T_SET, IndependenceKind.U_SET):
            if self.points and self.interval is not None:
                raise ArgumentError("Give either quantile points or an interval, not both")
            if not self.points and self.interval is None:
                raise ArgumentError(
                    "An empty set of quantiles is not an assumption; use the 'none' kind",
                    kind=self.kind.value,
                )
        elif self.points or self.interval is not None:
            raise ArgumentError("Only t_set and u_set specs carry quantiles", kind=self.kind.value)

        if any(not 0.0 < t < 1.0 for t in self.points):
            raise OutOfRangeError("Quantile points must lie in (0, 1)", points=self.points)
        if self.interval is not None:
            a, b = self.interval
            if a > b:
                raise ArgumentError("Interval endpoints are reversed", a=a, b=b)
            if a < 0.0 or b > 1.0:
                raise OutOfRangeError("Interval must lie in [0, 1]", a=a, b=b)
        if self.tolerance is not None and not self.tolerance > 0.0:
            raise ArgumentError("Tolerance must be positive", tolerance=self.tolerance)

    @classmethod
    def full(cls) -> IndependenceSpec:  # noqa: D102
        return cls(IndependenceKind.FULL)

    @classmethod
    def none(cls) -> IndependenceSpec:  # noqa: D102
        return cls(IndependenceKind.NONE)

    @classmethod
    def mean(cls) -> IndependenceSpec:  # noqa: D102
        return cls(IndependenceKind.MEAN)

    @classmethod
    def t_points(cls, *taus: float) -> IndependenceSpec:  # noqa: D102
        return cls(IndependenceKind.T_SET, points=taus)

    @classmethod
    def t_interval(cls, a: float, b: float) -> IndependenceSpec:  # noqa: D102
        return cls(IndependenceKind.T_SET, interval=(a, b))

    @classmethod
    def u_interval(cls, a: float, b: float) -> IndependenceSpec:  # noqa: D102
        return cls(IndependenceKind.U_SET, interval=(a, b))

    @classmethod
    def for_delta(cls, family: SpecFamily, delta: float) -> IndependenceSpec:
        """Return the sweep assumption ``T = U = [delta, 1 - delta]``.

        ``delta = 0`` is full independence. For ``T`` at ``delta = 0.5`` the interval
        shrinks to median independence; for ``U`` it becomes a null set, which the bounds
        treat as no assumption at all.
        """
        if not 0.0 <= delta <= 0.5:
            raise OutOfRangeError("delta must lie in [0, 0.5]", delta=delta)
        if family not in ("T", "U"):
            raise ArgumentError("Unknown spec family", family=family)
        if delta == 0.0:
            return cls.full()
        if family == "T":
            if delta == 0.5:
                return cls.t_points(0.5)
            return cls.t_interval(delta, 1.0 - delta)
        return cls.u_interval(delta, 1.0 - delta)

    @property
    def is_vacuous(self) -> bool:
        """A U-set of measure zero restricts nothing."""
        if self.kind == IndependenceKind.NONE:
            return True
        if self.kind != IndependenceKind.U_SET:
            return False
        if self.interval is not None:
            return self.interval[0] == self.interval[1]
        return True

    def endpoints(self) -> tuple[float, float]:
        """Return ``(a, b)`` for an interval or a single quantile point.

        Raises
        ------
        ArgumentError
            When this assumption is not a single interval or point.
        """
        if self.interval is not None:
            return self.interval
        if len(self.points) == 1:
            return self.points[0], self.points[0]
        raise ArgumentError(
            "Closed-form bounds need a single interval or quantile", spec=self.label
        )

    def grid_tolerance(self, n_cells: int) -> float:  # noqa: D102
        return self.tolerance if self.tolerance is not None else 2.0 / n_cells

    def analytic_tolerance(self) -> float:  # noqa: D102
        return self.tolerance if self.tolerance is not None else ANALYTIC_TOLERANCE

    @property
    def label(self) -> str:
        """Short human-readable form, e.g. ``T=[0.25,0.75]`` or ``U={0.5}``."""
        if self.kind in (IndependenceKind.FULL, IndependenceKind.MEAN, IndependenceKind.NONE):
            return self.kind.value
        prefix = "T" if self.kind == IndependenceKind.T_SET else "U"
        if self.interval is not None:
            return f"{prefix}=[{self.interval[0]:g},{self.interval[1]:g}]"
        return f"{prefix}={{{','.join(f'{t:g}' for t in self.points)}}}"

    def to_dict(self) -> dict[str, Any]:  # noqa: D102
        return {
            "kind": self.kind.value,
            "points": list(self.points),
            "interval": list(self.interval) if self.interval is not None else None,
            "tolerance": self.tolerance,
        }
