from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, ClassVar

from quantile_independence.exceptions import ConstructionError, DegeneracyError

if TYPE_CHECKING:
    from quantile_independence.models.curve import MonotoneCurve
    from quantile_independence.types import Arm


@dataclass(frozen=True)
class ObservedJoint:
    """The identified objects all bounds are computed from.

    Attributes
    ----------
    p1
        ``P(X = 1)``; must lie strictly inside ``(0, 1)``.
    f_y_given_x0, f_y_given_x1
        Cdfs of ``Y | X = x``, strictly increasing on their supports.
    q_y_given_x0, q_y_given_x1
        Quantile functions of ``Y | X = x`` on ``[0, 1]`` (left-inverses of the cdfs).
    support_x0, support_x1
        Closed supports ``[y_lo, y_hi]`` per arm. Endpoints may be infinite when the
        tabulated curves are a truncation of an unbounded distribution.
    """

    p1: float
    f_y_given_x0: MonotoneCurve
    f_y_given_x1: MonotoneCurve
    q_y_given_x0: MonotoneCurve
    q_y_given_x1: MonotoneCurve
    support_x0: tuple[float, float] = field(default=(float("nan"), float("nan")))
    support_x1: tuple[float, float] = field(default=(float("nan"), float("nan")))

    def __post_init__(self) -> None:
        if not 0.0 < self.p1 < 1.0:
            raise DegeneracyError("Both treatment arms must have positive probability", p1=self.p1)
        if not (self.f_y_given_x0.is_cdf and self.f_y_given_x1.is_cdf):
            raise ConstructionError("Conditional distributions must be tagged as cdfs")
        # Unset supports default to the tabulated range of each cdf.
        for name, cdf in (("support_x0", self.f_y_given_x0), ("support_x1", self.f_y_given_x1)):
            lo, hi = getattr(self, name)
            if lo != lo or hi != hi:
                object.__setattr__(self, name, cdf.domain)
            elif not lo < hi:
                raise ConstructionError("Support must have positive length", support=(lo, hi))

    @property
    def p0(self) -> float:  # noqa: D102
        return 1.0 - self.p1

    def cdf(self, arm: Arm) -> MonotoneCurve:  # noqa: D102
        return self.f_y_given_x1 if arm == 1 else self.f_y_given_x0

    def quantile(self, arm: Arm) -> MonotoneCurve:  # noqa: D102
        return self.q_y_given_x1 if arm == 1 else self.q_y_given_x0

    def support(self, arm: Arm) -> tuple[float, float]:  # noqa: D102
        return self.support_x1 if arm == 1 else self.support_x0


@dataclass(frozen=True)
class TruncNormDgp:
    """Outcome model of the numerical illustration.

    ``Y | X = 0`` is a standard normal truncated to ``[-4, 4]`` and
    ``Y | X = 1`` is ``pi + (1 + gamma)`` times the same variable.

    Attributes
    ----------
    gamma
        Scale shift of the treated arm, must exceed ``-1``.
    pi
        Location shift of the treated arm.
    p1
        ``P(X = 1)``.
    """

    TRUNCATION: ClassVar[tuple[float, float]] = (-4.0, 4.0)

    gamma: float = 0.1
    pi: float = 1.0
    p1: float = 0.5

    def __post_init__(self) -> None:
        if not self.gamma > -1.0:
            raise ConstructionError("Scale shift must exceed -1", gamma=self.gamma)
        if not 0.0 < self.p1 < 1.0:
            raise DegeneracyError("Both treatment arms must have positive probability", p1=self.p1)

    def scale(self, arm: Arm) -> float:  # noqa: D102
        return 1.0 + self.gamma * arm

    def location(self, arm: Arm) -> float:  # noqa: D102
        return self.pi * arm

    def support(self, arm: Arm) -> tuple[float, float]:  # noqa: D102
        lo, hi = self.TRUNCATION
        return self.location(arm) + self.scale(arm) * lo, self.location(arm) + self.scale(arm) * hi
