from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from quantile_independence.exceptions import ConstructionError

if TYPE_CHECKING:
    from collections.abc import Iterable

    from quantile_independence.types import FloatArray

KNOT_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class MonotoneCurve:
    """A nondecreasing piecewise-linear function on a closed interval.

    Houses every cdf, quantile function and bound envelope of the package.

    Attributes
    ----------
    xs
        Knot abscissae, nondecreasing. A value may repeat exactly once, which encodes
        a jump: the first of the pair carries the left limit, the second the value at
        the jump point (right-continuous convention).
    ys
        Knot ordinates, nondecreasing.
    is_cdf
        When set, the first ordinate is 0 and the last is 1.

    Notes
    -----
    Knots closer than ``1e-12`` are merged on construction, redundant duplicates are
    dropped, and both arrays are made read-only, so instances are safe to share.
    """

    xs: FloatArray
    ys: FloatArray
    is_cdf: bool = False

    def __post_init__(self) -> None:
        xs, ys = _normalize_knots(
            np.asarray(self.xs, dtype=np.float64), np.asarray(self.ys, dtype=np.float64)
        )
        if self.is_cdf:
            if abs(ys[0]) > 1e-9 or abs(ys[-1] - 1.0) > 1e-9:
                raise ConstructionError(
                    "A cdf must start at 0 and end at 1", y_first=ys[0], y_last=ys[-1]
                )
            ys[0], ys[-1] = 0.0, 1.0
        xs.flags.writeable = False
        ys.flags.writeable = False
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @classmethod
    def from_knots(
        cls, knots: Iterable[tuple[float, float]], is_cdf: bool = False
    ) -> MonotoneCurve:
        """Build a curve from ``(x, y)`` pairs."""
        pairs = list(knots)
        return cls(
            xs=np.array([x for x, _ in pairs], dtype=np.float64),
            ys=np.array([y for _, y in pairs], dtype=np.float64),
            is_cdf=is_cdf,
        )

    @classmethod
    def identity(cls, lo: float = 0.0, hi: float = 1.0) -> MonotoneCurve:
        """Return ``x -> x`` on ``[lo, hi]``; a uniform cdf when the domain is ``[0, 1]``."""
        return cls(xs=np.array([lo, hi]), ys=np.array([lo, hi]), is_cdf=(lo, hi) == (0.0, 1.0))

    @classmethod
    def uniform_cdf(cls, lo: float = 0.0, hi: float = 1.0) -> MonotoneCurve:  # noqa: D102
        return cls(xs=np.array([lo, hi]), ys=np.array([0.0, 1.0]), is_cdf=True)

    @classmethod
    def constant(  # noqa: D102
        cls, value: float, lo: float = 0.0, hi: float = 1.0
    ) -> MonotoneCurve:
        return cls(xs=np.array([lo, hi]), ys=np.array([value, value]))

    @property
    def domain(self) -> tuple[float, float]:  # noqa: D102
        return float(self.xs[0]), float(self.xs[-1])

    @property
    def y_first(self) -> float:  # noqa: D102
        return float(self.ys[0])

    @property
    def y_last(self) -> float:  # noqa: D102
        return float(self.ys[-1])

    @property
    def knots(self) -> list[tuple[float, float]]:  # noqa: D102
        return [(float(x), float(y)) for x, y in zip(self.xs, self.ys)]

    def __len__(self) -> int:
        return len(self.xs)

    def __repr__(self) -> str:
        lo, hi = self.domain
        kind = "cdf" if self.is_cdf else "curve"
        return f"MonotoneCurve({kind}, {len(self)} knots on [{lo:g}, {hi:g}])"


def _normalize_knots(xs: FloatArray, ys: FloatArray) -> tuple[FloatArray, FloatArray]:
    if xs.ndim != 1 or xs.shape != ys.shape:
        raise ConstructionError("Knot arrays must be one-dimensional and of equal length")
    if len(xs) < 2:
        raise ConstructionError("A curve needs at least two knots", n_knots=len(xs))
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise ConstructionError("Knots must be finite")

    out_x: list[float] = [float(xs[0])]
    out_y: list[float] = [float(ys[0])]
    for x, y in zip(xs[1:].tolist(), ys[1:].tolist()):
        if x < out_x[-1] - KNOT_TOLERANCE:
            raise ConstructionError(
                "Knot abscissae must be nondecreasing", x=x, previous=out_x[-1]
            )
        if y < out_y[-1] - KNOT_TOLERANCE:
            raise ConstructionError(
                "Knot ordinates must be nondecreasing", y=y, previous=out_y[-1]
            )
        x = max(x, out_x[-1])
        y = max(y, out_y[-1])
        if x - out_x[-1] <= KNOT_TOLERANCE:
            x = out_x[-1]
            if y - out_y[-1] <= KNOT_TOLERANCE:
                continue
            # Three knots at one abscissa: keep the outer two.
            if len(out_x) >= 2 and out_x[-2] == x:
                out_y[-1] = y
                continue
        out_x.append(x)
        out_y.append(y)

    if out_x[0] == out_x[-1]:
        raise ConstructionError("A curve needs a domain of positive length")
    return np.array(out_x), np.array(out_y)
