from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

import numpy as np

from quantile_independence.exceptions import ConstructionError

if TYPE_CHECKING:
    from quantile_independence.types import FloatArray

VALUE_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class GridPropensity:
    """A latent propensity score ``p(u) = P(X = 1 | U = u)`` on a uniform grid over ``[0, 1]``.

    ``values[i]`` is the value on the cell ``[i / N, (i + 1) / N)``, reported at the cell
    midpoint. ``U`` is normalized to be uniform, so grid averages are exact integrals of
    the step function.

    Attributes
    ----------
    values
        One value in ``[0, 1]`` per cell.
    """

    values: FloatArray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise ConstructionError("Propensity values must be a non-empty vector")
        if not np.all(np.isfinite(values)):
            raise ConstructionError("Propensity values must be finite")
        if values.min() < -VALUE_TOLERANCE or values.max() > 1.0 + VALUE_TOLERANCE:
            raise ConstructionError(
                "Propensity values must lie in [0, 1]",
                min=float(values.min()),
                max=float(values.max()),
            )
        values = np.clip(values, 0.0, 1.0)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def n_cells(self) -> int:  # noqa: D102
        return int(self.values.size)

    @property
    def implied_p1(self) -> float:
        """``P(X = 1)`` by the law of total probability."""
        return float(self.values.mean())

    @property
    def midpoints(self) -> FloatArray:  # noqa: D102
        return (np.arange(self.n_cells) + 0.5) / self.n_cells

    def to_dict(self) -> dict[str, Any]:
        """Serialize to the ``{"n": N, "values": [...]}`` JSON layout."""
        return {"n": self.n_cells, "values": self.values.tolist()}


@dataclass
class GridPropensityPayload:
    """JSON layout of a :class:`GridPropensity`, validated by dacite."""

    n: int
    values: list[float]
