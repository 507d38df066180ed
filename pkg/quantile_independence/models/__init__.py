from __future__ import annotations

from enum import Enum
from typing import TYPE_CHECKING

import dacite

from quantile_independence.exceptions import InputFormatError
from quantile_independence.models.config import SweepConfig
from quantile_independence.models.curve import MonotoneCurve
from quantile_independence.models.observed import ObservedJoint, TruncNormDgp
from quantile_independence.models.propensity import GridPropensity, GridPropensityPayload
from quantile_independence.models.spec import IndependenceKind, IndependenceSpec

if TYPE_CHECKING:
    from typing import Any, TypeVar

    from quantile_independence.types import JsonDict

    T = TypeVar("T")

__all__ = (
    "DACITE_CONFIG",
    "GridPropensity",
    "IndependenceKind",
    "IndependenceSpec",
    "MonotoneCurve",
    "ObservedJoint",
    "SweepConfig",
    "TruncNormDgp",
    "deserialize_default",
    "deserialize_propensity",
)


# JSON numbers arrive as int when integral; lists stand in for tuples.
DACITE_CONFIG = dacite.Config(cast=[Enum, tuple], type_hooks={float: float}, strict=True)


def deserialize_default(model_class: type[T], payload: JsonDict) -> T:
    """Deserialize a JSON or config payload into a dataclass using dacite.

    Validation errors raised by the dataclass itself propagate unchanged; payloads that
    do not fit the dataclass's fields become :class:`InputFormatError`.
    """
    try:
        return dacite.from_dict(model_class, payload, config=DACITE_CONFIG)
    except dacite.DaciteError as e:
        raise InputFormatError(f"Invalid {model_class.__name__} payload: {e}") from e


def deserialize_propensity(payload: Any) -> GridPropensity:
    """Build a :class:`GridPropensity` from its ``{"n": N, "values": [...]}`` layout."""
    if not isinstance(payload, dict):
        raise InputFormatError("Propensity payload must be a JSON object")
    data = deserialize_default(GridPropensityPayload, payload)
    if data.n != len(data.values):
        raise InputFormatError(
            "Propensity length does not match n", n=data.n, n_values=len(data.values)
        )
    return GridPropensity(values=data.values)  # type: ignore[arg-type]
