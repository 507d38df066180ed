from __future__ import annotations

from quantile_independence.exceptions import QuantileIndependenceError
from quantile_independence.models.curve import MonotoneCurve
from quantile_independence.models.observed import ObservedJoint, TruncNormDgp
from quantile_independence.models.propensity import GridPropensity
from quantile_independence.models.spec import IndependenceKind, IndependenceSpec

__version__ = "0.1.0"

__all__ = (
    "GridPropensity",
    "IndependenceKind",
    "IndependenceSpec",
    "MonotoneCurve",
    "ObservedJoint",
    "QuantileIndependenceError",
    "TruncNormDgp",
)
