"""Type definitions for the quantile independence toolkit."""

from __future__ import annotations

from typing import Any, Literal, Union

import numpy as np
import numpy.typing as npt

FloatArray = npt.NDArray[np.float64]

# Scalars and arrays are both accepted by the curve algebra; the result has the input's shape.
ArrayLike = Union[float, FloatArray]

Direction = Literal["min", "max"]

Side = Literal["lower", "upper"]

# Which one-sided limit to report at a jump of a piecewise-linear curve.
Continuity = Literal["right", "left"]

Arm = Literal[0, 1]

Param = Literal["ATT", "QTT"]

SpecFamily = Literal["T", "U"]

JsonDict = dict[str, Any]
