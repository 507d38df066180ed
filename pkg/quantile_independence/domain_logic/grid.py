"""Helpers for the uniform grid of ``N`` cells over ``[0, 1]``.

Cell ``i`` covers ``[i / N, (i + 1) / N)`` and is reported at its midpoint. Interval
endpoints are snapped to the nearest cell boundary, which costs at most ``1 / (2N)``.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from quantile_independence.exceptions import ArgumentError

if TYPE_CHECKING:
    from quantile_independence.types import ArrayLike, FloatArray


def midpoints(n_cells: int) -> FloatArray:  # noqa: D103
    return (np.arange(n_cells) + 0.5) / n_cells


def boundaries(n_cells: int) -> FloatArray:  # noqa: D103
    return np.arange(n_cells + 1) / n_cells


def snap(t: ArrayLike, n_cells: int) -> np.ndarray:
    """Index of the cell boundary nearest to ``t``."""
    return np.clip(np.rint(np.asarray(t, dtype=np.float64) * n_cells), 0, n_cells).astype(np.int64)


def snap_interior(t: ArrayLike, n_cells: int) -> np.ndarray:
    """Like :func:`snap`, but points strictly inside ``(0, 1)`` stay in ``[1, n_cells - 1]``.

    A quantile constraint at such a point is never merged into the trivial ones at 0 or 1.
    """
    points = np.asarray(t, dtype=np.float64)
    index = snap(points, n_cells)
    interior = (points > 0.0) & (points < 1.0)
    return np.where(interior, np.clip(index, 1, n_cells - 1), index)


def prefix_sums(values: FloatArray) -> FloatArray:
    """``out[k]`` is the sum of the first ``k`` values, so ``out`` is one entry longer."""
    return np.concatenate(([0.0], np.cumsum(values)))


def interval_average(prefix: FloatArray, i: ArrayLike, j: ArrayLike) -> ArrayLike:
    """Average of the values in cells ``i, ..., j - 1`` from their prefix sums."""
    lo = np.asarray(i)
    hi = np.asarray(j)
    if np.any(hi <= lo):
        raise ArgumentError("An averaging interval must cover at least one cell")
    return (prefix[hi] - prefix[lo]) / (hi - lo)
