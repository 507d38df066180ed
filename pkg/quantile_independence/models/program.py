from __future__ import annotations

from dataclasses import dataclass, replace
from typing import TYPE_CHECKING

import numpy as np

from quantile_independence.exceptions import ArgumentError, InfeasibleProgramError

if TYPE_CHECKING:
    from quantile_independence.types import Arm, Direction


@dataclass(frozen=True, eq=False)
class ConstraintBlock:
    """Cells whose treatment probabilities must sum to ``total``.

    ``cells`` holds ascending cell indices; a block may be non-contiguous.
    """

    cells: np.ndarray
    total: float

    def __post_init__(self) -> None:
        cells = np.asarray(self.cells, dtype=np.int64)
        cells.flags.writeable = False
        object.__setattr__(self, "cells", cells)
        if self.total < -1e-9 or self.total > len(cells) + 1e-9:
            raise InfeasibleProgramError(
                "Block total cannot be met with probabilities in [0, 1]",
                total=self.total,
                n_cells=len(cells),
            )

    @property
    def size(self) -> int:  # noqa: D102
        return len(self.cells)


@dataclass(frozen=True)
class FeasibleProgram:
    """Extremize ``F_{U|X}(objective_cell / N | arm)`` over grid propensities.

    The variables are the arm's treatment probabilities ``q_i`` in ``[0, 1]``. The blocks
    partition the cells; every constraint implied by the assumption is a block sum.

    Attributes
    ----------
    n_cells
        ``N``.
    p_x
        ``P(X = arm)``.
    blocks
        Partition of the cells with the required sum of ``q`` over each block.
    objective_cell
        Grid boundary ``k``; the objective is ``sum(q[:k]) / (N p_x)``.
    direction
        ``"min"`` or ``"max"``.
    arm
        Which arm ``q`` refers to.
    """

    n_cells: int
    p_x: float
    blocks: tuple[ConstraintBlock, ...]
    objective_cell: int = 0
    direction: Direction = "max"
    arm: Arm = 1

    def __post_init__(self) -> None:
        covered = np.sort(np.concatenate([block.cells for block in self.blocks]))
        if not np.array_equal(covered, np.arange(self.n_cells)):
            raise InfeasibleProgramError("Constraint blocks must partition the cells")
        if not 0 <= self.objective_cell <= self.n_cells:
            raise ArgumentError(
                "Objective boundary outside the grid", objective_cell=self.objective_cell
            )
        if self.direction not in ("min", "max"):
            raise ArgumentError("direction must be 'min' or 'max'", direction=self.direction)

    def with_objective(  # noqa: D102
        self, objective_cell: int, direction: Direction
    ) -> FeasibleProgram:
        return replace(self, objective_cell=objective_cell, direction=direction)
