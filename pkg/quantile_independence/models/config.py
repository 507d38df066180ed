from __future__ import annotations

from dataclasses import dataclass, field

from quantile_independence.exceptions import ArgumentError, OutOfRangeError

PARAMS = ("ATT", "QTT")
SPEC_FAMILIES = ("T", "U")
MIN_KNOTS = 64


def default_delta_grid() -> list[float]:
    """101 evenly spaced values from 0 to 0.5."""
    return [k / 200 for k in range(101)]


@dataclass
class SweepConfig:
    """Settings of a delta sweep over ``T = U = [delta, 1 - delta]``.

    Attributes
    ----------
    source
        ``"dgp"`` for the truncated-normal model, otherwise a path to a ``y,x`` CSV.
    gamma, pi, p1
        Parameters of the truncated-normal model.
    delta_grid
        Ascending values in ``[0, 0.5]``.
    params
        Any of ``ATT`` and ``QTT``.
    q
        Quantile level of ``QTT``.
    specs
        Any of ``T`` and ``U``.
    n_knots
        Tabulation resolution of the model's cdfs.
    n_cells
        Grid resolution of the oracle columns.
    oracle
        Add ``oracle_lo`` and ``oracle_hi``: the ATT set recomputed by the grid oracle at
        ``n_cells`` cells, left empty on QTT rows.
    out
        Output CSV path; standard output when unset.
    """

    source: str = "dgp"
    gamma: float = 0.1
    pi: float = 1.0
    p1: float = 0.5
    delta_grid: list[float] = field(default_factory=default_delta_grid)
    params: list[str] = field(default_factory=lambda: list(PARAMS))
    q: float = 0.5
    specs: list[str] = field(default_factory=lambda: list(SPEC_FAMILIES))
    n_knots: int = 4096
    n_cells: int = 1000
    oracle: bool = False
    out: str | None = None

    def __post_init__(self) -> None:
        if not self.delta_grid:
            raise ArgumentError("delta_grid must not be empty")
        if any(d1 > d2 for d1, d2 in zip(self.delta_grid, self.delta_grid[1:])):
            raise ArgumentError("delta_grid must be sorted ascending", delta_grid=self.delta_grid)
        if self.delta_grid[0] < 0.0 or self.delta_grid[-1] > 0.5:
            raise OutOfRangeError("delta values must lie in [0, 0.5]", delta_grid=self.delta_grid)
        if not 0.0 < self.q < 1.0:
            raise OutOfRangeError("q must lie in (0, 1)", q=self.q)
        if unknown := set(self.params) - set(PARAMS):
            raise ArgumentError("Unknown params", params=sorted(unknown))
        if unknown := set(self.specs) - set(SPEC_FAMILIES):
            raise ArgumentError("Unknown specs", specs=sorted(unknown))
        if self.n_knots < MIN_KNOTS:
            raise OutOfRangeError(f"n_knots must be at least {MIN_KNOTS}", n_knots=self.n_knots)
        if self.n_cells < 1:
            raise OutOfRangeError("n_cells must be positive", n_cells=self.n_cells)
