from __future__ import annotations

import numpy as np
import pytest

from quantile_independence.domain_logic.observables import dgp_to_observed
from quantile_independence.models.observed import ObservedJoint, TruncNormDgp
from quantile_independence.models.propensity import GridPropensity

N_CELLS = 1000


@pytest.fixture(scope="session")
def model_obs() -> ObservedJoint:
    """The truncated-normal illustration with gamma=0.1, pi=1, p1=0.5."""
    return dgp_to_observed(TruncNormDgp(), n_knots=4096)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture
def ramp() -> GridPropensity:
    """Increasing propensity ``p(u) = u`` at cell midpoints."""
    return GridPropensity(values=(np.arange(N_CELLS) + 0.5) / N_CELLS)


@pytest.fixture
def flat_middle() -> GridPropensity:
    """Flat at 0.5 on [0.25, 0.75] with tails averaging 0.2 and 0.8."""
    values = np.full(N_CELLS, 0.5)
    values[:250] = 0.2
    values[750:] = 0.8
    return GridPropensity(values=values)
