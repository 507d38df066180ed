from __future__ import annotations

import numpy as np
import pytest

from quantile_independence.exceptions import ConstructionError
from quantile_independence.models.curve import MonotoneCurve


class TestMonotoneCurve:
    def test_identity_on_unit_interval_is_cdf(self) -> None:
        curve = MonotoneCurve.identity()

        assert curve.is_cdf
        assert curve.domain == (0.0, 1.0)
        assert curve.knots == [(0.0, 0.0), (1.0, 1.0)]

    def test_identity_elsewhere_is_not_cdf(self) -> None:
        assert not MonotoneCurve.identity(-1.0, 2.0).is_cdf

    def test_near_duplicate_knots_are_merged(self) -> None:
        curve = MonotoneCurve.from_knots([(0.0, 0.0), (0.5, 0.4), (0.5 + 1e-14, 0.4), (1.0, 1.0)])

        assert len(curve) == 3

    def test_jump_keeps_outer_pair(self) -> None:
        curve = MonotoneCurve.from_knots(
            [(0.0, 0.0), (0.5, 0.1), (0.5, 0.2), (0.5, 0.3), (1.0, 1.0)]
        )

        assert curve.knots == [(0.0, 0.0), (0.5, 0.1), (0.5, 0.3), (1.0, 1.0)]

    def test_arrays_are_read_only(self) -> None:
        curve = MonotoneCurve.identity()

        with pytest.raises(ValueError):
            curve.xs[0] = 0.5

    def test_cdf_endpoints_are_snapped(self) -> None:
        curve = MonotoneCurve.from_knots([(0.0, 1e-11), (1.0, 1.0 - 1e-11)], is_cdf=True)

        assert curve.y_first == 0.0
        assert curve.y_last == 1.0

    @pytest.mark.parametrize(
        "knots, is_cdf",
        [
            pytest.param([(0.0, 0.0)], False, id="single_knot"),
            pytest.param([(0.0, 0.0), (0.0, 1.0)], False, id="zero_length_domain"),
            pytest.param([(0.0, 0.0), (1.0, 1.0), (0.5, 1.0)], False, id="decreasing_x"),
            pytest.param([(0.0, 1.0), (1.0, 0.0)], False, id="decreasing_y"),
            pytest.param([(0.0, 0.0), (1.0, np.inf)], False, id="infinite"),
            pytest.param([(0.0, 0.1), (1.0, 1.0)], True, id="cdf_not_starting_at_zero"),
        ],
    )
    def test_invalid_knots(self, knots: list[tuple[float, float]], is_cdf: bool) -> None:
        with pytest.raises(ConstructionError):
            MonotoneCurve.from_knots(knots, is_cdf=is_cdf)
