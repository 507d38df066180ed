from __future__ import annotations

import pytest

from quantile_independence.exceptions import ArgumentError, InputFormatError, OutOfRangeError
from quantile_independence.models import deserialize_default
from quantile_independence.models.spec import IndependenceKind, IndependenceSpec


class TestIndependenceSpec:
    @pytest.mark.parametrize(
        "family, delta, expected",
        [
            pytest.param("T", 0.0, IndependenceSpec.full(), id="T_zero_is_full"),
            pytest.param("U", 0.0, IndependenceSpec.full(), id="U_zero_is_full"),
            pytest.param("T", 0.5, IndependenceSpec.t_points(0.5), id="T_half_is_median"),
            pytest.param("U", 0.5, IndependenceSpec.u_interval(0.5, 0.5), id="U_half_is_null"),
            pytest.param("T", 0.25, IndependenceSpec.t_interval(0.25, 0.75), id="T_interval"),
        ],
    )
    def test_for_delta(self, family: str, delta: float, expected: IndependenceSpec) -> None:
        assert IndependenceSpec.for_delta(family, delta) == expected  # type: ignore[arg-type]

    def test_for_delta_out_of_range(self) -> None:
        with pytest.raises(OutOfRangeError):
            IndependenceSpec.for_delta("T", 0.6)

    def test_points_are_sorted(self) -> None:
        assert IndependenceSpec.t_points(0.75, 0.25).points == (0.25, 0.75)

    @pytest.mark.parametrize(
        "kwargs, error",
        [
            pytest.param({"kind": "t_set"}, ArgumentError, id="empty_T"),
            pytest.param(
                {"kind": "t_set", "points": (0.5,), "interval": (0.2, 0.8)},
                ArgumentError,
                id="points_and_interval",
            ),
            pytest.param({"kind": "t_set", "points": (1.0,)}, OutOfRangeError, id="point_at_one"),
            pytest.param({"kind": "u_set", "interval": (0.8, 0.2)}, ArgumentError, id="reversed"),
            pytest.param({"kind": "full", "points": (0.5,)}, ArgumentError, id="full_with_points"),
            pytest.param(
                {"kind": "mean", "tolerance": -1.0}, ArgumentError, id="negative_tolerance"
            ),
        ],
    )
    def test_invalid(self, kwargs: dict, error: type[Exception]) -> None:
        with pytest.raises(error):
            IndependenceSpec(**kwargs)

    def test_vacuous(self) -> None:
        assert IndependenceSpec.u_interval(0.3, 0.3).is_vacuous
        assert IndependenceSpec.none().is_vacuous
        assert not IndependenceSpec.u_interval(0.3, 0.4).is_vacuous
        assert not IndependenceSpec.t_points(0.5).is_vacuous

    def test_endpoints(self) -> None:
        assert IndependenceSpec.t_points(0.5).endpoints() == (0.5, 0.5)
        assert IndependenceSpec.u_interval(0.2, 0.8).endpoints() == (0.2, 0.8)
        with pytest.raises(ArgumentError):
            IndependenceSpec.t_points(0.25, 0.75).endpoints()

    def test_grid_tolerance(self) -> None:
        assert IndependenceSpec.t_points(0.5).grid_tolerance(1000) == pytest.approx(0.002)
        assert IndependenceSpec(IndependenceKind.T_SET, (0.5,), None, 0.01).grid_tolerance(
            1000
        ) == pytest.approx(0.01)

    @pytest.mark.parametrize(
        "spec, label",
        [
            pytest.param(IndependenceSpec.t_interval(0.25, 0.75), "T=[0.25,0.75]", id="T"),
            pytest.param(IndependenceSpec.t_points(0.25, 0.5), "T={0.25,0.5}", id="T_points"),
            pytest.param(IndependenceSpec.u_interval(0.1, 0.9), "U=[0.1,0.9]", id="U"),
            pytest.param(IndependenceSpec.mean(), "mean", id="mean"),
        ],
    )
    def test_label(self, spec: IndependenceSpec, label: str) -> None:
        assert spec.label == label

    def test_deserialize(self) -> None:
        payload = {"kind": "u_set", "points": [], "interval": [0.25, 1], "tolerance": None}

        spec = deserialize_default(IndependenceSpec, payload)

        assert spec == IndependenceSpec.u_interval(0.25, 1.0)
        assert spec.kind is IndependenceKind.U_SET

    def test_deserialize_round_trip_of_to_dict(self) -> None:
        spec = IndependenceSpec.t_points(0.25, 0.5)

        assert deserialize_default(IndependenceSpec, spec.to_dict()) == spec

    def test_deserialize_unknown_key(self) -> None:
        with pytest.raises(InputFormatError):
            deserialize_default(IndependenceSpec, {"kind": "full", "colour": "red"})
