from __future__ import annotations

import pytest

from quantile_independence.models.results import (
    AverageWitness,
    IdentifiedSet,
    MonotonicityReport,
    Verdict,
)
from quantile_independence.models.spec import IndependenceSpec


class TestIdentifiedSet:
    @pytest.fixture
    def wide(self) -> IdentifiedSet:
        return IdentifiedSet("ATT", -3.0, 5.0, IndependenceSpec.none())

    def test_width(self, wide: IdentifiedSet) -> None:
        assert wide.width == 8.0

    def test_contains(self, wide: IdentifiedSet) -> None:
        narrow = IdentifiedSet("ATT", -1.0, 3.0, IndependenceSpec.t_points(0.5))

        assert wide.contains(narrow)
        assert not narrow.contains(wide)
        assert wide.contains(IdentifiedSet("ATT", -3.0 - 1e-10, 5.0, wide.spec), tol=1e-9)

    def test_to_dict(self, wide: IdentifiedSet) -> None:
        assert wide.to_dict() == {
            "param": "ATT",
            "lo": -3.0,
            "hi": 5.0,
            "interior_sharp": True,
            "spec": "none",
        }


class TestVerdict:
    def test_truthiness(self) -> None:
        assert Verdict(passed=True)
        assert not Verdict(passed=False)

    def test_to_dict(self) -> None:
        verdict = Verdict(False, AverageWitness(0.0, 0.5, 0.25, 0.5))

        assert verdict.to_dict() == {
            "pass": False,
            "witness": {"t1": 0.0, "t2": 0.5, "average": 0.25, "expected": 0.5, "column": None},
            "note": None,
        }


def test_monotonicity_report_to_dict() -> None:
    report = MonotonicityReport(False, 1, ((0.0, 0.5), (0.5, 1.0)))

    assert report.to_dict() == {
        "is_monotone": False,
        "direction_changes": 1,
        "partition": [[0.0, 0.5], [0.5, 1.0]],
    }
