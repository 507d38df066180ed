from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
import pytest

from quantile_independence.domain_logic import piecewise
from quantile_independence.domain_logic.observables import (
    dgp_to_observed,
    ingest_samples,
    read_samples_csv,
    sample_dgp,
    truncnorm_cdf,
    truncnorm_ppf,
)
from quantile_independence.exceptions import (
    ConstructionError,
    DegeneracyError,
    InputFormatError,
    OutOfRangeError,
)
from quantile_independence.models.observed import ObservedJoint, TruncNormDgp

if TYPE_CHECKING:
    from pathlib import Path


class TestTruncatedNormal:
    def test_median_is_exact(self) -> None:
        assert truncnorm_cdf(np.array(0.0)) == 0.5

    def test_truncation_endpoints(self) -> None:
        np.testing.assert_allclose(truncnorm_cdf(np.array([-4.0, 4.0])), [0.0, 1.0], atol=1e-12)
        np.testing.assert_allclose(truncnorm_ppf(np.array([0.0, 1.0])), [-4.0, 4.0])

    def test_ppf_inverts_cdf(self) -> None:
        z = np.linspace(-3.5, 3.5, 71)

        np.testing.assert_allclose(truncnorm_ppf(truncnorm_cdf(z)), z, atol=1e-9)


class TestDgpToObserved:
    def test_medians_and_supports(self, model_obs: ObservedJoint) -> None:
        assert model_obs.p1 == 0.5
        assert piecewise.evaluate(model_obs.f_y_given_x0, 0.0) == 0.5
        assert piecewise.evaluate(model_obs.q_y_given_x0, 0.5) == pytest.approx(0.0, abs=1e-12)
        assert piecewise.evaluate(model_obs.q_y_given_x1, 0.5) == pytest.approx(1.0, abs=1e-12)
        assert model_obs.support(0) == (-4.0, 4.0)
        assert model_obs.support(1) == pytest.approx((-3.4, 5.4))

    def test_treated_mean(self, model_obs: ObservedJoint) -> None:
        assert piecewise.integrate(model_obs.q_y_given_x1, 0.0, 1.0) == pytest.approx(
            1.0, abs=1e-6
        )

    def test_quantile_interpolation_error(self, model_obs: ObservedJoint) -> None:
        taus = np.linspace(0.001, 0.999, 997)

        error = np.abs(piecewise.evaluate(model_obs.q_y_given_x0, taus) - truncnorm_ppf(taus))

        assert error.max() <= 1e-4

    def test_cdf_interpolation_error(self, model_obs: ObservedJoint) -> None:
        ys = np.linspace(-3.99, 3.99, 1000)

        error = np.abs(piecewise.evaluate(model_obs.f_y_given_x0, ys) - truncnorm_cdf(ys))

        assert error.max() <= 1e-4

    @pytest.mark.parametrize(
        "arm, lo, hi",
        [
            pytest.param(0, -3.9, 3.9, id="untreated"),
            pytest.param(1, -3.3, 5.3, id="treated"),
        ],
    )
    def test_quantile_inverts_cdf(
        self, model_obs: ObservedJoint, arm: int, lo: float, hi: float
    ) -> None:
        ys = np.linspace(lo, hi, 101)
        cdf = model_obs.cdf(arm)

        recovered = piecewise.left_inverse(cdf, piecewise.evaluate(cdf, ys))

        np.testing.assert_allclose(recovered, ys, atol=1e-8)

    def test_too_few_knots(self) -> None:
        with pytest.raises(OutOfRangeError):
            dgp_to_observed(TruncNormDgp(), n_knots=10)

    @pytest.mark.parametrize(
        "kwargs, error",
        [
            pytest.param({"gamma": -1.0}, ConstructionError, id="degenerate_scale"),
            pytest.param({"p1": 1.0}, DegeneracyError, id="everyone_treated"),
            pytest.param({"p1": 0.0}, DegeneracyError, id="no_one_treated"),
        ],
    )
    def test_invalid_model(self, kwargs: dict, error: type[Exception]) -> None:
        with pytest.raises(error):
            TruncNormDgp(**kwargs)


class TestSamples:
    def test_sample_shape_and_reproducibility(self) -> None:
        first = sample_dgp(TruncNormDgp(), 100, seed=1)

        assert first.shape == (100, 2)
        np.testing.assert_array_equal(first, sample_dgp(TruncNormDgp(), 100, seed=1))
        assert set(np.unique(first[:, 1])) <= {0.0, 1.0}

    def test_large_sample_recovers_model(self) -> None:
        obs = ingest_samples(sample_dgp(TruncNormDgp(), 100_000, seed=7))

        assert obs.p1 == pytest.approx(0.5, abs=0.01)
        assert piecewise.evaluate(obs.q_y_given_x0, 0.5) == pytest.approx(0.0, abs=0.02)
        assert piecewise.evaluate(obs.q_y_given_x1, 0.5) == pytest.approx(1.0, abs=0.02)

    def test_ingest_uses_jump_midpoints(self) -> None:
        rows = [(0.0, 0), (1.0, 0), (1.0, 0), (2.0, 0), (5.0, 1), (6.0, 1)]

        obs = ingest_samples(rows)

        assert obs.p1 == pytest.approx(1 / 3)
        assert obs.f_y_given_x0.knots == [(0.0, 0.0), (1.0, 0.5), (2.0, 1.0)]
        assert obs.support(1) == (5.0, 6.0)

    @pytest.mark.parametrize(
        "rows, error",
        [
            pytest.param([(0.0, 1), (1.0, 1)], DegeneracyError, id="no_untreated"),
            pytest.param([(0.0, 0), (0.0, 0), (1.0, 1), (2.0, 1)], DegeneracyError, id="tied"),
            pytest.param([(0.0, 0), (1.0, 2)], InputFormatError, id="bad_indicator"),
            pytest.param([(np.nan, 0), (1.0, 1)], InputFormatError, id="nan_outcome"),
            pytest.param([], InputFormatError, id="empty"),
        ],
    )
    def test_ingest_invalid(self, rows: list, error: type[Exception]) -> None:
        with pytest.raises(error):
            ingest_samples(rows)


class TestReadSamplesCsv:
    def test_reads(self, tmp_path: Path) -> None:
        path = tmp_path / "samples.csv"
        path.write_text("y,x\n0.1,0\n0.5,0\n1.5,1\n2.5,1\n", encoding="utf-8")

        obs = read_samples_csv(path)

        assert obs.p1 == pytest.approx(0.5)
        assert obs.support(0) == (0.1, 0.5)

    @pytest.mark.parametrize(
        "content, line",
        [
            pytest.param("a,b\n1,0\n", 1, id="wrong_header"),
            pytest.param("y,x\n0.1,0\nabc,1\n0.3,0\n", 3, id="unparsable_outcome"),
            pytest.param("y,x\n0.1,2\n", 2, id="bad_indicator"),
            pytest.param("y,x\n\n\n0.1,0\n0.2,0\nabc,1\n", 2, id="blank_line"),
            pytest.param("y,x\n0.1,0\n0.2,0\n\nabc,1\n", 4, id="blank_line_before_bad_record"),
        ],
    )
    def test_reports_line(self, tmp_path: Path, content: str, line: int) -> None:
        path = tmp_path / "samples.csv"
        path.write_text(content, encoding="utf-8")

        with pytest.raises(InputFormatError) as exc_info:
            read_samples_csv(path)

        assert exc_info.value.line == line

    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(InputFormatError):
            read_samples_csv(tmp_path / "missing.csv")
