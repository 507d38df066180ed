from __future__ import annotations

import dataclasses

import numpy as np
import pytest

from quantile_independence.domain_logic import piecewise
from quantile_independence.domain_logic.bounds import (
    att_set,
    cdf_bounds,
    cdf_bounds_T,
    cdf_bounds_U,
    epsilon_mixture,
    mean_bounds,
    no_assumption_cdf_bounds,
    qtt_set,
    quantile_bounds,
    quantile_bounds_from_cdf,
    quantile_bounds_T,
    quantile_set,
)
from quantile_independence.domain_logic.observables import dgp_to_observed
from quantile_independence.exceptions import ArgumentError, OutOfRangeError
from quantile_independence.models.curve import MonotoneCurve
from quantile_independence.models.observed import ObservedJoint, TruncNormDgp
from quantile_independence.models.spec import IndependenceSpec

GRID = np.linspace(0.0, 1.0, 1001)
TAUS = (np.arange(200) + 0.5) / 200


def random_triples(rng: np.random.Generator, size: int) -> list[tuple[float, float, float]]:
    a = rng.uniform(0.05, 0.6, size)
    b = a + rng.uniform(0.05, 0.95 - a)
    p = rng.uniform(0.1, 0.9, size)
    return list(zip(a.tolist(), b.tolist(), p.tolist()))


class TestCdfBounds:
    def test_no_assumption(self) -> None:
        pair = no_assumption_cdf_bounds(0.25)

        assert pair.at(0.1) == pytest.approx((0.0, 0.4))
        assert pair.at(0.9) == pytest.approx((0.6, 1.0))

    def test_full_independence_collapses(self) -> None:
        pair = cdf_bounds(IndependenceSpec.full(), 0.3)

        assert pair.at(0.42) == pytest.approx((0.42, 0.42))

    def test_t_upper_below_the_interval(self) -> None:
        pair = cdf_bounds_T(0.25, 0.75, 0.25)

        assert pair.at(0.05)[1] == pytest.approx(0.2)

    def test_t_identifies_the_interval(self) -> None:
        pair = cdf_bounds_T(0.25, 0.75, 0.3)

        for u in (0.25, 0.4, 0.75):
            assert pair.at(u) == pytest.approx((u, u))

    def test_t_single_quantile(self) -> None:
        pair = cdf_bounds_T(0.5, 0.5, 0.5)

        assert pair.spec == IndependenceSpec.t_points(0.5)
        assert pair.at(0.5) == pytest.approx((0.5, 0.5))

    def test_u_second_upper_shape(self) -> None:
        pair = cdf_bounds_U(0.1, 0.5, 0.5)

        assert pair.at(0.3)[1] == pytest.approx(0.4)

    def test_u_first_upper_shape(self) -> None:
        pair = cdf_bounds_U(0.25, 0.75, 0.5)

        assert pair.at(0.25)[1] == pytest.approx(0.5)
        assert pair.at(0.5)[1] == pytest.approx(0.75)

    def test_u_null_set_is_no_assumption(self) -> None:
        pair = cdf_bounds_U(0.4, 0.4, 0.3)
        reference = no_assumption_cdf_bounds(0.3)

        assert piecewise.max_abs_difference(pair.upper, reference.upper, GRID) == 0.0
        assert pair.spec == IndependenceSpec.u_interval(0.4, 0.4)

    @pytest.mark.parametrize(
        "family, expected_spec, expected_at",
        [
            pytest.param("T", IndependenceSpec.t_interval(0.25, 0.75), (0.5, 0.5), id="T"),
            pytest.param("U", IndependenceSpec.u_interval(0.25, 0.75), (0.25, 0.75), id="U"),
        ],
    )
    def test_non_uniform_marginal(
        self, family: str, expected_spec: IndependenceSpec, expected_at: tuple[float, float]
    ) -> None:
        build = cdf_bounds_T if family == "T" else cdf_bounds_U

        pair = build(0.5, 1.5, 0.3, f_u=MonotoneCurve.uniform_cdf(0.0, 2.0))

        assert pair.lower.domain == (0.0, 2.0)
        assert pair.spec == expected_spec
        assert pair.at(1.0) == pytest.approx(expected_at)

    @pytest.mark.parametrize("family", ["T", "U"])
    def test_dispatch_reads_spec_in_ranks(self, family: str) -> None:
        build = cdf_bounds_T if family == "T" else cdf_bounds_U
        f_u = MonotoneCurve.uniform_cdf(0.0, 2.0)
        pair = build(0.5, 1.5, 0.3, f_u=f_u)
        points = np.linspace(0.0, 2.0, 401)

        again = cdf_bounds(pair.spec, 0.3, f_u)

        assert piecewise.max_abs_difference(again.lower, pair.lower, points) <= 1e-12
        assert piecewise.max_abs_difference(again.upper, pair.upper, points) <= 1e-12

    @pytest.mark.parametrize(
        "args, error",
        [
            pytest.param((0.75, 0.25, 0.5), ArgumentError, id="reversed"),
            pytest.param((0.25, 1.5, 0.5), OutOfRangeError, id="outside"),
            pytest.param((0.25, 0.75, 1.0), OutOfRangeError, id="degenerate_arm"),
        ],
    )
    def test_invalid(self, args: tuple[float, float, float], error: type[Exception]) -> None:
        with pytest.raises(error):
            cdf_bounds_T(*args)

    def test_mean_has_no_closed_form(self) -> None:
        with pytest.raises(ArgumentError):
            cdf_bounds(IndependenceSpec.mean(), 0.5)

    def test_valid_and_nested(self, rng: np.random.Generator) -> None:
        for a, b, p in random_triples(rng, 50):
            t_pair, u_pair = cdf_bounds_T(a, b, p), cdf_bounds_U(a, b, p)
            none = no_assumption_cdf_bounds(p)
            t_lo, t_hi = (piecewise.evaluate(c, GRID) for c in (t_pair.lower, t_pair.upper))
            u_lo, u_hi = (piecewise.evaluate(c, GRID) for c in (u_pair.lower, u_pair.upper))

            assert np.all(t_lo <= t_hi + 1e-12)
            assert np.all(u_lo <= t_lo + 1e-12)
            assert np.all(t_hi <= u_hi + 1e-12)
            assert np.all(piecewise.evaluate(none.lower, GRID) <= u_lo + 1e-12)
            assert np.all(u_hi <= piecewise.evaluate(none.upper, GRID) + 1e-12)


class TestEpsilonMixture:
    @pytest.mark.parametrize("family", ["T", "U"])
    def test_arms_mix_back_to_uniform(self, rng: np.random.Generator, family: str) -> None:
        build = cdf_bounds_T if family == "T" else cdf_bounds_U
        for a, b, p1 in random_triples(rng, 50):
            pair = build(a, b, p1)
            for eps in (0.0, 0.25, 0.5, 1.0):
                arm1, arm0 = epsilon_mixture(pair, eps)
                points = np.unique(np.concatenate((arm1.xs, arm0.xs, GRID)))

                mixed = p1 * piecewise.evaluate(arm1, points) + (1 - p1) * piecewise.evaluate(
                    arm0, points
                )

                np.testing.assert_allclose(mixed, points, atol=1e-9)

    @pytest.mark.parametrize("family", ["T", "U"])
    def test_arms_mix_back_to_non_uniform_marginal(self, family: str) -> None:
        build = cdf_bounds_T if family == "T" else cdf_bounds_U
        f_u = MonotoneCurve.uniform_cdf(0.0, 2.0)
        pair = build(0.5, 1.5, 0.3, f_u=f_u)
        points = np.linspace(0.0, 2.0, 401)

        arm1, arm0 = epsilon_mixture(pair, 0.5)

        mixed = 0.3 * piecewise.evaluate(arm1, points) + 0.7 * piecewise.evaluate(arm0, points)
        np.testing.assert_allclose(mixed, points / 2.0, atol=1e-9)

    def test_endpoints_are_the_bounds(self) -> None:
        pair = cdf_bounds_T(0.25, 0.75, 0.4)

        arm1, _ = epsilon_mixture(pair, 1.0)

        assert piecewise.max_abs_difference(arm1, pair.lower, GRID) <= 1e-12

    def test_rejects_quantile_pairs(self, model_obs: ObservedJoint) -> None:
        with pytest.raises(ArgumentError):
            epsilon_mixture(quantile_bounds(IndependenceSpec.t_points(0.5), model_obs), 0.5)


class TestQuantileBounds:
    def test_t_outside_interval(self, model_obs: ObservedJoint) -> None:
        pair = quantile_bounds_T(0.25, 0.75, 0.5, model_obs)

        lower, upper = pair.at(0.9)
        assert upper == pytest.approx(4.0)
        assert lower == pytest.approx(0.6745, abs=1e-3)

    def test_t_point_identified_inside(self, model_obs: ObservedJoint) -> None:
        pair = quantile_bounds_T(0.25, 0.75, 0.5, model_obs)

        lower, upper = pair.at(0.6)
        assert lower == upper
        assert upper == pytest.approx(piecewise.evaluate(model_obs.q_y_given_x0, 0.6))

    def test_u_narrow_band(self, model_obs: ObservedJoint) -> None:
        pair = quantile_bounds(IndependenceSpec.u_interval(0.125, 0.875), model_obs)

        assert pair.at(0.5) == pytest.approx((-0.6745, 0.6745), abs=1e-3)

    def test_none_is_support(self, model_obs: ObservedJoint) -> None:
        assert quantile_bounds(IndependenceSpec.none(), model_obs).at(0.3) == (-4.0, 4.0)

    @pytest.mark.parametrize("family", ["T", "U"])
    def test_dual_to_cdf_bounds(
        self, model_obs: ObservedJoint, rng: np.random.Generator, family: str
    ) -> None:
        for a, b, p1 in random_triples(rng, 50):
            obs = dataclasses.replace(model_obs, p1=p1)
            spec = (
                IndependenceSpec.t_interval(a, b)
                if family == "T"
                else IndependenceSpec.u_interval(a, b)
            )
            pair = quantile_bounds(spec, obs)
            closed = np.array([pair.at(float(t)) for t in TAUS])

            lower, upper = quantile_bounds_from_cdf(spec, obs, TAUS)

            np.testing.assert_allclose(closed[:, 0], lower, atol=1e-6)
            np.testing.assert_allclose(closed[:, 1], upper, atol=1e-6)

    def test_full_is_observed_quantile(self, model_obs: ObservedJoint) -> None:
        lower, upper = quantile_bounds_from_cdf(IndependenceSpec.full(), model_obs, TAUS)

        expected = piecewise.evaluate(model_obs.q_y_given_x0, TAUS)
        np.testing.assert_allclose(lower, expected, atol=1e-9)
        np.testing.assert_allclose(upper, expected, atol=1e-9)


class TestMeanBounds:
    @pytest.mark.parametrize("delta", [0.1, 0.25, 0.4])
    @pytest.mark.parametrize("family", ["T", "U"])
    def test_integral_of_quantile_bounds(
        self, model_obs: ObservedJoint, family: str, delta: float
    ) -> None:
        spec = IndependenceSpec.for_delta(family, delta)  # type: ignore[arg-type]
        pair = quantile_bounds(spec, model_obs)

        means = mean_bounds(spec, model_obs)

        assert means.lo == pytest.approx(piecewise.integrate(pair.lower, 0.0, 1.0), abs=1e-6)
        assert means.hi == pytest.approx(piecewise.integrate(pair.upper, 0.0, 1.0), abs=1e-6)

    def test_t_interval_upper(self, model_obs: ObservedJoint) -> None:
        means = mean_bounds(IndependenceSpec.t_interval(0.25, 0.75), model_obs)

        assert means.hi == pytest.approx(0.831, abs=5e-3)
        assert means.lo == pytest.approx(-means.hi, abs=1e-6)

    def test_median_independence(self, model_obs: ObservedJoint) -> None:
        means = mean_bounds(IndependenceSpec.t_points(0.5), model_obs)

        assert (means.lo, means.hi) == pytest.approx((-2.0, 2.0), abs=1e-6)

    def test_full(self, model_obs: ObservedJoint) -> None:
        means = mean_bounds(IndependenceSpec.full(), model_obs)

        assert means.lo == means.hi == pytest.approx(0.0, abs=1e-6)

    def test_unbounded_support(self, model_obs: ObservedJoint) -> None:
        obs = dataclasses.replace(model_obs, support_x0=(-np.inf, np.inf))

        means = mean_bounds(IndependenceSpec.t_points(0.5), obs)

        assert means.unbounded
        assert (means.lo, means.hi) == (-np.inf, np.inf)
        assert att_set(IndependenceSpec.t_points(0.5), obs).unbounded
        assert not mean_bounds(IndependenceSpec.full(), obs).unbounded

    def test_several_quantile_points_are_rejected(self, model_obs: ObservedJoint) -> None:
        with pytest.raises(ArgumentError):
            mean_bounds(IndependenceSpec.t_points(0.25, 0.75), model_obs)

    def test_mean_independence_has_no_closed_form(self, model_obs: ObservedJoint) -> None:
        with pytest.raises(ArgumentError):
            mean_bounds(IndependenceSpec.mean(), model_obs)


class TestIdentifiedSets:
    @pytest.mark.parametrize(
        "spec, lo, hi",
        [
            pytest.param(IndependenceSpec.t_points(0.5), -1.0, 3.0, id="median"),
            pytest.param(IndependenceSpec.none(), -3.0, 5.0, id="none"),
            pytest.param(IndependenceSpec.u_interval(0.5, 0.5), -3.0, 5.0, id="U_null"),
            pytest.param(IndependenceSpec.full(), 1.0, 1.0, id="full"),
        ],
    )
    def test_att(
        self, model_obs: ObservedJoint, spec: IndependenceSpec, lo: float, hi: float
    ) -> None:
        att = att_set(spec, model_obs)

        assert att.param == "ATT"
        assert (att.lo, att.hi) == pytest.approx((lo, hi), abs=1e-6)

    @pytest.mark.parametrize(
        "spec, lo, hi",
        [
            pytest.param(IndependenceSpec.t_interval(0.25, 0.75), 1.0, 1.0, id="T_inside"),
            pytest.param(IndependenceSpec.u_interval(0.25, 0.75), -3.0, 5.0, id="U_wide"),
            pytest.param(IndependenceSpec.u_interval(0.4, 0.6), -3.0, 5.0, id="U_narrow"),
            pytest.param(IndependenceSpec.u_interval(0.125, 0.875), 0.3255, 1.6745, id="U_tight"),
            pytest.param(IndependenceSpec.full(), 1.0, 1.0, id="full"),
        ],
    )
    def test_median_qtt(
        self, model_obs: ObservedJoint, spec: IndependenceSpec, lo: float, hi: float
    ) -> None:
        qtt = qtt_set(0.5, spec, model_obs)

        assert qtt.param == "QTT(0.5)"
        assert (qtt.lo, qtt.hi) == pytest.approx((lo, hi), abs=1e-3)

    def test_quantile_widens_to_declared_support(self, model_obs: ObservedJoint) -> None:
        obs = dataclasses.replace(model_obs, support_x0=(-10.0, 10.0))

        result = quantile_set(0.3, IndependenceSpec.none(), obs)

        assert (result.lo, result.hi) == (-10.0, 10.0)

    def test_quantile_level_range(self, model_obs: ObservedJoint) -> None:
        with pytest.raises(OutOfRangeError):
            quantile_set(1.0, IndependenceSpec.full(), model_obs)

    def test_no_effect_model_collapses(self) -> None:
        obs = dgp_to_observed(TruncNormDgp(gamma=0.0, pi=0.0), n_knots=256)

        att = att_set(IndependenceSpec.full(), obs)
        qtt = qtt_set(0.5, IndependenceSpec.full(), obs)

        assert att.lo == att.hi == pytest.approx(0.0, abs=1e-12)
        assert qtt.lo == qtt.hi == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("family", ["T", "U"])
    def test_widths_shrink_as_delta_falls(self, model_obs: ObservedJoint, family: str) -> None:
        deltas = np.linspace(0.0, 0.5, 11)
        specs = [
            IndependenceSpec.for_delta(family, float(d))  # type: ignore[arg-type]
            for d in deltas
        ]

        for build in (lambda s: att_set(s, model_obs), lambda s: qtt_set(0.5, s, model_obs)):
            widths = [build(spec).width for spec in specs]
            assert all(w0 <= w1 + 1e-9 for w0, w1 in zip(widths, widths[1:]))

    def test_t_sets_sit_inside_u_sets(self, model_obs: ObservedJoint) -> None:
        for delta in np.linspace(0.0, 0.5, 11):
            t_spec = IndependenceSpec.for_delta("T", float(delta))
            u_spec = IndependenceSpec.for_delta("U", float(delta))

            assert att_set(u_spec, model_obs).contains(att_set(t_spec, model_obs), tol=1e-9)
            assert qtt_set(0.5, u_spec, model_obs).contains(
                qtt_set(0.5, t_spec, model_obs), tol=1e-9
            )

