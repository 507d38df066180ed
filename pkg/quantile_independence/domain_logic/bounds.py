"""Sharp bounds under T- and U-independence.

Cdf bounds on ``F_{U|X}(. | x)`` are built in rank space ``v = F_U(u)`` and composed with
``F_U``. Quantile bounds on ``Q_{Y0|X}(. | 1)`` and the mean bounds derived from them are
built from the tabulated ``Q_{Y|X}(. | 0)``.
"""

from __future__ import annotations

import dataclasses
import logging
from typing import TYPE_CHECKING

import numpy as np

from quantile_independence.domain_logic import piecewise
from quantile_independence.exceptions import ArgumentError, OutOfRangeError
from quantile_independence.models.curve import MonotoneCurve
from quantile_independence.models.results import BoundPair, BoundTarget, IdentifiedSet
from quantile_independence.models.spec import IndependenceKind, IndependenceSpec

if TYPE_CHECKING:
    from quantile_independence.models.observed import ObservedJoint
    from quantile_independence.types import FloatArray

logger = logging.getLogger(__name__)

Knots = list[tuple[float, float]]


def _check_p(p_x: float) -> None:
    if not 0.0 < p_x < 1.0:
        raise OutOfRangeError("Arm probability must lie in (0, 1)", p_x=p_x)


def _check_interval(a: float, b: float, lo: float = 0.0, hi: float = 1.0) -> None:
    if a > b:
        raise ArgumentError("Interval endpoints are reversed", a=a, b=b)
    if a < lo or b > hi:
        raise OutOfRangeError("Interval outside the domain", a=a, b=b, domain=(lo, hi))


def _spec_for(kind: IndependenceKind, a: float, b: float) -> IndependenceSpec:
    if kind == IndependenceKind.T_SET and a == b:
        return IndependenceSpec.t_points(a)
    return IndependenceSpec(kind, interval=(a, b))


def _to_u_space(
    lower: Knots, upper: Knots, f_u: MonotoneCurve | None
) -> tuple[MonotoneCurve, MonotoneCurve]:
    lower_curve = MonotoneCurve.from_knots(lower, is_cdf=True)
    upper_curve = MonotoneCurve.from_knots(upper, is_cdf=True)
    if f_u is None:
        return lower_curve, upper_curve
    return (
        piecewise.compose(lower_curve, f_u, is_cdf=True),
        piecewise.compose(upper_curve, f_u, is_cdf=True),
    )


def _ranks(a: float, b: float, f_u: MonotoneCurve | None) -> tuple[float, float]:
    if f_u is None:
        _check_interval(a, b)
        return a, b
    _check_interval(a, b, *f_u.domain)
    return float(piecewise.evaluate(f_u, a)), float(piecewise.evaluate(f_u, b))


def no_assumption_cdf_bounds(p_x: float, f_u: MonotoneCurve | None = None) -> BoundPair:
    """Bounds implied by the law of total probability alone."""
    _check_p(p_x)
    lower, upper = _to_u_space(
        [(0.0, 0.0), (1.0 - p_x, 0.0), (1.0, 1.0)], [(0.0, 0.0), (p_x, 1.0), (1.0, 1.0)], f_u
    )
    return BoundPair(lower, upper, BoundTarget.CDF_U_GIVEN_X, IndependenceSpec.none(), p_x, f_u)


def cdf_bounds_T(
    a: float, b: float, p_x: float, f_u: MonotoneCurve | None = None
) -> BoundPair:
    """Sharp bounds on ``F_{U|X}(u | x)`` when ``F_{U|X}(t | x) = F_U(t)`` on ``[a, b]``.

    Arguments
    ---------
    a, b
        The independence interval in units of ``U``; ``a == b`` is single-quantile
        independence.
    p_x
        ``P(X = x)``.
    f_u
        Marginal cdf of ``U``; uniform on ``[0, 1]`` when omitted.

    The returned spec records the interval in rank units ``(F_U(a), F_U(b))``.
    """
    _check_p(p_x)
    va, vb = _ranks(a, b, f_u)
    upper = [
        (0.0, 0.0),
        (p_x * va, va),
        (va, va),
        (vb, vb),
        (p_x + vb * (1.0 - p_x), 1.0),
        (1.0, 1.0),
    ]
    lower = [
        (0.0, 0.0),
        ((1.0 - p_x) * va, 0.0),
        (va, va),
        (vb, vb),
        (p_x * vb + 1.0 - p_x, vb),
        (1.0, 1.0),
    ]
    lower_curve, upper_curve = _to_u_space(lower, upper, f_u)
    return BoundPair(
        lower_curve,
        upper_curve,
        BoundTarget.CDF_U_GIVEN_X,
        _spec_for(IndependenceKind.T_SET, va, vb),
        p_x,
        f_u,
    )


def cdf_bounds_U(
    a: float, b: float, p_x: float, f_u: MonotoneCurve | None = None
) -> BoundPair:
    """Sharp bounds on ``F_{U|X}(u | x)`` when ``P(X = 1 | U = u)`` is constant on ``[a, b]``.

    The lower and upper envelopes each have two shapes; which one applies depends on how
    the mass outside ``[a, b]`` compares with ``F_U(a)``. Ties take the first shape, where
    both coincide. A zero-length interval restricts nothing and yields
    :func:`no_assumption_cdf_bounds`.
    """
    _check_p(p_x)
    va, vb = _ranks(a, b, f_u)
    if va == vb:
        logger.warning("U-set [%g, %g] has probability zero; using no-assumption bounds", a, b)
        pair = no_assumption_cdf_bounds(p_x, f_u)
        return BoundPair(
            pair.lower, pair.upper, pair.target, IndependenceSpec.u_interval(va, vb), p_x, f_u
        )

    mass = vb - va
    outside = 1.0 - mass
    if outside * (1.0 - p_x) <= va:
        start = outside * (1.0 - p_x)
        lower = [
            (0.0, 0.0),
            (start, 0.0),
            (va, (va - start) / p_x),
            (vb, (vb - 1.0) * (1.0 - p_x) / p_x + vb),
            (1.0, 1.0),
        ]
        lower_branch = 1
    else:
        lower = [(0.0, 0.0), (va, 0.0), (vb, mass), (p_x * mass + 1.0 - p_x, mass), (1.0, 1.0)]
        lower_branch = 2
    if outside * p_x <= va:
        upper = [(0.0, 0.0), (outside * p_x, outside), (va, outside), (vb, 1.0), (1.0, 1.0)]
        upper_branch = 1
    else:
        upper = [
            (0.0, 0.0),
            (va, va / p_x),
            (vb, va / p_x + mass),
            (mass * (1.0 - p_x) + p_x, 1.0),
            (1.0, 1.0),
        ]
        upper_branch = 2
    logger.debug(
        "U cdf bounds on [%g, %g] with p_x=%g: lower branch %d, upper branch %d",
        a,
        b,
        p_x,
        lower_branch,
        upper_branch,
    )
    lower_curve, upper_curve = _to_u_space(lower, upper, f_u)
    return BoundPair(
        lower_curve,
        upper_curve,
        BoundTarget.CDF_U_GIVEN_X,
        IndependenceSpec.u_interval(va, vb),
        p_x,
        f_u,
    )


def _with_marginal(pair: BoundPair, f_u: MonotoneCurve | None) -> BoundPair:
    if f_u is None:
        return pair
    return dataclasses.replace(
        pair,
        lower=piecewise.compose(pair.lower, f_u, is_cdf=True),
        upper=piecewise.compose(pair.upper, f_u, is_cdf=True),
        f_u=f_u,
    )


def cdf_bounds(spec: IndependenceSpec, p_x: float, f_u: MonotoneCurve | None = None) -> BoundPair:
    """Dispatch on ``spec.kind`` to the matching cdf bound family.

    Intervals of ``spec`` are read in rank units ``F_U(u)``, as recorded on every
    :class:`BoundPair`; the envelopes are then mapped to units of ``U`` through ``f_u``.
    """
    if spec.kind == IndependenceKind.FULL:
        _check_p(p_x)
        marginal = f_u if f_u is not None else MonotoneCurve.uniform_cdf()
        return BoundPair(marginal, marginal, BoundTarget.CDF_U_GIVEN_X, spec, p_x, f_u)
    if spec.kind == IndependenceKind.NONE:
        return no_assumption_cdf_bounds(p_x, f_u)
    if spec.kind == IndependenceKind.T_SET:
        return _with_marginal(cdf_bounds_T(*spec.endpoints(), p_x), f_u)
    if spec.kind == IndependenceKind.U_SET:
        return _with_marginal(cdf_bounds_U(*spec.endpoints(), p_x), f_u)
    raise ArgumentError("No closed-form bounds for this assumption", spec=spec.label)


def _piece(q0: MonotoneCurve, t_lo: float, t_hi: float, shift: float) -> Knots:
    """Knots of ``tau -> Q0(tau + shift)`` over ``[t_lo, t_hi]``."""
    s_lo = min(max(t_lo + shift, 0.0), 1.0)
    s_hi = min(max(t_hi + shift, s_lo), 1.0)
    inner = q0.xs[(q0.xs > s_lo) & (q0.xs < s_hi)]
    knots = [(t_lo, float(piecewise.evaluate(q0, s_lo)))]
    knots.extend(
        (float(s) - shift, float(v)) for s, v in zip(inner, piecewise.evaluate(q0, inner))
    )
    knots.append((max(t_hi, t_lo), float(piecewise.evaluate(q0, s_hi, side="left"))))
    return knots


def _flat(t_lo: float, t_hi: float, value: float) -> Knots:
    return [(t_lo, value), (max(t_hi, t_lo), value)]


def _chain(*pieces: Knots) -> MonotoneCurve:
    knots = [knot for piece in pieces for knot in piece]
    xs = np.clip(np.maximum.accumulate([x for x, _ in knots]), 0.0, 1.0)
    return MonotoneCurve(xs=xs, ys=np.array([y for _, y in knots]))


def _quantile_pair(
    lower: MonotoneCurve, upper: MonotoneCurve, spec: IndependenceSpec, p1: float
) -> BoundPair:
    return BoundPair(lower, upper, BoundTarget.QUANTILE_Y0_GIVEN_X1, spec, p1)


def quantile_bounds_T(a: float, b: float, p1: float, obs: ObservedJoint) -> BoundPair:
    """Bounds on ``Q_{Y0|X}(tau | 1)`` under T-independence on ``[a, b]``.

    Both curves are left-continuous in ``tau``; read them with :meth:`BoundPair.at`.
    """
    _check_p(p1)
    _check_interval(a, b)
    q0 = obs.q_y_given_x0
    low, high = q0.y_first, q0.y_last
    q_a = float(piecewise.evaluate(q0, a))
    q_b = float(piecewise.evaluate(q0, b))
    upper = _chain(_flat(0.0, a, q_a), _piece(q0, a, b, 0.0), _flat(b, 1.0, high))
    lower = _chain(_flat(0.0, a, low), _piece(q0, a, b, 0.0), _flat(b, 1.0, q_b))
    return _quantile_pair(lower, upper, _spec_for(IndependenceKind.T_SET, a, b), p1)


def quantile_bounds_U(a: float, b: float, p1: float, obs: ObservedJoint) -> BoundPair:
    """Bounds on ``Q_{Y0|X}(tau | 1)`` under U-independence on ``[a, b]``.

    The lower envelope changes shape where ``(1 - (b - a)) p1`` crosses ``a`` and the upper
    where ``(1 - (b - a)) p0`` does. A zero-length interval gives the support bounds.
    """
    _check_p(p1)
    _check_interval(a, b)
    p0 = 1.0 - p1
    q0 = obs.q_y_given_x0
    low, high = q0.y_first, q0.y_last
    spec = IndependenceSpec.u_interval(a, b)
    if a == b:
        logger.warning("U-set [%g, %g] has probability zero; using no-assumption bounds", a, b)
        return _quantile_pair(
            MonotoneCurve.constant(low), MonotoneCurve.constant(high), spec, p1
        )

    mass = b - a
    outside = 1.0 - mass
    if outside * p1 <= a:
        lower = _chain(_flat(0.0, outside, low), _piece(q0, outside, 1.0, (b - 1.0) / p0))
    else:
        lower = _chain(
            _flat(0.0, a / p1, low),
            _piece(q0, a / p1, a / p1 + mass, -a / p1),
            _flat(a / p1 + mass, 1.0, float(piecewise.evaluate(q0, mass))),
        )
    if outside * p0 <= a:
        tail = (1.0 - b) / p1
        upper = _chain(
            _flat(0.0, outside - tail, float(piecewise.evaluate(q0, outside))),
            _piece(q0, outside - tail, 1.0 - tail, tail),
            _flat(1.0 - tail, 1.0, high),
        )
    else:
        upper = _chain(_piece(q0, 0.0, mass, a / p0), _flat(mass, 1.0, high))
    return _quantile_pair(lower, upper, spec, p1)


def quantile_bounds(spec: IndependenceSpec, obs: ObservedJoint) -> BoundPair:
    """Dispatch on ``spec.kind`` to the matching quantile bound family."""
    q0 = obs.q_y_given_x0
    if spec.kind == IndependenceKind.FULL:
        return _quantile_pair(q0, q0, spec, obs.p1)
    if spec.kind == IndependenceKind.NONE:
        return _quantile_pair(
            MonotoneCurve.constant(q0.y_first), MonotoneCurve.constant(q0.y_last), spec, obs.p1
        )
    if spec.kind == IndependenceKind.T_SET:
        return quantile_bounds_T(*spec.endpoints(), obs.p1, obs)
    if spec.kind == IndependenceKind.U_SET:
        return quantile_bounds_U(*spec.endpoints(), obs.p1, obs)
    raise ArgumentError("No closed-form bounds for this assumption", spec=spec.label)


def quantile_bounds_from_cdf(
    spec: IndependenceSpec, obs: ObservedJoint, taus: FloatArray
) -> tuple[FloatArray, FloatArray]:
    """Quantile bounds obtained by pushing the rank cdf bounds through the observed arm.

    ``Q_upper(tau) = Q0(F0_upper(F1_lower^{-1}(tau)))`` and symmetrically for the lower
    bound, where ``F1`` bounds use ``p1`` and ``F0`` bounds use ``p0``.
    """
    arm1 = cdf_bounds(spec, obs.p1)
    arm0 = cdf_bounds(spec, obs.p0)
    levels = np.asarray(taus, dtype=np.float64)
    lower_rank = piecewise.evaluate(arm0.lower, piecewise.left_inverse(arm1.upper, levels))
    upper_rank = piecewise.evaluate(arm0.upper, piecewise.left_inverse(arm1.lower, levels))
    q0 = obs.q_y_given_x0
    return (
        np.asarray(piecewise.evaluate(q0, lower_rank)),
        np.asarray(piecewise.evaluate(q0, upper_rank)),
    )


def _quantile_term(obs: ObservedJoint, weight: float, tau: float) -> float:
    """``weight * Q0(tau)``, taking ``Q0(0)`` and ``Q0(1)`` from the declared support."""
    if weight <= 0.0:
        return 0.0
    tau = min(max(tau, 0.0), 1.0)
    low, high = obs.support_x0
    if tau == 0.0:
        return weight * low
    if tau == 1.0:
        return weight * high
    return weight * float(piecewise.evaluate(obs.q_y_given_x0, tau))


def _area(obs: ObservedJoint, lo: float, hi: float) -> float:
    lo = min(max(lo, 0.0), 1.0)
    hi = min(max(hi, lo), 1.0)
    return piecewise.integrate(obs.q_y_given_x0, lo, hi)


def _mean_endpoints(spec: IndependenceSpec, obs: ObservedJoint) -> tuple[float, float]:
    if spec.kind == IndependenceKind.FULL:
        return (_area(obs, 0.0, 1.0),) * 2
    if spec.kind == IndependenceKind.NONE or spec.is_vacuous:
        if spec.kind == IndependenceKind.U_SET:
            logger.warning("U-set %s has probability zero; using no-assumption bounds", spec.label)
        return _quantile_term(obs, 1.0, 0.0), _quantile_term(obs, 1.0, 1.0)
    if spec.kind not in (IndependenceKind.T_SET, IndependenceKind.U_SET):
        raise ArgumentError("No closed-form bounds for this assumption", spec=spec.label)

    a, b = spec.endpoints()
    _check_interval(a, b)
    p1, p0 = obs.p1, obs.p0
    if spec.kind == IndependenceKind.T_SET:
        middle = _area(obs, a, b)
        upper = _quantile_term(obs, a, a) + middle + _quantile_term(obs, 1.0 - b, 1.0)
        lower = _quantile_term(obs, a, 0.0) + middle + _quantile_term(obs, 1.0 - b, b)
        return lower, upper

    mass = b - a
    outside = 1.0 - mass
    if outside * p1 <= a:
        lower = _quantile_term(obs, outside, 0.0) + _area(
            obs, outside + (b - 1.0) / p0, (p0 + b - 1.0) / p0
        )
    else:
        lower = (
            _quantile_term(obs, a / p1, 0.0)
            + _area(obs, 0.0, mass)
            + _quantile_term(obs, outside - a / p1, mass)
        )
    if outside * p0 <= a:
        tail = (1.0 - b) / p1
        upper = (
            _quantile_term(obs, outside - tail, outside)
            + _area(obs, outside, 1.0)
            + _quantile_term(obs, tail, 1.0)
        )
    else:
        upper = _area(obs, a / p0, mass + a / p0) + _quantile_term(obs, outside, 1.0)
    return lower, upper


def mean_bounds(spec: IndependenceSpec, obs: ObservedJoint) -> IdentifiedSet:
    """Bounds on ``E(Y0 | X = 1)``, the integrals of the quantile bounds.

    An infinite support endpoint entering with positive weight gives an infinite endpoint
    and sets ``unbounded``.
    """
    lo, hi = _mean_endpoints(spec, obs)
    unbounded = not (np.isfinite(lo) and np.isfinite(hi))
    if unbounded:
        logger.warning("Mean bounds under %s are unbounded: [%g, %g]", spec.label, lo, hi)
    return IdentifiedSet("E_Y0_given_X1", lo, hi, spec, unbounded=unbounded)


def att_set(spec: IndependenceSpec, obs: ObservedJoint) -> IdentifiedSet:
    """Identified set for the average treatment effect on the treated."""
    treated_mean = piecewise.integrate(obs.q_y_given_x1, 0.0, 1.0)
    means = mean_bounds(spec, obs)
    return IdentifiedSet(
        "ATT", treated_mean - means.hi, treated_mean - means.lo, spec, unbounded=means.unbounded
    )


def _widen_to_support(obs: ObservedJoint, lower: float, upper: float) -> tuple[float, float]:
    # Tabulated quantile curves stop at finite values; an extreme branch of a bound
    # reaches the declared support endpoint instead.
    q0 = obs.q_y_given_x0
    low, high = obs.support_x0
    if lower <= q0.y_first:
        lower = low
    if upper >= q0.y_last:
        upper = high
    return lower, upper


def quantile_set(q: float, spec: IndependenceSpec, obs: ObservedJoint) -> IdentifiedSet:
    """Identified set for ``Q_{Y0|X}(q | 1)``."""
    if not 0.0 < q < 1.0:
        raise OutOfRangeError("Quantile level must lie in (0, 1)", q=q)
    lower, upper = _widen_to_support(obs, *quantile_bounds(spec, obs).at(q))
    unbounded = not (np.isfinite(lower) and np.isfinite(upper))
    return IdentifiedSet(f"Q_Y0_given_X1({q:g})", lower, upper, spec, unbounded=unbounded)


def qtt_set(q: float, spec: IndependenceSpec, obs: ObservedJoint) -> IdentifiedSet:
    """Identified set for the ``q``-quantile treatment effect on the treated."""
    untreated = quantile_set(q, spec, obs)
    treated = float(piecewise.evaluate(obs.q_y_given_x1, q))
    if untreated.unbounded:
        logger.warning("QTT(%g) bounds under %s are unbounded", q, spec.label)
    return IdentifiedSet(
        f"QTT({q:g})",
        treated - untreated.hi,
        treated - untreated.lo,
        spec,
        unbounded=untreated.unbounded,
    )


def epsilon_mixture(pair: BoundPair, eps: float) -> tuple[MonotoneCurve, MonotoneCurve]:
    """Jointly attainable conditional cdfs of ``U`` given ``X = 1`` and ``X = 0``.

    ``pair`` holds the arm-1 cdf bounds. Returns
    ``(eps F1_lower + (1 - eps) F1_upper, (1 - eps) F0_lower + eps F0_upper)``, which mix
    back to ``F_U`` with weights ``p1`` and ``p0``.
    """
    if pair.target != BoundTarget.CDF_U_GIVEN_X:
        raise ArgumentError("Mixtures are defined for cdf bounds only", target=pair.target.value)
    arm0 = cdf_bounds(pair.spec, 1.0 - pair.p_x, pair.f_u)
    return (
        piecewise.convex_combine(pair.lower, pair.upper, eps),
        piecewise.convex_combine(arm0.upper, arm0.lower, eps),
    )
