import math

import pytest
import scipy.optimize
from hypothesis import assume, given
from hypothesis import strategies as st

from halfspace.constants import bubble_constants
from halfspace.errors import DomainError, GeometryError
from halfspace.fiber import (
    ConditionReport,
    ConditionRow,
    FiberCoefficients,
    check_condition_a0,
    check_condition_a1,
    fiber_value,
    maximize_fiber,
    measure_coefficients,
)
from halfspace.thresholds import lambda_star

coef = st.floats(0.1, 20.0)


def _scipy_max(c, t_hi=50.0):
    res = scipy.optimize.minimize_scalar(lambda t: -fiber_value(c, t), bounds=(0.0, t_hi), method="bounded",
                                         options={"xatol": 1e-12})
    return -res.fun


@given(E=coef, P=coef, V=coef, T=coef, lam=st.floats(0.0, 0.9), N=st.integers(3, 8), a=st.sampled_from([0, 1]))
def test_maximum_matches_scipy(E, P, V, T, lam, N, a):
    assume(E - lam * P > 0.05)
    c = FiberCoefficients(N, E, P, V, T, 1.0, a=a, lam=lam * E / P)
    fm = maximize_fiber(c)
    assert fm.value == pytest.approx(_scipy_max(c, 4 * fm.t_star + 1), rel=1e-9, abs=1e-12)
    assert fm.bracket[0] <= fm.t_star <= fm.bracket[1]


@given(mu=st.floats(-2.0, 2.0), q=st.floats(2.05, 2.9))
def test_maximum_with_perturbation(mu, q):
    c = FiberCoefficients(4, 3.0, 1.0, 1.0, 1.0, 0.5, a=1, q=q, lam=0.5, mu=mu)
    assert maximize_fiber(c).value == pytest.approx(_scipy_max(c), rel=1e-9)


@given(st.floats(0.0, 2.5))
def test_q2_perturbation_shifts_linear_term(mu):
    """With q = 2 the μQ term is part of the quadratic coefficient."""
    base = FiberCoefficients(5, 6.0, 1.0, 2.0, 1.5, 1.0, q=2.0)
    shifted = FiberCoefficients(5, 6.0 - mu, 1.0, 2.0, 1.5, 1.0, q=2.0)
    assert maximize_fiber(base.with_params(mu=mu)).value == pytest.approx(maximize_fiber(shifted).value, rel=1e-12)


def test_geometry_error():
    c = FiberCoefficients(5, 1.0, 1.0, 1.0, 1.0, 1.0, lam=1.0)
    with pytest.raises(GeometryError):
        maximize_fiber(c)
    c = FiberCoefficients(5, 2.0, 1.0, 1.0, 1.0, 1.0, lam=1.0, mu=1.5, q=2.0)
    with pytest.raises(GeometryError):
        maximize_fiber(c)


def test_level_of_bubble_at_unit_scale_is_A():
    """For the bare bubble ray the maximum is attained at t = 1 with value A."""
    for N in (3, 5, 7):
        bc = bubble_constants(N)
        c = FiberCoefficients(N, bc.K1, 0.0, bc.K2, bc.K3, 0.0, a=1)
        fm = maximize_fiber(c)
        assert fm.t_star == pytest.approx(1.0, rel=1e-10)
        assert fm.value == pytest.approx(bc.A, rel=1e-10)


def test_measure_validation():
    with pytest.raises(DomainError):
        measure_coefficients("v", 5, 0.1)
    with pytest.raises(DomainError):
        measure_coefficients("u", 4, 0.1, q=3.0)
    with pytest.raises(DomainError):
        measure_coefficients("U", 4, 0.1)
    c = measure_coefficients("uhat", 5, 0.1)
    assert c.a == 0 and c.family == "uhat"


@pytest.mark.parametrize("N", [6, 7])
def test_sign_flip_a1(N):
    lam = lambda_star(N)
    above = check_condition_a1(N, lam + 0.05, 0.0)
    below = check_condition_a1(N, lam - 0.05, 0.0)
    assert all(r.passes for r in above.rows[-2:])
    assert not any(r.passes for r in below.rows[-2:])


def test_sign_flip_n5_needs_smaller_eps():
    """At N = 5 the ε³ remainder wins until ε is about 0.01."""
    lam = lambda_star(5)
    above = check_condition_a1(5, lam + 0.05, 0.0, eps_list=(0.01, 0.007, 0.005))
    below = check_condition_a1(5, lam - 0.05, 0.0, eps_list=(0.01, 0.007, 0.005))
    assert all(r.passes for r in above.rows)
    assert not any(r.passes for r in below.rows)


def test_condition_a0_n7_passes():
    rep = check_condition_a0(7, 2.2, 0.0)
    assert all(r.passes for r in rep.rows)
    assert rep.met


def test_condition_n4_above_one_passes():
    """E - λP has coefficient (1 - λ)·8π² on ε²|ln ε|, negative for λ > 1."""
    rep = check_condition_a1(4, 3.0, 0.0)
    assert all(r.passes for r in rep.rows)


def test_condition_n3_uses_envelope_family():
    rep = check_condition_a1(3, 1.4, 0.0, eps_list=(0.1, 0.05))
    assert rep.family == "v"
    rep = check_condition_a0(3, 1.4, 0.0, eps_list=(0.1, 0.05))
    assert rep.family == "vhat" and rep.form == "quotient"


def test_condition_with_mu_runs_fiber():
    rep = check_condition_a0(5, 1.0, 0.5, q=2.5, eps_list=(0.1, 0.05))
    assert rep.family == "uhat" and rep.form == "level"
    assert all(math.isfinite(r.level) for r in rep.rows)


def test_report_trend():
    rows = (ConditionRow(0.1, 0.9, 1.0, True), ConditionRow(0.05, 0.99, 1.0, True))
    rep = ConditionReport(5, 1, 1.0, 0.0, 2.0, "u", "level", rows)
    assert rep.normalized_margins == pytest.approx((10.0, 4.0))
    assert not rep.trend_widening and not rep.met
