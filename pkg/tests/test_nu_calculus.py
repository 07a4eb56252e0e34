import math

import numpy as np
import pytest

from conftest import rel_err
from nucalc import (
    CANONICAL,
    ConvergenceError,
    DomainError,
    EpsilonSchedule,
    MLParams,
    UnsupportedRegimeError,
    ValidationError,
    closed_form_deriv,
    compose_deriv,
    deriv_chain,
    deriv_limit,
    deriv_ml2,
    deriv_ml2_n,
    deriv_n,
    integral,
    integral_ml2,
    integral_power_kernel,
    nu_constant,
    parse,
)
from nucalc.harness import NumericFn
from nucalc.nu_calculus import CLOSED_FORM_KINDS, generating_expression, nth_derivative
from nucalc.quadrature import QuadratureControl

P2 = MLParams(0.7, 2.2, 1.4, 2.9, 0.0)
P3 = MLParams(1.9, 0.6, 0.8, 1.5, 0.5)


def test_chain_form():
    assert deriv_chain(parse("t^2"), 1.0, 0.5) == 2.0
    c = nu_constant(P3)
    assert deriv_chain(parse("exp(t)"), 2.0, 0.4, P3) == pytest.approx(c * 2.0 ** 0.6 * math.exp(2.0), rel=1e-14)
    ts = np.array([0.5, 1.0, 4.0])
    np.testing.assert_allclose(deriv_chain(parse("t^3"), ts, 0.5), 3 * ts ** 2.5, rtol=1e-14)


def test_chain_mu_one_is_ordinary_derivative():
    f = parse("sin(t)*exp(t)")
    assert deriv_chain(f, 0.8, 1.0) == pytest.approx(f.eval_d(0.8).derivative, rel=1e-15)


@pytest.mark.parametrize("mu", [0.0, -0.2, 1.2])
def test_chain_order_domain(mu):
    with pytest.raises(DomainError):
        deriv_chain(parse("t"), 1.0, mu)


def test_chain_time_domain():
    with pytest.raises(DomainError):
        deriv_chain(parse("t"), 0.0, 0.5)


@pytest.mark.parametrize("src", ["t^2", "exp(t)", "sin(t)"])
@pytest.mark.parametrize("mu", [0.3, 0.5, 0.9])
def test_limit_agrees_with_chain(src, mu):
    f = parse(src)
    res = deriv_limit(f, 1.3, mu)
    assert rel_err(res.value, deriv_chain(f, 1.3, mu)) < 1e-9
    assert 0.85 <= res.observed_order <= 1.15
    assert [e for e, _ in res.per_eps] == [1e-2, 1e-3, 1e-4, 1e-5, 1e-6]


def test_limit_random_params_and_index():
    f = parse("exp(t)")
    res = deriv_limit(f, 0.7, 0.6, P2, i=3)
    assert rel_err(res.value, deriv_chain(f, 0.7, 0.6, P2)) < 1e-8


def test_limit_without_extrapolation():
    f = parse("t^2")
    res = deriv_limit(f, 1.0, 0.5, sched=EpsilonSchedule((1e-3, 1e-4, 1e-5, 1e-6), extrapolate=False))
    assert res.value == res.per_eps[-1][1]
    assert rel_err(res.value, 2.0) < 1e-5


def test_limit_regime_errors():
    with pytest.raises(UnsupportedRegimeError):
        deriv_limit(parse("t"), 1.0, 0.5, P3)
    with pytest.raises(DomainError):
        deriv_limit(parse("t"), 1.0, 0.5, i=0)


def test_limit_nonconvergence_is_reported():
    # derivative blows up faster than the schedule can resolve
    f = parse("sin(1/(t - 1))")
    with pytest.raises((ConvergenceError, DomainError)):
        deriv_limit(f, 1.0 + 1e-4, 0.5)


@pytest.mark.parametrize("vals", [(), (1e-3, 1e-2), (1e-2, -1e-3), (1e-2, math.inf)])
def test_schedule_validation(vals):
    with pytest.raises(ValidationError):
        EpsilonSchedule(vals)


def test_nth_derivative_helper():
    f = parse("t^5")
    assert nth_derivative(f, 1.0, 0) == 1.0
    assert nth_derivative(f, 1.0, 1) == 5.0
    assert nth_derivative(f, 1.0, 2) == pytest.approx(20.0, rel=1e-6)
    assert nth_derivative(f, 1.0, 3) == pytest.approx(60.0, rel=1e-4)


@pytest.mark.parametrize("n, mu, want", [(1, 1.5, 6.0), (0, 0.5, 3.0), (2, 2.5, 6.0)])
def test_deriv_n_polynomial(n, mu, want):
    # t^3 at t = 1: C t^{n+1-mu} d^{n+1}/dt^{n+1} t^3
    res = deriv_n(parse("t^3"), 1.0, mu, n)
    assert rel_err(res.value, want) < 1e-6


def test_deriv_n_order_window():
    with pytest.raises(DomainError):
        deriv_n(parse("t^3"), 1.0, 0.5, 1)
    with pytest.raises(DomainError):
        deriv_n(parse("t^3"), 1.0, 2.5, -1)


def test_integral_golden(golden):
    for case in golden["integral"]:
        got = integral(parse(case["expr"]), case["a"], case["t"], case["mu"], MLParams(*case["params"]))
        assert rel_err(got, case["value"]) < 1e-10, case


def test_integral_basics():
    assert integral(parse("1"), 0.0, 1.0, 0.5) == pytest.approx(2.0, rel=1e-14)
    assert integral(parse("exp(t)"), 0.7, 0.7, 0.5) == 0.0
    res = integral(np.cos, 0.0, 2.0, 0.3, full_output=True)
    assert res.abs_error < 1e-10
    scalar_only = lambda x: math.cos(x)  # noqa: E731
    assert integral(scalar_only, 0.0, 2.0, 0.3, vectorized=False) == pytest.approx(res.value, rel=1e-14)


def test_integral_domain():
    with pytest.raises(DomainError):
        integral(parse("1"), 1.0, 0.5, 0.5)
    with pytest.raises(DomainError):
        integral(parse("1"), -1.0, 0.5, 0.5)
    with pytest.raises(DomainError):
        integral(parse("1"), 0.0, 0.5, 0.0)


def test_ftc_and_inverse_anchors():
    # I(V(t^2)) on [0, 1] at mu = 0.5 is 1
    val = integral(lambda x: deriv_chain(parse("t^2"), np.maximum(x, 1e-300), 0.5), 0.0, 1.0, 0.5)
    assert rel_err(val, 1.0) < 1e-9


def test_compose_deriv_values():
    assert compose_deriv(parse("t^3"), 1.0, 0.3, 0.3) == pytest.approx(8.1, rel=1e-8)
    # the non-commutativity witness: V_0.2 V_0.7 t^2 at 1 is 2.6, V_0.9 t^2 is 2
    witness = compose_deriv(parse("t^2"), 1.0, 0.2, 0.7)
    assert witness == pytest.approx(2.6, rel=1e-8)
    assert abs(witness - deriv_chain(parse("t^2"), 1.0, 0.9)) > 1e-3


def test_compose_deriv_matches_nesting():
    f = parse("sin(2*t) + t^2")
    mu, eta, t = 0.4, 0.75, 1.2
    inner = NumericFn(lambda x: deriv_chain(f, x, eta, P2), h=1e-3)
    nested = deriv_chain(inner, t, mu, P2)
    assert rel_err(compose_deriv(f, t, mu, eta, P2), nested) < 1e-6


@pytest.mark.parametrize("kind", CLOSED_FORM_KINDS)
def test_closed_forms_match_chain(kind):
    a, t, mu = 1.7, 0.9, 0.35
    f = parse(generating_expression(kind, a, mu))
    assert rel_err(closed_form_deriv(kind, a, t, mu, P3), deriv_chain(f, t, mu, P3)) < 1e-12


def test_eigenfunctions_canonical():
    t, mu = 1.4, 0.6
    u = t ** mu / mu
    assert closed_form_deriv("eigen_exp", 0.0, t, mu) == pytest.approx(math.exp(u), rel=1e-15)
    assert closed_form_deriv("eigen_sin", 0.0, t, mu) == pytest.approx(math.cos(u), rel=1e-15)
    assert closed_form_deriv("eigen_cos", 0.0, t, mu) == pytest.approx(-math.sin(u), rel=1e-15)


def test_closed_form_unknown_kind():
    with pytest.raises(ValidationError):
        closed_form_deriv("tan_at", 1.0, 1.0, 0.5)


def test_deriv_ml2_anchor():
    assert rel_err(deriv_ml2(1.0, 1.0, 1.0, 0.5), math.e) < 1e-12
    assert rel_err(deriv_ml2_n(1.0, 1.0, 1.0, 1.5, 1), math.e) < 1e-12


def test_deriv_ml2_n_golden(golden):
    for case in golden["deriv_ml2_n"]:
        got = deriv_ml2_n(case["lambda"], case["delta"], case["t"], case["mu"], case["n"],
                          MLParams(*case["params"]))
        assert rel_err(got, case["value"]) < 1e-9, case


def test_integral_ml2_golden(golden):
    for case in golden["integral_ml2"]:
        got = integral_ml2(case["lambda"], case["delta"], case["a"], case["t"], case["mu"],
                           MLParams(*case["params"]))
        assert rel_err(got, case["value"]) < 1e-9, case


def test_integral_ml2_anchor_and_lower_limit_continuity(golden):
    anchor = golden["integral_ml2_anchor"]
    assert rel_err(integral_ml2(1.0, 1.0, 0.0, 1.0, 0.5), anchor) < 1e-12
    # moving a from 0 to 1e-8 drops about a^mu/mu = 2e-4, not under 1e-7
    shifted = integral_ml2(1.0, 1.0, 1e-8, 1.0, 0.5)
    assert rel_err(shifted, golden["integral_ml2_shifted"]) < 1e-12
    assert anchor - shifted == pytest.approx(2e-4, rel=1e-3)
    # the gap is below 1e-7 once mu is large enough that a^mu/mu is
    assert abs(integral_ml2(1.0, 1.0, 1e-8, 1.0, 0.95) - integral_ml2(1.0, 1.0, 0.0, 1.0, 0.95)) <= 1e-7
    assert integral_ml2(1.0, 1.0, 0.4, 0.4, 0.5) == 0.0


def test_power_kernel():
    assert rel_err(integral_power_kernel(1.0, 1.0, 0.5), 4.0 / 3.0) < 1e-14
    # direct quadrature of (t - x)^lam x^{mu-1}
    lam, t, mu = 0.6, 1.7, 0.3
    direct = integral(lambda x: (t - x) ** lam, 0.0, t, mu, P2, QuadratureControl(rel_tol=1e-13))
    assert rel_err(integral_power_kernel(lam, t, mu, P2), direct) < 1e-10
    with pytest.raises(DomainError):
        integral_power_kernel(-1.0, 1.0, 0.5)
