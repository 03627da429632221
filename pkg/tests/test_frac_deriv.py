import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracmim.frac_deriv import (
    FractionalOrder,
    QuadratureConfig,
    QuadratureError,
    Regime,
    SmoothFunction,
    _product_integral,
    agreement_curves,
    caputo_eval,
    cosine,
    exponential,
    monomial,
    reference_closed_form,
    shift_term,
    sine,
    tcaputo_eval,
)

HALF = FractionalOrder(0.5)
# oracle values: closed forms evaluated at 30 digits
INV_GAMMA_1_5 = 1.1283791670955126
TWO_OVER_GAMMA_2_5 = 1.5045055561273501
SIX_OVER_GAMMA_3_5 = 1.8054066673528201


def constant(c=3.0):
    zero = lambda t: np.zeros_like(np.asarray(t, dtype=float))  # noqa: E731
    return SmoothFunction((lambda t: c + 0 * np.asarray(t, dtype=float), zero, zero, zero))


@pytest.mark.parametrize(
    "alpha, regime, n",
    [(0.3, Regime.SUB_ONE, 1), (1.0, Regime.INTEGER, 1), (1.5, Regime.BAND, 2), (3.0, Regime.INTEGER, 3)],
)
def test_order_regimes(alpha, regime, n):
    order = FractionalOrder(alpha)
    assert order.regime is regime and order.n == n


@pytest.mark.parametrize("alpha", [0.0, -1.0, float("nan"), float("inf")])
def test_order_validation(alpha):
    with pytest.raises(ValueError):
        FractionalOrder(alpha)


def test_quadrature_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(panels_per_unit_time=4)


def test_missing_derivative_is_rejected():
    u = SmoothFunction((np.sin, np.cos))
    with pytest.raises(ValueError):
        tcaputo_eval(u, HALF, 1.0)


def test_caputo_examples():
    assert caputo_eval(monomial(1), HALF, 1.0) == pytest.approx(INV_GAMMA_1_5, rel=1e-10)
    assert caputo_eval(monomial(2), HALF, 1.0) == pytest.approx(TWO_OVER_GAMMA_2_5, rel=1e-10)
    for alpha in (0.2, 0.7):
        for t in (0.3, 4.0):
            assert caputo_eval(constant(), FractionalOrder(alpha), t) == 0.0


def test_tcaputo_examples():
    for t in (0.1, 1.0, 7.5):
        assert tcaputo_eval(monomial(1), HALF, t) == 0.0
    assert tcaputo_eval(monomial(2), HALF, 1.0) == pytest.approx(TWO_OVER_GAMMA_2_5, rel=1e-10)
    assert tcaputo_eval(monomial(2), FractionalOrder(1), 1.0) == 2.0


def test_time_must_be_positive():
    with pytest.raises(ValueError):
        caputo_eval(monomial(2), HALF, 0.0)


def test_shift_term_examples():
    assert shift_term(0.0, HALF, 1.0) == 0.0
    assert shift_term(1.0, HALF, 1.0) == pytest.approx(INV_GAMMA_1_5, rel=1e-14)
    with pytest.raises(ValueError):
        shift_term(1.0, FractionalOrder(2), 1.0)
    for t in (0.5, 1.0, 2.0):
        diff = caputo_eval(monomial(1), HALF, t) - tcaputo_eval(monomial(1), HALF, t)
        assert abs(diff - shift_term(1.0, HALF, t)) <= 1e-7


def test_reference_closed_form_examples():
    c, tc = reference_closed_form("monomial", HALF, 1.0, p=3)
    assert c == pytest.approx(SIX_OVER_GAMMA_3_5, rel=1e-14) and tc == c
    c, tc = reference_closed_form("monomial", HALF, 1.0, p=1)
    assert c == pytest.approx(INV_GAMMA_1_5, rel=1e-14) and tc == pytest.approx(0.0, abs=1e-15)
    assert reference_closed_form("exp", HALF, 0.0) == (0.0, 0.0)
    with pytest.raises(ValueError):
        reference_closed_form("gaussian", HALF, 1.0)
    with pytest.raises(ValueError):
        reference_closed_form("exp", FractionalOrder(1.5), 1.0)


@pytest.mark.parametrize("alpha", [0.1, 0.5, 0.9])
@pytest.mark.parametrize("t", [0.5, 1.0, 5.0, 12.0])
@pytest.mark.parametrize("fid, p", [("exp", None), ("monomial", 3), ("monomial", 4)])
def test_quadrature_matches_closed_form(alpha, t, fid, p):
    order = FractionalOrder(alpha)
    u = exponential() if fid == "exp" else monomial(p)
    c, tc = reference_closed_form(fid, order, t, p=p)
    assert caputo_eval(u, order, t) == pytest.approx(c, rel=1e-8)
    assert tcaputo_eval(u, order, t) == pytest.approx(tc, rel=1e-8, abs=1e-8 * abs(c))


@pytest.mark.parametrize("alpha", [1.2, 1.7])
def test_band_quadrature_matches_closed_form(alpha):
    order = FractionalOrder(alpha)
    for p in (2, 3, 5):
        c, tc = reference_closed_form("monomial", order, 2.0, p=p)
        assert caputo_eval(monomial(p), order, 2.0) == pytest.approx(c, rel=1e-8)
        assert tcaputo_eval(monomial(p), order, 2.0) == pytest.approx(tc, rel=1e-8, abs=1e-8 * c)


def _probe_fns():
    return {"t": monomial(1), "t2": monomial(2), "t3": monomial(3), "exp": exponential(), "cos": cosine(), "sin": sine()}


@pytest.mark.parametrize("name", ["t", "t2", "t3", "exp", "cos"])
@pytest.mark.parametrize("alpha", [0.1, 0.5, 0.9])
@pytest.mark.parametrize("t", [0.5, 1.0, 5.0])
def test_shift_identity_sub_one(name, alpha, t):
    u = _probe_fns()[name]
    order = FractionalOrder(alpha)
    u1_0 = float(u.derivative(1)(np.float64(0.0)))
    residual = caputo_eval(u, order, t) - tcaputo_eval(u, order, t) - shift_term(u1_0, order, t)
    assert abs(residual) <= 1e-6


@pytest.mark.parametrize("name", ["t2", "t3", "sin"])
@pytest.mark.parametrize("alpha", [1.1, 1.5, 1.9])
@pytest.mark.parametrize("t", [0.5, 1.0, 5.0])
def test_shift_identity_band(name, alpha, t):
    u = _probe_fns()[name]
    order = FractionalOrder(alpha)
    u2_0 = float(u.derivative(2)(np.float64(0.0)))
    residual = caputo_eval(u, order, t) - tcaputo_eval(u, order, t) - shift_term(u2_0, order, t)
    assert abs(residual) <= 1e-6


@pytest.mark.parametrize("t", [0.5, 1.0])
def test_derivative_commutes_with_tcaputo(t):
    u = monomial(3)
    step = 1e-4
    fd = (tcaputo_eval(u, HALF, t + step) - tcaputo_eval(u, HALF, t - step)) / (2 * step)
    assert abs(fd - caputo_eval(u.shifted(1), HALF, t)) <= 1e-4


@pytest.mark.parametrize("name", ["t2", "t3", "exp", "cos", "sin"])
@pytest.mark.parametrize("t", [0.25, 1.0, 3.0])
def test_integer_order_identity(name, t):
    u = _probe_fns()[name]
    d1 = u.derivative(1)
    assert tcaputo_eval(u, FractionalOrder(1), t) == d1(np.float64(t)) - d1(np.float64(0.0))


@pytest.mark.parametrize("alpha, mu_shift", [(0.3, 0), (0.3, 1), (0.8, 0), (1.4, 0)])
def test_quadrature_second_order(alpha, mu_shift):
    # raw product rule without refinement: error drops ~4x per halving
    order = FractionalOrder(alpha)
    n = order.n
    u = exponential()
    if mu_shift == 0:
        mu, g, norm = n - 1 - alpha, u.derivative(n), math.gamma(n - alpha)
        exact = reference_closed_form("exp", order, 1.0)[0] if n == 1 else None
    else:
        mu, g, norm = n - alpha, u.derivative(n + 1), math.gamma(n + 1 - alpha)
        exact = reference_closed_form("exp", order, 1.0)[1]
    if exact is None:
        # exp has u^(n) = exp: Caputo of exp for n = 2 equals that of n = 1 shifted order
        exact = reference_closed_form("exp", FractionalOrder(alpha - 1), 1.0)[0]
    errs = [abs(_product_integral(g, mu, 1.0, n)[0] / norm - exact) for n in (8, 16, 32, 64)]
    for e0, e1 in zip(errs, errs[1:]):
        assert e0 / e1 >= 3.0


def test_nonconvergence_raises():
    wild = SmoothFunction((lambda t: np.sin(4000 * t),) * 3)
    cfg = QuadratureConfig(panels_per_unit_time=8, refinement_cap=1)
    with pytest.raises(QuadratureError):
        caputo_eval(wild, HALF, 1.0, cfg)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.05, 8.0))
def test_caputo_exp_property(alpha, t):
    order = FractionalOrder(alpha)
    c, tc = reference_closed_form("exp", order, t)
    assert caputo_eval(exponential(), order, t) == pytest.approx(c, rel=1e-7)
    assert tcaputo_eval(exponential(), order, t) == pytest.approx(tc, rel=1e-7, abs=1e-7 * c)


def test_agreement_curves_small_window():
    rows = agreement_curves("cos", [0.5], t_max=1e-3, samples=2)
    assert len(rows) == 2
    for r in rows:
        assert abs(r.caputo) < 1e-4 and abs(r.tcaputo) < 1e-4
        assert abs(r.caputo - r.tcaputo) <= 1e-6


def test_agreement_curves_shape_and_regime_checks():
    rows = agreement_curves("sin", [1.3, 1.6], t_max=5.0, samples=10)
    assert len(rows) == 20
    assert [r.t for r in rows[:10]] == pytest.approx(np.linspace(0.5, 5.0, 10))
    with pytest.raises(ValueError):
        agreement_curves("cos", [1.5], 20.0, 10)
    with pytest.raises(ValueError):
        agreement_curves("sin", [0.5], 20.0, 10)
    with pytest.raises(ValueError):
        agreement_curves("tan", [0.5], 20.0, 10)
    with pytest.raises(ValueError):
        agreement_curves("cos", [0.5], 20.0, 1)
