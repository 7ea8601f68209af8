import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.special import beta as beta_fn

from fracac.caputo import (TimeHistory, caputo_direct, caputo_of_monomial, l1_apply,
                           l1_weights)
from fracac.errors import NonConvergence


def monomial_oracle(p, t, alpha):
    # int_0^t p tau^(p-1) (t - tau)^-alpha dtau = p B(p, 1-alpha) t^(p-alpha)
    return p * beta_fn(p, 1 - alpha) * t ** (p - alpha)


def test_direct_zero_and_linear():
    assert caputo_direct(lambda x: np.zeros_like(x), 1.0, 0.4) == 0.0
    assert caputo_direct(lambda x: np.ones_like(x), 1.0, 0.3) == pytest.approx(10 / 7, abs=1e-12)


def test_direct_square():
    expected = math.gamma(3) * math.gamma(0.5) / math.gamma(2.5) * 2**1.5
    assert expected == pytest.approx(monomial_oracle(2, 2.0, 0.5), rel=1e-14)
    assert caputo_direct(lambda x: 2 * x, 2.0, 0.5) == pytest.approx(expected, abs=1e-10)


def test_monomial_formula():
    assert caputo_of_monomial(1, 0.8, 0.3) == pytest.approx(0.8**0.7 / 0.7, rel=1e-14)
    # alpha -> 0 leaves the plain integral of u', i.e. u(t) - u(0)
    assert caputo_of_monomial(2, 0.6, 1e-9) == pytest.approx(0.6**2, rel=1e-8)
    for p, t, a in [(1.5, 0.7, 0.6), (3.0, 1.3, 0.2), (0.5, 2.0, 0.8)]:
        assert caputo_of_monomial(p, t, a) == pytest.approx(monomial_oracle(p, t, a), rel=1e-13)


def test_monomial_vs_direct():
    v = caputo_direct(lambda x: 1.5 * np.sqrt(x), 0.7, 0.6, tol=1e-11)
    assert abs(v - caputo_of_monomial(1.5, 0.7, 0.6)) < 1e-8


def test_textbook_normalisation_spot_check():
    # standard Caputo derivative of t^2 is 2 t^(2-alpha) / Gamma(3-alpha)
    alpha, t = 0.4, 1.7
    textbook = 2 * t ** (2 - alpha) / math.gamma(3 - alpha)
    assert caputo_of_monomial(2, t, alpha) / math.gamma(1 - alpha) == pytest.approx(textbook, rel=1e-13)


def test_direct_budget():
    with pytest.raises(NonConvergence):
        caputo_direct(lambda x: np.sign(np.sin(1e4 * x)), 1.0, 0.5, tol=1e-14, max_panels=50)


def test_l1_weights():
    w = l1_weights(1, 0.01, 0.3)
    assert w.w[0] == pytest.approx(0.01**0.7 / 0.7, rel=1e-15)
    w = l1_weights(17, 0.01, 0.4)
    assert abs(w.w.sum() - (17 * 0.01) ** 0.6 / 0.6) < 1e-14
    w = l1_weights(100, 0.05, 0.7)
    assert np.all(w.w > 0) and np.all(np.diff(w.w) < 0)


def test_l1_constant_and_linear():
    assert np.all(l1_apply(TimeHistory(0.1, np.full((11, 3), 2.5), 0.5)) == 0.0)
    for alpha in (0.3, 0.5, 0.7):
        for m, dt in ((1, 0.3), (37, 0.01), (200, 1 / 64)):
            t = dt * np.arange(m + 1)
            val = l1_apply(TimeHistory(dt, t, alpha))
            assert abs(val - (m * dt) ** (1 - alpha) / (1 - alpha)) < 1e-13


def test_l1_order_on_square():
    alpha = 0.5
    dts = [1 / 40, 1 / 80, 1 / 160, 1 / 320, 1 / 640]
    errs = []
    for dt in dts:
        m = round(1 / dt)
        t = np.arange(m + 1) / m
        errs.append(abs(l1_apply(TimeHistory(1 / m, t**2, alpha)) - caputo_of_monomial(2, 1.0, alpha)))
    slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
    assert abs(slope - 1.5) < 0.1


@settings(max_examples=50, deadline=None)
@given(arrays(float, (12, 4), elements=st.floats(-10, 10)),
       arrays(float, (12, 4), elements=st.floats(-10, 10)),
       st.floats(-3, 3), st.floats(-3, 3), st.floats(0.05, 0.95))
def test_l1_linearity(u, v, a, b, alpha):
    lhs = l1_apply(TimeHistory(0.1, a * u + b * v, alpha))
    rhs = a * l1_apply(TimeHistory(0.1, u, alpha)) + b * l1_apply(TimeHistory(0.1, v, alpha))
    assert np.allclose(lhs, rhs, rtol=0, atol=1e-13 * (1 + np.abs(rhs).max()) * 100)


@settings(max_examples=50, deadline=None)
@given(arrays(float, 20, elements=st.floats(0, 5)), st.floats(0.05, 0.95))
def test_l1_nonnegative_for_increasing(incr, alpha):
    u = np.concatenate([[0.0], np.cumsum(incr)])
    assert l1_apply(TimeHistory(0.05, u, alpha)) >= 0
