import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose
from scipy import special

from dunkl_harmonics.algebra import dunkl_factorial
from dunkl_harmonics.model import DomainError
from dunkl_harmonics.orthopoly import (JacobiParams, a_n_const, b_n_const, gauss_jacobi_rule,
                                       gegenbauer_c, jacobi_p, jacobi_p_coeffs,
                                       jacobi_p_derivative, jacobi_q, pochhammer)


def q_oracle(n, a, b, x):
    """Jacobi function of the second kind from its hypergeometric representation."""
    c = math.exp((n + a + b) * math.log(2) + math.lgamma(n + a + 1) + math.lgamma(n + b + 1)
                 - math.lgamma(2 * n + a + b + 2))
    return (c * (x - 1) ** (-n - a - 1) * (x + 1) ** (-b)
            * special.hyp2f1(n + 1, n + a + 1, 2 * n + a + b + 2, 2 / (1 - x)))


def test_jacobi_p_small():
    jp = JacobiParams(0, 0)
    assert jacobi_p(0, jp, 0.3) == 1
    assert jacobi_p(2, jp, 0.5) == pytest.approx(-0.125)
    assert jacobi_p(2, jp, Fraction(1, 2)) == Fraction(-1, 8)


@given(st.integers(0, 10), st.floats(-0.9, 3.0), st.floats(-0.9, 3.0), st.floats(-1, 1))
def test_jacobi_p_matches_scipy(n, a, b, t):
    assert_allclose(jacobi_p(n, JacobiParams(a, b), t), special.eval_jacobi(n, a, b, t),
                    rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("n", range(9))
@pytest.mark.parametrize("ab", [(Fraction(0), Fraction(0)), (Fraction(1, 2), Fraction(3, 2)),
                                (Fraction(-1, 3), Fraction(2))])
def test_monic_normalisation(n, ab):
    jp = JacobiParams(*ab)
    c = jacobi_p_coeffs(n, jp)
    assert c[-1] * a_n_const(n, jp) == 1
    t = Fraction(2, 7)
    assert sum(ci * t**i for i, ci in enumerate(c)) == jacobi_p(n, jp, t)


def test_constants():
    jp = JacobiParams(Fraction(1, 2), Fraction(3, 2))
    assert a_n_const(0, jp) == 1
    assert a_n_const(1, jp) == Fraction(2) / (jp.alpha + jp.beta + 2)
    assert b_n_const(0, JacobiParams(0, 0)) == pytest.approx(1.0)
    assert pochhammer(Fraction(1, 2), 3) == Fraction(15, 8)
    assert pochhammer(2.5, 0) == 1.0


def test_q_legendre_closed_form():
    jp = JacobiParams(0, 0)
    assert jacobi_q(0, jp, 2.0) == pytest.approx(0.5 * math.log(3), rel=1e-13)
    q, dq = jacobi_q(0, jp, 3.0, derivative=True)
    assert_allclose(dq, 1 / (1 - 9.0), rtol=1e-12)
    # Wronskian of P_0 = 1 and Q_0 at t = 3
    assert q * 0 - 1 * dq == pytest.approx(1 / 8, rel=1e-12)


@pytest.mark.parametrize("n", range(5))
@pytest.mark.parametrize("ab", [(0.0, 0.0), (0.5, 1.5), (2.0, 0.25), (-0.5, 0.5)])
@pytest.mark.parametrize("t", [1.05, 1.7, 4.0, 30.0])
def test_q_matches_hypergeometric(n, ab, t):
    assert_allclose(jacobi_q(n, JacobiParams(*ab), t), q_oracle(n, *ab, t), rtol=1e-11)


@pytest.mark.parametrize("ab", [(0.0, 0.0), (0.5, 1.5)])
def test_q_normalised_at_infinity(ab):
    n = 2
    jp = JacobiParams(*ab)
    t = 1e4
    assert b_n_const(n, jp) * jacobi_q(n, jp, t) * t ** (n + sum(ab) + 1) == pytest.approx(1, rel=1e-3)


def test_q_domain():
    with pytest.raises(DomainError):
        jacobi_q(1, JacobiParams(0, 0), 0.5)


def test_p_derivative():
    jp = JacobiParams(0.5, 1.5)
    h = 1e-6
    for t in (-0.4, 0.3, 2.0):
        fd = (jacobi_p(4, jp, t + h) - jacobi_p(4, jp, t - h)) / (2 * h)
        assert jacobi_p_derivative(4, jp, t) == pytest.approx(fd, rel=1e-7)


def test_gauss_legendre_two_points():
    r = gauss_jacobi_rule(2, 0, 0)
    assert_allclose(np.sort(r.nodes), [-1 / math.sqrt(3), 1 / math.sqrt(3)], rtol=1e-14)
    assert_allclose(r.weights, [1, 1], rtol=1e-14)


@given(st.integers(1, 40), st.floats(-0.95, 4), st.floats(-0.95, 4))
@settings(max_examples=50)
def test_weights_sum_to_beta_integral(N, a, b):
    r = gauss_jacobi_rule(N, a, b)
    beta = math.exp((a + b + 1) * math.log(2) + math.lgamma(a + 1) + math.lgamma(b + 1) - math.lgamma(a + b + 2))
    assert_allclose(r.weights.sum(), beta, rtol=1e-11)


@pytest.mark.parametrize("N,a,b", [(5, 0.5, -0.5), (12, 1.0, 2.0), (20, -0.5, -0.5)])
def test_rule_matches_scipy(N, a, b):
    x, w = special.roots_jacobi(N, a, b)
    r = gauss_jacobi_rule(N, a, b)
    order = np.argsort(r.nodes)
    assert_allclose(r.nodes[order], x, atol=1e-13)
    assert_allclose(r.weights[order], w, rtol=1e-11)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.5])
def test_tau_moments(alpha):
    # with weight c (1 - t)^(alpha - 1) (1 + t)^alpha the m-th moment of t is m!/D^m(x^m)
    r = gauss_jacobi_rule(30, alpha - 1, alpha)
    c = math.exp(math.lgamma(alpha + 0.5) - math.lgamma(0.5) - math.lgamma(alpha))
    for m in range(7):
        assert_allclose(c * r.integrate(lambda t: t**m), math.factorial(m) / dunkl_factorial(m, alpha),
                        rtol=1e-12)


def test_gegenbauer():
    assert gegenbauer_c(0, 1.3, 0.2) == 1
    assert gegenbauer_c(1, 1.3, 0.2) == pytest.approx(2 * 1.3 * 0.2)
    for m in range(8):
        assert_allclose(gegenbauer_c(m, 0.75, 0.4), special.eval_gegenbauer(m, 0.75, 0.4), rtol=1e-12)
    # generating function at u = 1
    s, mu = 0.5, 0.8
    total = sum(gegenbauer_c(m, mu, 1.0) * s**m for m in range(80))
    assert total == pytest.approx((1 - s) ** (-2 * mu), rel=1e-12)
