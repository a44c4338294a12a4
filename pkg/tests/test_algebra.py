from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from dunkl_harmonics.algebra import (RadialFunction, SparsePolynomial, dunkl_apply,
                                     dunkl_factorial, dunkl_laplacian, harmonic_projection,
                                     homogeneous_basis, operator_apply, parity_of)
from dunkl_harmonics.model import DomainError, PreconditionError

HALF = Fraction(1, 2)


def mono(q, c=1):
    return SparsePolynomial.monomial(q, Fraction(c))


def dunkl_fd(f, alpha, j, x, h=1e-5):
    """D_j f(x) = d_j f(x) + alpha_j (f(x) - f(sigma_j x)) / x_j by central differences."""
    x = np.asarray(x, dtype=float)
    e = np.zeros_like(x)
    e[j] = h
    refl = x.copy()
    refl[j] = -refl[j]
    return (f(x + e) - f(x - e)) / (2 * h) + alpha[j] * (f(x) - f(refl)) / x[j]


small_poly = st.dictionaries(
    st.tuples(st.integers(0, 4), st.integers(0, 4)),
    st.fractions(-5, 5, max_denominator=7), min_size=1, max_size=6)


def test_single_variable_examples():
    a = (Fraction(1, 2), Fraction(3, 2))
    assert dunkl_apply(0, mono((1, 0)), a) == SparsePolynomial.constant(1 + 2 * a[0], 2)
    assert dunkl_apply(1, mono((0, 2)), a) == mono((0, 1), 2)
    assert dunkl_apply(0, mono((3, 0)), a) == mono((2, 0), 4)


def test_radial_power():
    mu = Fraction(3, 2)
    f = RadialFunction.power_of_norm(mu, 2, c=Fraction(1))
    g = dunkl_apply(0, f, (1, HALF))
    assert g.terms == {((1, 0), 1): -2 * mu}


def test_laplacian_examples():
    a = (Fraction(1, 3), Fraction(2))
    assert dunkl_laplacian(SparsePolynomial.constant(Fraction(5), 2), a).is_zero()
    Y = mono((2, 0), 1 + 2 * a[1]) - mono((0, 2), 1 + 2 * a[0])
    assert dunkl_laplacian(Y, a).is_zero()
    r2 = SparsePolynomial.norm_squared(3, Fraction(1))
    assert dunkl_laplacian(r2, (0, 0, 0)) == SparsePolynomial.constant(6, 3)


def test_factorial():
    al = Fraction(2, 5)
    assert dunkl_factorial(0, al) == 1
    assert dunkl_factorial(1, al) == 1 + 2 * al
    assert dunkl_factorial(3, al) == 2 * (1 + 2 * al) * (3 + 2 * al)


def test_operator_apply_examples():
    a = (Fraction(1, 2), Fraction(3, 4))
    target = mono((1, 1))
    assert operator_apply(mono((1, 0)), target, a) == dunkl_apply(0, target, a)
    out = operator_apply(mono((1, 1)), target, a)
    assert out == SparsePolynomial.constant((1 + 2 * a[0]) * (1 + 2 * a[1]), 2)


def test_parity():
    assert parity_of(mono((2, 1))) == (0, 1)
    assert parity_of(mono((1, 0)) + mono((2, 0))) == "mixed"
    assert parity_of(SparsePolynomial.norm_squared(2)) == (0, 0)
    with pytest.raises(PreconditionError):
        parity_of(SparsePolynomial({}, 2))


@given(small_poly, st.fractions(0, 3, max_denominator=4), st.fractions(0, 3, max_denominator=4))
@settings(max_examples=60, deadline=None)
def test_operators_commute(terms, a0, a1):
    f = SparsePolynomial(terms, 2)
    a = (a0, a1)
    lhs = dunkl_apply(0, dunkl_apply(1, f, a), a)
    rhs = dunkl_apply(1, dunkl_apply(0, f, a), a)
    assert lhs == rhs


@given(small_poly, st.floats(0, 3), st.floats(0, 3))
@settings(max_examples=40, deadline=None)
def test_polynomial_matches_definition(terms, a0, a1):
    f = SparsePolynomial(terms, 2).to_float()
    a = (a0, a1)
    x = np.array([0.7, -1.1])
    for j in range(2):
        g = dunkl_apply(j, f, a)
        assert_allclose(g(x), dunkl_fd(f, a, j, x), rtol=1e-6, atol=1e-6)


def test_radial_function_matches_definition():
    a = (0.5, 1.25, 0.0)
    mu = sum(a) + 1.0
    f = RadialFunction({((2, 1, 0), 0): 1.5, ((0, 0, 1), 1): -0.5}, mu, 3)
    x = np.array([0.8, -0.6, 1.1])
    for j in range(3):
        g = dunkl_apply(j, f, a)
        assert_allclose(g(x), dunkl_fd(f, a, j, x), rtol=1e-7)


def test_kelvin_seed_is_harmonic():
    a = (Fraction(1, 3), Fraction(5, 2), Fraction(1))
    mu = sum(a) + HALF
    f = RadialFunction.power_of_norm(mu, 3, c=Fraction(1))
    assert dunkl_laplacian(f, a).is_zero()
    # a wrong exponent is not harmonic
    g = RadialFunction.power_of_norm(mu, 3, s=1, c=Fraction(1))
    assert not dunkl_laplacian(g, a).is_zero()


def test_canonical_form_is_pointwise_identity():
    mu = Fraction(3, 4)
    f = RadialFunction({((2, 3), 0): Fraction(2), ((1, 4), 2): Fraction(-1, 3), ((0, 2), 1): Fraction(5)}, mu, 2)
    c = f.canonical()
    assert all(q[-1] < 2 for (q, s) in c.terms)
    for x in ([0.3, 0.9], [-1.2, 0.4], [2.0, -0.1]):
        assert_allclose(c(x), f(x), rtol=1e-12)
    # x_1^2 |x|^(-2) + x_0^2 |x|^(-2) - 1 vanishes identically
    z = RadialFunction({((0, 2), 1): 1, ((2, 0), 1): 1, ((0, 0), 0): -1}, mu, 2)
    assert z.is_zero()


def test_exact_evaluation_handles_cancellation():
    # a term sum that cancels to about 1e-15 of its parts
    mu = Fraction(1, 2)
    big = RadialFunction({((0, 0), 0): Fraction(10**15), ((2, 0), 1): Fraction(-10**15), ((0, 2), 1): Fraction(-10**15),
                          ((1, 1), 1): Fraction(1)}, mu, 2)
    x = (0.6, 0.8)
    want = 0.6 * 0.8
    assert big(x, exact=True) == pytest.approx(want, rel=1e-14)
    assert big((Fraction(3, 5), Fraction(4, 5))) == pytest.approx(want, rel=1e-14)


def test_origin_is_singular():
    f = RadialFunction.power_of_norm(1, 2)
    with pytest.raises(DomainError):
        f((0, 0))


@pytest.mark.parametrize("m", range(5))
def test_harmonic_projection(m):
    a = (Fraction(1, 2), Fraction(1), Fraction(3, 2))
    mu = sum(a) + HALF
    for q in homogeneous_basis(3, m):
        Y = harmonic_projection(mono(q), a, mu)
        assert dunkl_laplacian(Y, a).is_zero()


def test_homogeneous_basis_parity():
    basis = homogeneous_basis(3, 4, (0, 1, 1))
    assert basis and all(sum(q) == 4 and q[1] % 2 == 1 and q[2] % 2 == 1 and q[0] % 2 == 0 for q in basis)


def test_json_roundtrip():
    f = RadialFunction({((1, 0), 2): Fraction(-3, 7), ((0, 1), 0): Fraction(2)}, Fraction(5, 2), 2)
    g = RadialFunction.from_json(f.to_json())
    assert g.terms == f.terms and g.mu == f.mu
    p = SparsePolynomial({(2, 1): Fraction(1, 3)}, 2)
    assert SparsePolynomial.from_json(p.to_json()) == p


def test_exact_evaluation_beyond_float_range():
    # the rational inner sum is 1e400; the radial factor brings the value back
    f = RadialFunction({((0, 0), 200): Fraction(10) ** 400}, Fraction(1), 2)
    assert f((Fraction(10), Fraction(0))) == pytest.approx(1e-2, rel=1e-14)
