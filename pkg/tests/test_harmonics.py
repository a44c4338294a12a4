import math
from fractions import Fraction as Fr

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.special import eval_legendre, gamma

from dunkl_harmonics.algebra import RadialFunction, SparsePolynomial, dunkl_laplacian
from dunkl_harmonics.coords import semi_axes
from dunkl_harmonics.harmonics import (e_norm, e_norm_squared, external_F, external_G,
                                       external_G_radial, harmonic_evaluator, internal_F,
                                       interpolate_G_poly, kelvin_external, reproducing_kernel,
                                       spheroconal_G, spheroconal_G_poly)
from dunkl_harmonics.integrals import sphere_integrate_poly, sphere_rule
from dunkl_harmonics.model import (DomainError, DunklParams, EllipsoidAxes, HarmonicIndex,
                                   PreconditionError, indices_of_degree)

HALF = DunklParams(1, (Fr(1, 2), Fr(1, 2)))
PLANAR = EllipsoidAxes((-1, 1))
P2 = DunklParams(2, (Fr(1, 2), 1, Fr(3, 2)))
AX2 = EllipsoidAxes((0, 1, 3))


def ev(params, axes, n, p):
    return harmonic_evaluator(params, axes, HarmonicIndex(n, p))


def test_quadratic_example():
    e = ev(HALF, PLANAR, (1,), (0, 0))
    G = spheroconal_G_poly(e)
    assert G.terms == {(2, 0): 1, (0, 2): -1}
    assert spheroconal_G(e, (1, 0)) == pytest.approx(1.0, rel=1e-12)
    assert e_norm_squared(e) == pytest.approx(1.5, rel=1e-14)


@pytest.mark.parametrize("alpha", [(Fr(1, 2), Fr(1, 2)), (Fr(1, 3), Fr(5, 2)), (0, Fr(1, 2))])
def test_constant_harmonic(alpha):
    p = DunklParams(1, alpha)
    e = ev(p, PLANAR, (0,), (0, 0))
    a = [float(v) for v in alpha]
    expect = gamma(float(p.mu) + 1) / (2 * gamma(a[0] + 0.5) * gamma(a[1] + 0.5))
    assert e_norm_squared(e) == pytest.approx(expect, rel=1e-13)
    assert internal_F(e, (0.3, -2.0)) == 1.0
    x = np.array([0.6, 0.8])
    assert reproducing_kernel(p, 0, x, x) == pytest.approx(expect, rel=1e-13)


def test_external_legendre_closed_form():
    e = ev(HALF, PLANAR, (0,), (0, 0))
    t0 = (5 + math.sqrt(17)) / 2
    assert external_F(e, (2, 1)) == pytest.approx(0.5 * math.log((t0 + 1) / (t0 - 1)), rel=1e-13)


def test_external_rejects_focal_segment():
    e = ev(HALF, PLANAR, (0,), (0, 0))
    with pytest.raises(DomainError, match="degenerate"):
        external_F(e, (0.5, 0.0))


@pytest.mark.parametrize("n,p", [((1,), (1, 0)), ((0,), (1, 1)), ((2,), (0, 1))])
def test_parity(n, p):
    e = ev(DunklParams(1, (Fr(1, 2), Fr(3, 2))), PLANAR, n, p)
    x = (1.3, 0.7)
    for sx in [(-1, 1), (1, -1), (-1, -1)]:
        y = (sx[0] * x[0], sx[1] * x[1])
        sign = (sx[0] if p[0] else 1) * (sx[1] if p[1] else 1)
        assert internal_F(e, y) == pytest.approx(sign * internal_F(e, x), rel=1e-13)
        assert external_F(e, y) == pytest.approx(sign * external_F(e, x), rel=1e-13)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_planar_g_is_harmonic_exactly(m):
    p = DunklParams(1, (Fr(1, 2), Fr(3, 2)))
    for idx in indices_of_degree(1, m):
        e = harmonic_evaluator(p, PLANAR, idx)
        G = spheroconal_G_poly(e)
        if G.exact:
            assert dunkl_laplacian(G, p.alpha).is_zero()
            Gc = external_G_radial(e)
            assert dunkl_laplacian(Gc, p.alpha).canonical().is_zero()


def test_orthogonality_exact():
    p = DunklParams(1, (Fr(1, 2), Fr(3, 2)))
    for m in (2, 4):
        polys = [spheroconal_G_poly(harmonic_evaluator(p, PLANAR, i)) for i in indices_of_degree(1, m)]
        exact = [G for G in polys if G.exact]
        for i in range(len(exact)):
            for j in range(i):
                assert sphere_integrate_poly(p, exact[i] * exact[j]).is_zero()


@pytest.mark.parametrize("idx", list(indices_of_degree(2, 2)) + list(indices_of_degree(2, 3)))
def test_k2_product_formula_matches_interpolation(idx):
    e = harmonic_evaluator(P2, AX2, idx)
    G = spheroconal_G_poly(e)
    Gi = interpolate_G_poly(e)
    scale = max(abs(float(c)) for c in G.terms.values())
    for q in set(G.terms) | set(Gi.terms):
        assert abs(float(G.coefficient(q)) - Gi.coefficient(q)) < 1e-9 * scale
    lap = dunkl_laplacian(Gi, P2.as_float().alpha)
    assert max((abs(c) for c in lap.terms.values()), default=0.0) < 1e-8 * scale


def test_t_independence_and_f_relation():
    e = harmonic_evaluator(P2, AX2, HarmonicIndex((1, 1), (1, 0, 0)))
    x = np.array([0.3, 0.5, 0.81])
    x /= np.linalg.norm(x)
    g1 = spheroconal_G(e, x, t=4.0)
    g2 = spheroconal_G(e, x, t=11.0)
    assert g1 == pytest.approx(g2, rel=1e-10)
    t = 7.5
    d = np.array(semi_axes(AX2, t))
    assert internal_F(e, d * x) == pytest.approx(float(e.E(t)) * spheroconal_G_poly(e)(x), rel=1e-10)


def test_internal_f_degree():
    # F is a polynomial of degree m: F(gamma x) is a degree-m polynomial in gamma
    e = harmonic_evaluator(P2, AX2, HarmonicIndex((1, 0), (0, 1, 0)))
    x = np.array([0.4, 0.9, 0.7])
    gam = np.linspace(0.5, 3.0, 9)
    vals = [internal_F(e, g * x) for g in gam]
    fit = np.polyfit(gam, vals, e.m)
    assert_allclose(np.polyval(fit, gam), vals, rtol=1e-10)
    assert np.max(np.abs(np.polyfit(gam, vals, e.m + 2)[:2])) < 1e-8 * np.max(np.abs(vals))


def test_external_scaling():
    e = harmonic_evaluator(P2, AX2, HarmonicIndex((1, 0), (0, 0, 1)))
    x = np.array([0.8, -0.3, 1.1])
    power = -2 * float(P2.mu) - e.m
    assert external_G(e, 3 * x) == pytest.approx(3**power * external_G(e, x), rel=1e-13)
    r = [external_F(e, g * x) * g ** (-power) for g in (40.0, 80.0, 160.0)]
    assert abs(r[2] - r[1]) < 0.5 * abs(r[1] - r[0])
    assert r[2] == pytest.approx(external_G(e, x), rel=1e-2)


def test_external_g_origin():
    with pytest.raises(DomainError):
        external_G(ev(HALF, PLANAR, (0,), (0, 0)), (0, 0))


def test_kernel_symmetry_and_reproduction():
    x = np.array([0.36, 0.48, 0.8])
    y = np.array([0.0, 0.6, -0.8])
    assert reproducing_kernel(P2, 2, x, y) == pytest.approx(reproducing_kernel(P2, 2, y, x), rel=1e-13)
    rule = sphere_rule(P2.alpha, 12)
    e = harmonic_evaluator(P2, AX2, HarmonicIndex((1, 0), (0, 0, 0)))
    G = spheroconal_G_poly(e)
    vals = [reproducing_kernel(P2, 2, x, node) for node in rule.nodes]
    assert rule.integrate(np.array(vals) * G(rule.nodes)) == pytest.approx(G(x), rel=1e-10)


@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_classical_kernel_is_legendre(m):
    p = DunklParams(2, (0, 0, 0))
    x = np.array([0.36, 0.48, 0.8])
    y = np.array([2.0, -1.0, 2.0]) / 3
    expect = (2 * m + 1) / (4 * math.pi) * eval_legendre(m, x @ y)
    assert reproducing_kernel(p, m, x, y) == pytest.approx(expect, rel=1e-10, abs=1e-13)


def test_kernel_requires_unit_vectors():
    with pytest.raises(DomainError):
        reproducing_kernel(P2, 1, (1, 1, 0), (1, 0, 0))


def test_e_is_positive():
    for idx in indices_of_degree(2, 3):
        assert e_norm(harmonic_evaluator(P2, AX2, idx)) > 0


def test_kelvin_examples():
    p = DunklParams(1, (Fr(1, 2), Fr(3, 2)))
    one = SparsePolynomial.constant(1, 2)
    assert kelvin_external(p, one).terms == {((0, 0), 0): 1}
    x0 = SparsePolynomial.variable(0, 2)
    assert kelvin_external(p, x0).terms == {((1, 0), 1): 1}
    a0, a1 = p.alpha
    Y = SparsePolynomial({(2, 0): 1 + 2 * a1, (0, 2): -(1 + 2 * a0)}, 2)
    assert kelvin_external(p, Y).terms == RadialFunction.from_polynomial(Y, p.mu, s=2).canonical().terms
    with pytest.raises(PreconditionError):
        kelvin_external(p, SparsePolynomial({(2, 0): 1}, 2))
