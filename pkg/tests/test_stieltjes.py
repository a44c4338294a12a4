import math
from fractions import Fraction

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import special

from dunkl_harmonics.model import DomainError, DunklParams, EllipsoidAxes, HarmonicIndex
from dunkl_harmonics.orthopoly import JacobiParams, a_n_const, b_n_const, jacobi_p_coeffs, jacobi_q
from dunkl_harmonics.stieltjes import (SecondSolution, eval_E, eval_E_prime, eval_Ecal,
                                       solve_stieltjes, wronskian_residual)

PLANAR = EllipsoidAxes((-1, 1))
F = Fraction


def planar_params(al, be):
    # alpha_0 = beta + 1/2, alpha_1 = alpha + 1/2
    return DunklParams(1, (be + F(1, 2), al + F(1, 2)))


def fuchsian_residual(sp, t, h=1e-4):
    """Residual of the original equation for v = E; v'' by central differences of v'."""
    a = [float(v) for v in sp.axes.a]
    al = [float(v) for v in sp.params.alpha]
    p = sp.index.p
    v = lambda s: float(sp(s))
    d1 = sp.derivative(t)
    d2 = (sp.derivative(t + h) - sp.derivative(t - h)) / (2 * h)
    omega = math.prod(t - aj for aj in a)
    A = [math.prod(a[j] - a[i] for i in range(len(a)) if i != j) for j in range(len(a))]
    lam = sum(float(c) * t**i for i, c in enumerate(sp.lam))
    first = omega * (d2 + sum((al[j] + 0.5) / (t - a[j]) for j in range(len(a))) * d1)
    pot = -0.5 * sum(p[j] * al[j] * A[j] / (t - a[j]) for j in range(len(a)))
    total = first + (pot + lam) * v(t)
    scale = abs(first) + abs(lam * v(t)) + abs(pot * v(t))
    return abs(total) / scale if scale else abs(total)


@pytest.mark.parametrize("ab", [(F(0), F(0)), (F(1, 2), F(3, 2)), (F(2, 3), F(-1, 4)), (F(3), F(1))])
@pytest.mark.parametrize("n", range(9))
def test_planar_identification(ab, n):
    jp = JacobiParams(*ab)
    sp = solve_stieltjes(planar_params(*ab), PLANAR, HarmonicIndex((n,), (0, 0)))
    want = [c * a_n_const(n, jp) for c in jacobi_p_coeffs(n, jp)]
    assert list(sp.coeffs) == want
    assert sp.lam[0] == -n * (n + ab[0] + ab[1] + 1)


@pytest.mark.parametrize("n", [1, 3, 6])
def test_planar_zeros_match_jacobi_roots(n):
    al, be = 0.5, 1.5
    sp = solve_stieltjes(planar_params(F(1, 2), F(3, 2)), PLANAR, HarmonicIndex((n,), (0, 0)))
    x, _ = special.roots_jacobi(n, al, be)
    assert_allclose(np.sort(sp.all_zeros), x, atol=1e-12)


def test_trivial_index():
    params = DunklParams(2, (1, F(1, 2), 2))
    axes = EllipsoidAxes((0, 1, 3))
    for p in [(0, 0, 0), (1, 0, 1), (1, 1, 1)]:
        sp = solve_stieltjes(params, axes, HarmonicIndex((0, 0), p))
        t = 4.5
        want = math.prod(math.sqrt(t - a) for a, pj in zip(axes.a, p) if pj)
        assert float(sp(t)) == pytest.approx(want, rel=1e-14)
        assert fuchsian_residual(sp, t) < 1e-7


def test_linear_example_and_derivative():
    params = DunklParams(1, (F(1, 2), F(1, 2)))
    sp = solve_stieltjes(params, PLANAR, HarmonicIndex((1,), (0, 0)))
    assert sp(F(7, 3)) == F(7, 3)
    root = solve_stieltjes(params, PLANAR, HarmonicIndex((0,), (0, 1)))
    assert eval_E_prime(root, 2.0) == pytest.approx(0.5)
    assert eval_E(solve_stieltjes(params, PLANAR, HarmonicIndex((0,), (0, 0))), 5.0) == 1


def test_interior_requires_flag():
    params = DunklParams(1, (F(1, 2), F(1, 2)))
    sp = solve_stieltjes(params, PLANAR, HarmonicIndex((0,), (0, 1)))
    with pytest.raises(DomainError):
        sp(0.5)
    assert float(sp(0.5, allow_interior=True)) == pytest.approx(math.sqrt(0.5))


K2 = [(DunklParams(2, (1, 1, 1)), EllipsoidAxes((0, 1, 3))),
      (DunklParams(2, (F(1, 2), F(1, 4), F(3, 2))), EllipsoidAxes((-1, F(1, 2), 2)))]


@pytest.mark.parametrize("params,axes", K2)
@pytest.mark.parametrize("n", [(1, 0), (0, 1), (2, 1), (1, 3)])
@pytest.mark.parametrize("p", [(0, 0, 0), (1, 0, 1), (0, 1, 1)])
def test_k2_zeros_interlace_and_solve(params, axes, n, p):
    sp = solve_stieltjes(params, axes, HarmonicIndex(n, p))
    a = [float(v) for v in axes.a]
    for j, group in enumerate(sp.zeros):
        assert len(group) == n[j]
        assert all(a[j] < z < a[j + 1] for z in group)
    assert len(set(np.round(sp.all_zeros, 12))) == sum(n)
    for t in (a[-1] + 0.7, a[-1] + 3.0):
        assert sp.ode_residual(t) < 1e-10
        assert fuchsian_residual(sp, t) < 1e-6


def test_legendre_second_solution():
    params = DunklParams(1, (F(1, 2), F(1, 2)))
    ss = SecondSolution(solve_stieltjes(params, PLANAR, HarmonicIndex((0,), (0, 0))))
    for t in (1.1, 2.0, 3.0, 40.0):
        assert eval_Ecal(ss, t) == pytest.approx(0.5 * math.log((t + 1) / (t - 1)), rel=1e-12)
    assert ss.wronskian_rhs(3.0) == pytest.approx(1 / 8)
    assert wronskian_residual(ss, 3.0) < 1e-10


@pytest.mark.parametrize("ab", [(0.5, 1.5), (2.0, 0.0)])
@pytest.mark.parametrize("n", range(4))
def test_second_solution_is_jacobi_q(ab, n):
    params = planar_params(F(ab[0]), F(ab[1]))
    jp = JacobiParams(*ab)
    ss = SecondSolution(solve_stieltjes(params, PLANAR, HarmonicIndex((n,), (0, 0))))
    for t in (1.3, 2.5, 9.0):
        assert ss(t) == pytest.approx(b_n_const(n, jp) * jacobi_q(n, jp, t), rel=1e-11)


@pytest.mark.parametrize("params,axes", K2)
@pytest.mark.parametrize("index", [HarmonicIndex((0, 0), (0, 0, 0)), HarmonicIndex((1, 1), (1, 0, 0)),
                                   HarmonicIndex((0, 2), (0, 1, 1))])
def test_second_solution_normalisation(params, axes, index):
    ss = SecondSolution(solve_stieltjes(params, axes, index))
    t = 1e6
    mu = float(params.mu)
    assert ss(t) * t ** (mu + index.m / 2) == pytest.approx(1, rel=1e-4)
    assert wronskian_residual(ss, float(axes.a[-1]) + 1) < 1e-9


def test_second_solution_domain():
    params = DunklParams(1, (F(1, 2), F(1, 2)))
    ss = SecondSolution(solve_stieltjes(params, PLANAR, HarmonicIndex((1,), (0, 0))))
    with pytest.raises(DomainError):
        ss(0.9)
