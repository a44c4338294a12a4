"""Ellipsoidal and sphero-conal h-harmonics.

Writing theta_l for the zeros of the Stieltjes polynomial and
omega(s) = prod_j (s - a_j), the defining equation of the ellipsoidal
coordinates factors as

    prod_i (s - t_i) = omega(s) (1 - sum_j x_j^2 / (s - a_j)).

Inserting this into F(x) = prod_i E(t_i) shows that F is a polynomial and that
the sphero-conal harmonic defined through E(t) G(y/d) = F(y) on the ellipsoid
with semi-axes d_j = sqrt(t - a_j) is

    G(x) = prod_j |A_j|^(p_j/2) x^p prod_l L(theta_l),
    L(s) = (-1)^k sum_j x_j^2 prod_{i != j} (s - a_i).

``spheroconal_G`` evaluates G pointwise from F and E (no product formula);
``spheroconal_G_poly`` uses the product formula, exactly when k = 1 and all
data are rational.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .algebra import (RadialFunction, SparsePolynomial, dunkl_laplacian,
                      homogeneous_basis, operator_apply)
from .coords import cartesian_to_ellipsoidal, on_degenerate_set
from .integrals import sphere_integrate_poly
from .model import (DomainError, DunklParams, EllipsoidAxes, HarmonicIndex,
                    InvalidParameterError, PreconditionError, check_point,
                    indices_of_degree)
from .orthopoly import pochhammer
from .stieltjes import SecondSolution, StieltjesPolynomial, solve_stieltjes


@dataclass(frozen=True)
class HarmonicEvaluator:
    params: DunklParams
    axes: EllipsoidAxes
    index: HarmonicIndex
    E: StieltjesPolynomial
    Ecal: SecondSolution

    @property
    def m(self) -> int:
        return self.index.m

    @property
    def exact(self) -> bool:
        """Whether G is available with rational coefficients."""
        return self.E.coeffs is not None

    @property
    def t_ref(self):
        a = self.axes.a
        return float(a[-1] + (a[-1] - a[0]))


@lru_cache(maxsize=512)
def harmonic_evaluator(params: DunklParams, axes: EllipsoidAxes, index: HarmonicIndex) -> HarmonicEvaluator:
    if axes.k != params.k or index.k != params.k:
        raise InvalidParameterError("dimension mismatch between parameters, axes and index")
    E = solve_stieltjes(params, axes, index)
    return HarmonicEvaluator(params, axes, index, E, SecondSolution(E))


def _sign_factor(x, p) -> int:
    s = 1
    for xj, pj in zip(x, p):
        if pj and xj < 0:
            s = -s
    return s


# -- internal and external ellipsoidal harmonics ------------------------------


def internal_F(ev: HarmonicEvaluator, x: Sequence) -> float:
    """F(x) = prod_i E(t_i), extended to every orthant by parity."""
    x = check_point(x, ev.params.k)
    ax = [abs(float(v)) for v in x]
    if all(v == 0 for v in ax):
        a = [float(v) for v in ev.axes.a]
        t = [a[-1]] + a[:-1]
    else:
        t = cartesian_to_ellipsoidal(ev.axes, ax).t
    val = 1.0
    for ti in t:
        val *= float(ev.E(ti, allow_interior=True))
    return _sign_factor(x, ev.index.p) * val


def external_F(ev: HarmonicEvaluator, x: Sequence) -> float:
    """calF(x) = calE(t_0) prod_{i>=1} E(t_i), off the degenerate ellipsoid."""
    x = check_point(x, ev.params.k)
    ax = [abs(float(v)) for v in x]
    if on_degenerate_set(ev.axes, ax):
        raise DomainError("point lies on the degenerate (focal) ellipsoid "
                          "x_k = 0, sum x_j^2/(a_k - a_j) <= 1")
    t = cartesian_to_ellipsoidal(ev.axes, ax).t
    val = ev.Ecal(t[0])
    for ti in t[1:]:
        val *= float(ev.E(ti, allow_interior=True))
    return _sign_factor(x, ev.index.p) * val


# -- sphero-conal harmonics ---------------------------------------------------


def spheroconal_G(ev: HarmonicEvaluator, x: Sequence, t=None) -> float:
    """G(x) from the identity E(t) G(y/d) = F(y) on the ellipsoid with parameter t.

    The point is projected onto the sphere, mapped to the ellipsoid, and the
    result extended as a homogeneous function of degree m.
    """
    x = check_point(x, ev.params.k)
    xf = np.array([float(v) for v in x])
    r = float(np.linalg.norm(xf))
    if r == 0:
        if ev.m == 0:
            return 1.0
        return 0.0
    t = ev.t_ref if t is None else float(t)
    if t <= float(ev.axes.a[-1]):
        raise DomainError("the ellipsoid parameter t must exceed a_k")
    d = np.sqrt(t - np.array([float(v) for v in ev.axes.a]))
    y = d * np.abs(xf) / r
    val = internal_F(ev, y) / float(ev.E(t))
    return _sign_factor(x, ev.index.p) * val * r ** ev.m


def _linear_forms(ev: HarmonicEvaluator):
    """Coefficient lists c_j(s) = (-1)^k prod_{i != j}(s - a_i) evaluated at the zeros."""
    a = [float(v) for v in ev.axes.a]
    k = ev.params.k
    forms = []
    for th in ev.E.all_zeros:
        forms.append([(-1) ** k * math.prod(th - a[i] for i in range(k + 1) if i != j)
                      for j in range(k + 1)])
    return forms


def _reduced_G(ev: HarmonicEvaluator) -> SparsePolynomial:
    """x^p prod_l L(theta_l); exact for k = 1 with rational data."""
    k = ev.params.k
    nv = k + 1
    xp = SparsePolynomial.monomial(ev.index.p, 1)
    if ev.exact and k == 1:
        a0, a1 = ev.axes.a
        sq = [(2, 0), (0, 2)]
        u = SparsePolynomial({sq[0]: a1, sq[1]: a0}, nv)   # a1 x0^2 + a0 x1^2
        rho = SparsePolynomial.norm_squared(nv)
        N = len(ev.E.coeffs) - 1
        out = SparsePolynomial({}, nv)
        for dgr, c in enumerate(ev.E.coeffs):
            out = out + (u ** dgr) * (rho ** (N - dgr)) * c
        return xp * out
    out = xp.to_float()
    for coeffs in _linear_forms(ev):
        L = SparsePolynomial({tuple(2 if i == j else 0 for i in range(nv)): c
                              for j, c in enumerate(coeffs)}, nv)
        out = out * L
    return out


def g_scale_squared(ev: HarmonicEvaluator):
    """prod_j |A_j|^(p_j), the square of the factor between G and its reduced form."""
    out = 1
    for Aj, pj in zip(ev.axes.bigA, ev.index.p):
        if pj:
            out = out * abs(Aj)
    return Fraction(out) if ev.axes.exact else float(out)


def _exact_sqrt(q):
    if not isinstance(q, Fraction):
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def spheroconal_G_parts(ev: HarmonicEvaluator) -> tuple:
    """(S, Gred) with G = sqrt(S) * Gred; Gred is exact whenever possible."""
    return g_scale_squared(ev), _reduced_G(ev)


def spheroconal_G_poly(ev: HarmonicEvaluator) -> SparsePolynomial:
    """G as a homogeneous polynomial of degree m."""
    S, red = spheroconal_G_parts(ev)
    root = _exact_sqrt(S) if red.exact else None
    if root is not None:
        return red * root
    return red.to_float() * math.sqrt(float(S))


def interpolate_G_poly(ev: HarmonicEvaluator, t=None, seed: int = 0) -> SparsePolynomial:
    """Recover the coefficients of G from pointwise values by least squares.

    Uses the monomials of degree m with parity p and three times as many
    random sphere points as unknowns.  Independent of the product formula.
    """
    k = ev.params.k
    basis = homogeneous_basis(k + 1, ev.m, ev.index.p)
    rng = np.random.default_rng(seed)
    P = max(3 * len(basis), 8)
    X = np.abs(rng.normal(size=(P, k + 1))) + 0.05
    X /= np.linalg.norm(X, axis=1)[:, None]
    vals = np.array([spheroconal_G(ev, x, t=t) for x in X])
    M = np.stack([np.prod(X ** np.array(q), axis=1) for q in basis], axis=1)
    coef, *_ = np.linalg.lstsq(M, vals, rcond=None)
    return SparsePolynomial({q: float(c) for q, c in zip(basis, coef)}, k + 1)


def external_G(ev: HarmonicEvaluator, x: Sequence) -> float:
    """calG(x) = |x|^(-2 mu - 2 m) G(x)."""
    x = check_point(x, ev.params.k)
    r2 = sum(float(v) ** 2 for v in x)
    if r2 == 0:
        raise DomainError("the external harmonic is singular at the origin")
    return spheroconal_G_poly(ev)([float(v) for v in x]) * r2 ** (-float(ev.params.mu) - ev.m)


def external_G_radial(ev: HarmonicEvaluator) -> RadialFunction:
    """calG as a radial-class function, terms c x^q |x|^(-2(mu + m))."""
    return RadialFunction.from_polynomial(spheroconal_G_poly(ev), ev.params.mu, s=ev.m)


# -- normalisation and reproducing kernel -------------------------------------


def e_norm_squared(ev: HarmonicEvaluator) -> float:
    """e^2 with e^2 int_{S^k} h^2 G^2 dS = 1, the integral by exact moments."""
    S, red = spheroconal_G_parts(ev)
    params = ev.params if red.exact else ev.params.as_float()
    integral = sphere_integrate_poly(params, red * red)
    return 1.0 / (float(S) * float(integral))


def e_norm(ev: HarmonicEvaluator) -> float:
    return math.sqrt(e_norm_squared(ev))


def _default_axes(k: int) -> EllipsoidAxes:
    return EllipsoidAxes(tuple(range(k + 1)))


def reproducing_kernel(params: DunklParams, m: int, x: Sequence, y: Sequence,
                       axes: EllipsoidAxes | None = None) -> float:
    """P_m(x, y) = sum over indices of degree m of e^2 G(x) G(y), for x, y on the sphere."""
    x = [float(v) for v in check_point(x, params.k)]
    y = [float(v) for v in check_point(y, params.k)]
    for v in (x, y):
        if abs(math.fsum(c * c for c in v) - 1.0) > 1e-10:
            raise DomainError("the reproducing kernel is evaluated on the unit sphere")
    axes = axes or _default_axes(params.k)
    total = 0.0
    for idx in indices_of_degree(params.k, m):
        ev = harmonic_evaluator(params, axes, idx)
        G = spheroconal_G_poly(ev)
        total += e_norm_squared(ev) * G(x) * G(y)
    return total


def kelvin_external(params: DunklParams, Y: SparsePolynomial) -> RadialFunction:
    """calY = (-1)^m / (2^m (mu)_m) Y(D) |x|^(-2 mu) for an h-harmonic Y of degree m."""
    if not Y.is_homogeneous():
        raise PreconditionError("Y must be homogeneous")
    lap = dunkl_laplacian(Y, params.alpha)
    if Y.exact and params.exact:
        harmonic = lap.is_zero()
    else:
        scale = max((abs(float(c)) for c in Y.terms.values()), default=1.0)
        harmonic = all(abs(float(c)) <= 1e-9 * scale for c in lap.terms.values())
    if not harmonic:
        raise PreconditionError("Y is not h-harmonic")
    m = max(Y.degree, 0)
    seed = RadialFunction.power_of_norm(params.mu, Y.nvars)
    out = operator_apply(Y, seed, params.alpha)
    c = pochhammer(params.mu, m) * 2**m
    factor = Fraction((-1) ** m) / c if isinstance(c, Fraction) else (-1) ** m / c
    return out.map_coefficients(lambda v: v * factor).canonical()
