"""Weighted sphere integrals.

Monomial moments are Dirichlet integrals,

    int_{S^k} h^2 x^(2q) dS = 2 prod_j Gamma(alpha_j + q_j + 1/2) / Gamma(mu + 1 + |q|),

so for rational alpha every moment is a rational multiple of the single
constant K = prod_j Gamma(alpha_j + 1/2) / Gamma(mu + 1).  Exact results are
returned as :class:`GammaScaled` values carrying that rational multiple.

For non-polynomial integrands the sphere is mapped onto the simplex
v_j = x_j^2; the weight prod v_j^(alpha_j - 1/2) is absorbed by a collapsed
tensor product of Gauss-Jacobi rules and the integrand is symmetrised over the
2^(k+1) sign patterns.
"""
from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .algebra import SparsePolynomial, dunkl_laplacian, operator_apply
from .model import (DomainError, DunklParams, EllipsoidAxes, NonConvergenceError,
                    PreconditionError)
from .orthopoly import gauss_jacobi_rule, pochhammer


@dataclass(frozen=True)
class GammaScaled:
    """The number coef * prod_j Gamma(alpha_j + 1/2) / Gamma(mu + 1)."""

    coef: Fraction
    params: DunklParams

    @property
    def base(self) -> float:
        p = self.params
        return math.exp(sum(math.lgamma(float(a) + 0.5) for a in p.alpha) - math.lgamma(float(p.mu) + 1))

    def __float__(self):
        return float(self.coef) * self.base

    def _coerce(self, other):
        if isinstance(other, GammaScaled):
            if other.params != self.params:
                raise ValueError("cannot combine values for different parameters")
            return other.coef
        if other == 0:
            return Fraction(0)
        return NotImplemented

    def __add__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return float(self) + other
        return GammaScaled(self.coef + c, self.params)

    __radd__ = __add__

    def __sub__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return float(self) - other
        return GammaScaled(self.coef - c, self.params)

    def __neg__(self):
        return GammaScaled(-self.coef, self.params)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return GammaScaled(self.coef * other, self.params)
        return float(self) * other

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return GammaScaled(self.coef / Fraction(other), self.params)
        return float(self) / other

    def __eq__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return float(self) == other
        return self.coef == c

    def __hash__(self):
        return hash((self.coef, self.params))

    def is_zero(self) -> bool:
        return self.coef == 0

    def __repr__(self):
        return f"GammaScaled({self.coef} * K)"


class MomentTable:
    """Cache of h^2-weighted sphere moments for one parameter set.

    Entries are keyed by the half exponent q of x^(2q); insertion is guarded by
    a lock so the table can be shared between threads.
    """

    def __init__(self, params: DunklParams):
        self.params = params
        self._cache: dict = {}
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._cache)

    def get(self, half_q: Sequence[int]):
        half_q = tuple(int(v) for v in half_q)
        val = self._cache.get(half_q)
        if val is None:
            val = _moment(self.params, half_q)
            with self._lock:
                val = self._cache.setdefault(half_q, val)
        return val

    def items(self):
        return sorted(self._cache.items())


def _moment(params: DunklParams, half_q: tuple):
    if params.exact:
        c = Fraction(2)
        for a, qj in zip(params.alpha, half_q):
            c *= pochhammer(a + Fraction(1, 2), qj)
        c /= pochhammer(params.mu + 1, sum(half_q))
        return GammaScaled(c, params)
    lg = sum(math.lgamma(float(a) + qj + 0.5) for a, qj in zip(params.alpha, half_q))
    return 2.0 * math.exp(lg - math.lgamma(float(params.mu) + 1 + sum(half_q)))


@lru_cache(maxsize=64)
def moment_table(params: DunklParams) -> MomentTable:
    return MomentTable(params)


def sphere_monomial_moment(params: DunklParams, q: Sequence[int]):
    """int_{S^k} h^2 x^q dS for the monomial with exponent vector q."""
    q = tuple(int(v) for v in q)
    if len(q) != params.k + 1:
        raise DomainError("exponent vector must have k+1 entries")
    if any(v % 2 for v in q):
        return GammaScaled(Fraction(0), params) if params.exact else 0.0
    return moment_table(params).get(tuple(v // 2 for v in q))


def sphere_measure(params: DunklParams):
    """int_{S^k} h^2 dS = 2 prod Gamma(alpha_j + 1/2) / Gamma(mu + 1)."""
    return sphere_monomial_moment(params, (0,) * (params.k + 1))


def sphere_integrate_poly(params: DunklParams, f: SparsePolynomial):
    """int_{S^k} h^2 f dS, exact when f and alpha are rational."""
    exact = params.exact and f.exact
    total = GammaScaled(Fraction(0), params) if exact else 0.0
    for q, c in f.terms.items():
        if any(v % 2 for v in q):
            continue
        m = sphere_monomial_moment(params, q)
        if exact:
            total = total + m * c
        else:
            total += float(m) * float(c)
    return total


# -- quadrature ---------------------------------------------------------------


@dataclass(frozen=True)
class SphereRule:
    """Nodes on S^k and weights for int h^2 f dS (h from ``alpha``)."""

    nodes: np.ndarray          # shape (P, k+1)
    weights: np.ndarray        # shape (P,)

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


def _simplex_rule(b: tuple, N: int):
    """Nodes/weights on the simplex sum v = 1 for the weight prod v_j^(b_j)."""
    if len(b) == 1:
        return np.ones((1, 1)), np.ones(1)
    rest = b[1:]
    c = sum(rest) + len(rest) - 1
    # v_0 = xi with weight xi^b0 (1 - xi)^c, xi = (1 + u)/2
    g = gauss_jacobi_rule(N, c, b[0])
    xi = 0.5 * (1.0 + g.nodes)
    wx = g.weights * 0.5 ** (b[0] + c + 1)
    sub_nodes, sub_w = _simplex_rule(rest, N)
    nodes = np.empty((len(xi) * len(sub_w), len(b)))
    weights = np.empty(len(xi) * len(sub_w))
    for i, (x, w) in enumerate(zip(xi, wx)):
        sl = slice(i * len(sub_w), (i + 1) * len(sub_w))
        nodes[sl, 0] = x
        nodes[sl, 1:] = (1.0 - x) * sub_nodes
        weights[sl] = w * sub_w
    return nodes, weights


@lru_cache(maxsize=128)
def _sphere_rule_cached(alpha: tuple, N: int):
    b = tuple(a - 0.5 for a in alpha)
    v, w = _simplex_rule(b, N)
    x = np.sqrt(np.clip(v, 0.0, None))
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=len(alpha))))
    nodes = (signs[:, None, :] * x[None, :, :]).reshape(-1, len(alpha))
    weights = np.tile(w, len(signs)) * (2.0 / len(signs))
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def sphere_rule(alpha: Sequence, N: int) -> SphereRule:
    """Quadrature for int_{S^k} prod|x_j|^(2 alpha_j) f(x) dS with N nodes per direction.

    Exact for polynomials f of degree below 2N (in each simplex direction).
    """
    alpha = tuple(float(a) for a in alpha)
    if any(a < 0 for a in alpha):
        raise DomainError("weight exponents must be nonnegative")
    nodes, weights = _sphere_rule_cached(alpha, int(N))
    return SphereRule(nodes, weights)


def sphere_integrate(alpha: Sequence, f: Callable, N: int | None = None, rtol: float = 1e-12,
                     nmax: int = 128) -> float:
    """int_{S^k} h^2 f dS for a vectorised f (points as rows), order escalated.

    With ``N`` given a single fixed-order rule is used.
    """
    if N is not None:
        r = sphere_rule(alpha, N)
        return r.integrate(f(r.nodes))
    n = 8
    prev = None
    while n <= nmax:
        r = sphere_rule(alpha, n)
        val = r.integrate(f(r.nodes))
        if prev is not None and abs(val - prev) <= rtol * max(abs(val), 1e-300):
            return val
        prev = val
        n *= 2
    raise NonConvergenceError(f"sphere quadrature did not settle: last two values {prev!r}, {val!r}")


def ellipsoid_transform_integral(axes: EllipsoidAxes, t, g: Callable, N: int | None = None,
                                 alpha: Sequence | None = None) -> float:
    """int_J w g dJ over J = {sum y_j^2/(t - a_j) = 1}, pulled back to the sphere.

    With y = d * x (d_j = sqrt(t - a_j)) the surface elements are related by
    dJ = prod d_j w^(-1) dS; hence int_J w g dJ = prod d_j int_{S^k} g(d x) dS.
    Passing ``alpha`` includes the weight h^2(y) in the J-integral, which
    picks up prod d_j^(2 alpha_j).
    """
    t = float(t)
    if t <= float(axes.a[-1]):
        raise DomainError("the ellipsoid parameter t must exceed a_k")
    d = np.sqrt(t - np.array([float(v) for v in axes.a]))
    if alpha is None:
        alpha = (0.0,) * len(d)
        extra = 1.0
    else:
        extra = float(np.prod(d ** (2 * np.array([float(a) for a in alpha]))))
    val = sphere_integrate(alpha, lambda X: g(X * d), N=N)
    return float(np.prod(d)) * extra * val


# -- Hobson-type formula ------------------------------------------------------


def _require_harmonic(Y: SparsePolynomial, params: DunklParams):
    if not Y.is_homogeneous():
        raise PreconditionError("Y must be a homogeneous polynomial")
    lap = dunkl_laplacian(Y, params.alpha)
    if Y.exact and params.exact:
        if not lap.is_zero():
            raise PreconditionError("Y is not h-harmonic")
        return
    scale = max((abs(float(c)) for c in Y.terms.values()), default=1.0)
    if any(abs(float(c)) > 1e-9 * scale for c in lap.terms.values()):
        raise PreconditionError("Y is not h-harmonic")


def hobson_rhs(params: DunklParams, f: SparsePolynomial, Y: SparsePolynomial):
    """Right-hand side of the Hobson-type formula for int h^2 f Y dS.

    For deg f = l = m + 2r the value is
    (Delta_h^r Y(D) f) / (2^(l-1) r!) * prod Gamma(alpha_i + 1/2) / Gamma(m + mu + r + 1),
    and zero when l < m or l - m is odd.
    """
    if f.is_zero():
        return GammaScaled(Fraction(0), params) if params.exact else 0.0
    if not f.is_homogeneous():
        raise PreconditionError("f must be homogeneous")
    _require_harmonic(Y, params)
    ell, m = f.degree, Y.degree
    exact = params.exact and f.exact and Y.exact
    if ell < m or (ell - m) % 2:
        return GammaScaled(Fraction(0), params) if exact else 0.0
    r = (ell - m) // 2
    g = operator_apply(Y, f, params.alpha)
    for _ in range(r):
        g = dunkl_laplacian(g, params.alpha)
    scalar = g.coefficient((0,) * f.nvars)
    if exact:
        c = Fraction(scalar) / (2 ** (ell - 1) * math.factorial(r) * pochhammer(params.mu + 1, m + r))
        return GammaScaled(c, params)
    K = math.exp(sum(math.lgamma(float(a) + 0.5) for a in params.alpha) - math.lgamma(float(params.mu) + 1))
    return float(scalar) * K / (2.0 ** (ell - 1) * math.factorial(r) * pochhammer(float(params.mu) + 1, m + r))


def hobson_check(params: DunklParams, f: SparsePolynomial, Y: SparsePolynomial) -> tuple:
    """(int h^2 f Y dS by moments, Hobson right-hand side)."""
    lhs = sphere_integrate_poly(params, f * Y)
    return lhs, hobson_rhs(params, f, Y)


def hobson_series(params: DunklParams, f_terms: Sequence[SparsePolynomial], Y: SparsePolynomial) -> float:
    """Sum of the Hobson formula over the homogeneous parts of a truncated series."""
    total = 0.0
    for f in f_terms:
        if f.is_zero():
            continue
        total += float(hobson_rhs(params, f, Y))
    return total
