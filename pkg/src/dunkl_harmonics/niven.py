"""Niven-type series for external ellipsoidal h-harmonics.

With L = a_0 D_0^2 + ... + a_k D_k^2,

    calF(z) = sum_r (-1)^r / (4^r r! (mu + m + 1)_r) L^r calG(z)                      (corollary)
            = sum_r (-1)^(r+m) (mu + m) / (2^(m+2r) r! (mu)_(m+r+1)) L^r G(D) |z|^(-2 mu)  (theorem)

valid for |z|^2 > a_k - a_0.  Every term is a radial-class function; terms are
built by the recursion term_{r+1} = L term_r and evaluated with an exact inner
sum, because the monomials of a single term cancel heavily at moderate |z|.
"""
from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import RadialFunction, SparsePolynomial, dunkl_apply, operator_apply
from .coords import planar_t0_t1
from .harmonics import HarmonicEvaluator, spheroconal_G_parts
from .model import (DomainError, DunklParams, NonConvergenceError,
                    PreconditionError, check_point, is_exact)
from .orthopoly import (JacobiParams, b_n_const, jacobi_p, jacobi_p_coeffs,
                        jacobi_q, pochhammer)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_TERMS = 60
WINDOW = 4


@dataclass
class NivenResult:
    value: float
    terms: int
    ratio: float
    tail_bound: float


def _exactify(poly: SparsePolynomial) -> SparsePolynomial:
    """Rational copy of a polynomial (floats are converted exactly)."""
    return poly.map_coefficients(Fraction)


def apply_sum_operator(f: RadialFunction, alpha: Sequence, weights: Sequence) -> RadialFunction:
    """(sum_j w_j D_j^2) f, in canonical form."""
    out = None
    for j, w in enumerate(weights):
        if w == 0:
            continue
        term = dunkl_apply(j, dunkl_apply(j, f, alpha), alpha) * w
        out = term if out is None else out + term
    if out is None:
        return f * 0
    return out.canonical()


@dataclass
class NivenSeries:
    """Cached terms L^r seed and coefficients c_r for one external harmonic.

    ``kind`` is "corollary" (seed calG) or "theorem" (seed G(D)|z|^(-2 mu)).
    The overall factor between G and its rational reduced form is kept in
    ``scale`` and applied after evaluation.
    """

    params: DunklParams
    weights: tuple
    seed: RadialFunction
    m: int
    kind: str
    scale: float = 1.0
    domain: float = 0.0
    terms: list = field(default_factory=list)

    def __post_init__(self):
        if not self.terms:
            self.terms.append(self.seed.canonical())

    @property
    def exact(self) -> bool:
        return self.params.exact and all(is_exact(c) for c in self.seed.terms.values())

    def coefficient(self, r: int):
        mu, m = self.params.mu, self.m
        one = Fraction(1) if self.params.exact else 1.0
        if self.kind == "corollary":
            return one * (-1) ** r / (4**r * math.factorial(r) * pochhammer(mu + m + 1, r))
        return one * (-1) ** (r + m) * (mu + m) / (2 ** (m + 2 * r) * math.factorial(r) * pochhammer(mu, m + r + 1))

    def term(self, r: int) -> RadialFunction:
        while len(self.terms) <= r:
            self.terms.append(apply_sum_operator(self.terms[-1], self.params.alpha, self.weights))
        return self.terms[r]

    def term_value(self, r: int, z) -> float:
        """c_r (L^r seed)(z) including the overall scale."""
        f = self.term(r)
        c = self.coefficient(r)
        if self.exact:
            return f(z, exact=True, factor=c) * self.scale
        return float(c) * f(z) * self.scale

    def evaluate(self, z, tol: float = DEFAULT_TOL, max_terms: int = DEFAULT_MAX_TERMS,
                 check_domain: bool = True) -> NivenResult:
        """Adaptive partial sum at z.

        Terms oscillate (the decay rates come in complex pairs), so the size
        test and the ratio use the envelope max |term| over a window of
        ``WINDOW`` consecutive terms rather than a single term.  On a nodal
        set the sum itself vanishes, so the size test is taken relative to
        max(|sum|, tol * largest term).
        """
        z = tuple(float(v) for v in z)
        if check_domain and not sum(v * v for v in z) > self.domain:
            raise DomainError("the Niven series needs |z|^2 > a_k - a_0")
        w = WINDOW
        vals = []
        total = 0.0
        peak = 0.0
        ratio = math.inf
        for r in range(max_terms):
            v = self.term_value(r, z)
            vals.append(v)
            total += v
            peak = max(peak, abs(v))
            if r + 1 < 2 * w:
                continue
            env = max(abs(u) for u in vals[-w:])
            prev = max(abs(u) for u in vals[-2 * w:-w])
            if env == 0:
                return NivenResult(total, r + 1, 0.0, 0.0)
            ratio = (env / prev) ** (1.0 / w) if prev > 0 else math.inf
            if env <= tol * max(abs(total), tol * peak) and ratio < 1:
                return NivenResult(total, r + 1, ratio, env * ratio / (1 - ratio))
        raise NonConvergenceError(
            f"Niven series did not converge within {max_terms} terms (last term ratio {ratio:.3g})")

    def ratios(self, z, count: int) -> list:
        """Envelope ratios of the first ``count`` terms (no domain check)."""
        z = tuple(float(v) for v in z)
        vals = [abs(self.term_value(r, z)) for r in range(count)]
        w = WINDOW
        out = []
        for r in range(2 * w - 1, count):
            env, prev = max(vals[r - w + 1:r + 1]), max(vals[r - 2 * w + 1:r - w + 1])
            out.append((env / prev) ** (1.0 / w) if prev > 0 else math.inf)
        return out


def niven_series(ev: HarmonicEvaluator, kind: str = "corollary") -> NivenSeries:
    params, axes = ev.params, ev.axes
    S, red = spheroconal_G_parts(ev)
    exact = params.exact and axes.exact
    if exact:
        red = _exactify(red) if not red.exact else red
    else:
        red = red.to_float()
    scale = math.sqrt(float(S))
    if kind == "corollary":
        seed = RadialFunction.from_polynomial(red, params.mu, s=ev.m)
    elif kind == "theorem":
        one = Fraction(1) if exact else 1.0
        seed = operator_apply(red, RadialFunction.power_of_norm(params.mu, params.k + 1, c=one), params.alpha)
    else:
        raise ValueError("kind must be 'corollary' or 'theorem'")
    weights = tuple(axes.a) if exact else tuple(float(v) for v in axes.a)
    return NivenSeries(params, weights, seed, ev.m, kind, scale, float(axes.a[-1] - axes.a[0]))


def niven_corollary(ns: NivenSeries | HarmonicEvaluator, z, tol: float = DEFAULT_TOL,
                    max_terms: int = DEFAULT_MAX_TERMS) -> NivenResult:
    if isinstance(ns, HarmonicEvaluator):
        ns = niven_series(ns, "corollary")
    return ns.evaluate(z, tol, max_terms)


def niven_theorem(ns: NivenSeries | HarmonicEvaluator, z, tol: float = DEFAULT_TOL,
                  max_terms: int = DEFAULT_MAX_TERMS) -> NivenResult:
    if isinstance(ns, HarmonicEvaluator):
        ns = niven_series(ns, "theorem")
    return ns.evaluate(z, tol, max_terms)


# -- the planar case ----------------------------------------------------------


@lru_cache(maxsize=64)
def planar_series(n: int, jp: JacobiParams, variant: str = "difference") -> NivenSeries:
    """Series for b_n Q_n(t_0) P_n(t_1) with a = (-1, 1).

    ``variant`` selects the operator D_1^2 - D_0^2 ("difference") or 2 D_1^2
    ("double"); they agree on h-harmonic functions.
    """
    exact = is_exact(jp.alpha) and is_exact(jp.beta)
    half = Fraction(1, 2) if exact else 0.5
    params = DunklParams(1, (jp.beta + half, jp.alpha + half))
    c = jacobi_p_coeffs(n, jp)
    # (x0^2 + x1^2)^n P_n((x0^2 - x1^2)/(x0^2 + x1^2))
    u = SparsePolynomial({(2, 0): 1, (0, 2): -1}, 2)
    rho = SparsePolynomial.norm_squared(2)
    poly = SparsePolynomial({}, 2)
    for i, ci in enumerate(c):
        poly = poly + (u**i) * (rho ** (n - i)) * ci
    if not exact:
        poly = poly.to_float()
    seed = RadialFunction.from_polynomial(poly, params.mu, s=2 * n)
    if variant == "difference":
        weights = (-1, 1)
    elif variant == "double":
        weights = (0, 2)
    else:
        raise ValueError("variant must be 'difference' or 'double'")
    return NivenSeries(params, weights, seed, 2 * n, "corollary", 1.0, 2.0)


def planar_lhs(n: int, jp: JacobiParams, x) -> float:
    """b_n Q_n(t_0) P_n(t_1) with the planar ellipsoidal coordinates of x."""
    t0, t1 = planar_t0_t1(*x)
    return b_n_const(n, jp) * jacobi_q(n, jp, t0) * float(jacobi_p(n, JacobiParams(float(jp.alpha), float(jp.beta)), t1))


def niven_planar(n: int, jp: JacobiParams, x, tol: float = DEFAULT_TOL,
                 max_terms: int = DEFAULT_MAX_TERMS, variant: str = "difference") -> tuple:
    """(lhs, rhs) of the planar Niven identity at x with x_0^2 + x_1^2 > 2."""
    x = check_point(x, 1)
    if not float(x[0]) ** 2 + float(x[1]) ** 2 > 2:
        raise DomainError("the planar Niven identity needs x_0^2 + x_1^2 > 2")
    rhs = planar_series(n, jp, variant).evaluate(x, tol, max_terms)
    return planar_lhs(n, jp, x), rhs.value


# -- the anisotropic operator identity -----------------------------------------


def anisotropic_identity_check(ev: HarmonicEvaluator, t, g: RadialFunction) -> tuple:
    """Both sides of G(d_0 D_0, ..., d_k D_k) g = E(t) G(D) g for h-harmonic g.

    Written with the reduced form Gred of G and the polynomial part P of E,
    after dividing out the common factor sqrt(S) prod_j d_j^(p_j): the left
    side is Gred with monomial x^q weighted by prod (t - a_j)^((q_j - p_j)/2),
    the right side P(t) Gred(D) g.  Returned as radial-class functions.
    """
    params, axes = ev.params, ev.axes
    if t <= axes.a[-1]:
        raise DomainError("t must exceed a_k")
    lap = apply_sum_operator(g, params.alpha, (1,) * (params.k + 1))
    if all(is_exact(c) for c in g.terms.values()):
        harmonic = lap.is_zero()
    else:
        scale = max((abs(float(c)) for c in g.terms.values()), default=1.0)
        harmonic = all(abs(float(c)) <= 1e-9 * scale for c in lap.terms.values())
    if not harmonic:
        raise PreconditionError("g is not h-harmonic")
    _, red = spheroconal_G_parts(ev)
    p = ev.index.p
    exact = red.exact and is_exact(t)
    if not exact:
        red = red.to_float()
        t = float(t)
    a = axes.a if exact else [float(v) for v in axes.a]
    scaled = {}
    for q, c in red.terms.items():
        w = 1
        for qj, pj, aj in zip(q, p, a):
            w = w * (t - aj) ** ((qj - pj) // 2)
        scaled[q] = c * w
    lhs = operator_apply(SparsePolynomial(scaled, red.nvars), g, params.alpha).canonical()
    Pt = ev.E.polynomial_part(t)
    if not exact:
        Pt = float(Pt)
    rhs = (operator_apply(red, g, params.alpha) * Pt).canonical()
    return lhs, rhs
