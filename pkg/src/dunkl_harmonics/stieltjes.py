"""Stieltjes quasi-polynomials E_{n,p} and the decaying companion solution.

The quasi-polynomial has the form

    E(t) = prod_i (t - theta_i) * prod_j |t - a_j|^(p_j / 2)

and solves the Fuchsian equation

    omega(t) [v'' + sum_j (alpha_j + 1/2)/(t - a_j) v']
        + [-1/2 sum_j p_j alpha_j A_j/(t - a_j) + sum_i lambda_i t^i] v = 0,

omega(t) = prod_j (t - a_j).  Writing v = P(t) Pi(t) with P monic, P obeys

    omega P'' + B P' + (Q + Lambda) P = 0

with polynomial coefficients B and Q; the zeros theta_i are the equilibrium
of unit charges in the field of charges (alpha_j + 1/2 + p_j)/2 at a_j.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .model import (DomainError, DunklParams, EllipsoidAxes, HarmonicIndex,
                    InvalidParameterError, NonConvergenceError, is_exact)
from .orthopoly import tail_integral

# -- ascending-coefficient univariate helpers --------------------------------


def _padd(p, q):
    n = max(len(p), len(q))
    zero = (p or q)[0] * 0
    return [(p[i] if i < len(p) else zero) + (q[i] if i < len(q) else zero) for i in range(n)]


def _pscale(p, c):
    return [v * c for v in p]


def _pmul(p, q):
    out = [p[0] * 0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def _pfromroots(roots, one):
    out = [one]
    for r in roots:
        out = _pmul(out, [-r, one])
    return out


def _pderiv(p):
    return [p[i] * i for i in range(1, len(p))] or [p[0] * 0]


def _pdiv_linear(p, a):
    """Quotient of p(t) by (t - a); the remainder is discarded."""
    n = len(p) - 1
    if n == 0:
        return [p[0] * 0]
    q = [p[0] * 0] * n
    acc = p[n]
    for i in range(n - 1, -1, -1):
        q[i] = acc
        acc = p[i] + acc * a
    return q


def _peval(p, t):
    acc = p[-1] * 0 + t * 0
    for c in reversed(p):
        acc = acc * t + c
    return acc


def ode_coefficients(params: DunklParams, axes: EllipsoidAxes, p) -> tuple:
    """Polynomials (omega, B, Q) of the reduced equation for P."""
    a = axes.a
    k = axes.k
    exact = params.exact and axes.exact
    one = Fraction(1) if exact else 1.0
    half = one / 2
    gam = [al + half for al in params.alpha]
    omega = _pfromroots(a, one)
    omj = [_pdiv_linear(omega, aj) for aj in a]
    B = [one * 0]
    for j in range(k + 1):
        B = _padd(B, _pscale(omj[j], p[j] + gam[j]))
    Q = [one * 0]
    for i in range(k + 1):
        for j in range(k + 1):
            if i == j:
                continue
            c = p[i] * p[j] * one / 4 + p[i] * gam[j] / 2
            if c:
                Q = _padd(Q, _pscale(_pdiv_linear(omj[i], a[j]), c))
    for j in range(k + 1):
        if p[j] and params.alpha[j]:
            num = _padd(omj[j], [-axes.bigA[j]])
            Q = _padd(Q, _pscale(_pdiv_linear(num, a[j]), params.alpha[j] * half * p[j]))
    return omega, B, Q


# -- the solution objects ----------------------------------------------------


@dataclass(frozen=True)
class StieltjesPolynomial:
    params: DunklParams
    axes: EllipsoidAxes
    index: HarmonicIndex
    zeros: tuple                     # k groups, group j inside (a_{j-1}, a_j)
    lam: tuple                       # lambda_0 .. lambda_{k-1}
    coeffs: tuple = field(default=None)   # ascending coefficients of the monic P

    @property
    def all_zeros(self) -> np.ndarray:
        return np.concatenate([np.asarray(g, dtype=float) for g in self.zeros]) if self.zeros else np.zeros(0)

    @property
    def m(self) -> int:
        return self.index.m

    def _check(self, t, allow_interior):
        if allow_interior:
            return
        for aj, pj in zip(self.axes.a, self.index.p):
            if pj and t < aj:
                raise DomainError(
                    f"E has a square-root factor at a={aj}; t={t} lies below it "
                    "(pass allow_interior=True for |t - a_j|^(1/2))")

    def polynomial_part(self, t):
        if self.coeffs is not None and is_exact(t):
            return _peval(list(self.coeffs), t)
        t = np.asarray(t, dtype=float) if not np.isscalar(t) else float(t)
        return np.prod([t - z for z in self.all_zeros], axis=0) if len(self.all_zeros) else t * 0 + 1.0

    def __call__(self, t, allow_interior: bool = False):
        if np.isscalar(t):
            self._check(t, allow_interior)
        out = self.polynomial_part(t)
        for aj, pj in zip(self.axes.a, self.index.p):
            if pj:
                out = out * np.sqrt(np.abs(np.asarray(t, dtype=float) - float(aj)))
        return out

    def derivative(self, t, allow_interior: bool = False):
        if np.isscalar(t):
            self._check(t, allow_interior)
        t = np.asarray(t, dtype=float)
        z = self.all_zeros
        P = np.prod([t - zi for zi in z], axis=0) if len(z) else t * 0 + 1.0
        dP = t * 0.0
        for i in range(len(z)):
            factor = t * 0 + 1.0
            for l in range(len(z)):
                if l != i:
                    factor = factor * (t - z[l])
            dP = dP + factor
        Pi = t * 0 + 1.0
        dlogPi = t * 0.0
        for aj, pj in zip(self.axes.a, self.index.p):
            if pj:
                Pi = Pi * np.sqrt(np.abs(t - float(aj)))
                dlogPi = dlogPi + 0.5 / (t - float(aj))
        out = dP * Pi + P * Pi * dlogPi
        return float(out) if out.ndim == 0 else out

    def ode_residual(self, t) -> float:
        """Relative residual of the reduced equation omega P'' + B P' + (Q + Lambda) P."""
        omega, B, Q = ode_coefficients(self.params.as_float() if not self.params.exact else self.params,
                                       self.axes, self.index.p)
        omega = [float(c) for c in omega]
        B = [float(c) for c in B]
        Q = [float(c) for c in Q]
        P = _pfromroots(list(self.all_zeros), 1.0)
        dP = _pderiv(P)
        ddP = _pderiv(dP)
        t = float(t)
        lam = sum(float(l) * t**i for i, l in enumerate(self.lam))
        terms = [_peval(omega, t) * _peval(ddP, t), _peval(B, t) * _peval(dP, t),
                 (_peval(Q, t) + lam) * _peval(P, t)]
        scale = sum(abs(v) for v in terms) + abs(lam * _peval(P, t))
        return abs(sum(terms)) / max(scale, 1e-300)


def _initial_guess(axes: EllipsoidAxes, n) -> list:
    a = [float(v) for v in axes.a]
    groups = []
    for j, nj in enumerate(n, start=1):
        lo, hi = a[j - 1], a[j]
        # Chebyshev-like spacing keeps the guess away from the endpoints
        i = np.arange(1, nj + 1)
        groups.append(lo + (hi - lo) * 0.5 * (1 - np.cos(np.pi * (i - 0.5) / nj)) if nj else np.zeros(0))
    return groups


def _energy_terms(theta, a, rho):
    diff = theta[:, None] - theta[None, :]
    np.fill_diagonal(diff, np.inf)
    grad = 2 * np.sum(1.0 / diff, axis=1) + np.sum(rho[None, :] / (theta[:, None] - a[None, :]), axis=1)
    H = 2.0 / diff**2
    np.fill_diagonal(H, 0.0)
    diag = -2 * np.sum(1.0 / diff**2, axis=1) - np.sum(rho[None, :] / (theta[:, None] - a[None, :]) ** 2, axis=1)
    H = H + np.diag(diag)
    iu = np.triu_indices(len(theta), 1)
    with np.errstate(divide="ignore"):
        U = 2 * np.sum(np.log(np.abs(theta[:, None] - theta[None, :])[iu])) + \
            np.sum(rho[None, :] * np.log(np.abs(theta[:, None] - a[None, :])))
    return U, grad, H


def _solve_zeros(params: DunklParams, axes: EllipsoidAxes, index: HarmonicIndex,
                 maxiter: int = 200, tol: float = 1e-13) -> list:
    a = np.array([float(v) for v in axes.a])
    rho = np.array([float(al) + 0.5 + pj for al, pj in zip(params.alpha, index.p)])
    groups = _initial_guess(axes, index.n)
    theta = np.concatenate(groups) if groups else np.zeros(0)
    if theta.size == 0:
        return [np.zeros(0) for _ in index.n]
    owner = np.concatenate([np.full(nj, j) for j, nj in enumerate(index.n, start=1)])
    lo, hi = a[owner - 1], a[owner]

    def feasible(th):
        if np.any(th <= lo) or np.any(th >= hi):
            return False
        for j in range(1, len(a)):
            g = th[owner == j]
            if np.any(np.diff(g) <= 0):
                return False
        return True

    U, grad, H = _energy_terms(theta, a, rho)
    scale = np.max(np.abs(a)) + (a[-1] - a[0])
    for _ in range(maxiter):
        step = np.linalg.solve(H, -grad)
        lam_ = 1.0
        for _ in range(60):
            cand = theta + lam_ * step
            if feasible(cand):
                Uc, gc, Hc = _energy_terms(cand, a, rho)
                if Uc >= U - 1e-12 * abs(U) or lam_ < 1e-6:
                    break
            lam_ *= 0.5
        else:
            raise NonConvergenceError("Stieltjes zeros left their intervals persistently")
        if not feasible(cand):
            raise NonConvergenceError("Stieltjes zeros left their intervals persistently")
        theta, U, grad, H = cand, Uc, gc, Hc
        if np.max(np.abs(lam_ * step)) <= tol * scale:
            break
    else:
        raise NonConvergenceError(f"Newton for the Stieltjes zeros did not converge in {maxiter} iterations")
    # polish: one more full Newton step from the converged point
    step = np.linalg.solve(H, -grad)
    if feasible(theta + step):
        theta = theta + step
    return [np.sort(theta[owner == j]) for j in range(1, len(a))]


def _exact_planar(params: DunklParams, axes: EllipsoidAxes, index: HarmonicIndex):
    """Coefficients of the monic P and lambda_0 for k = 1 in rational arithmetic."""
    omega, B, Q = ode_coefficients(params, axes, index.p)
    N = sum(index.n)
    # T[t^d] = omega d(d-1) t^(d-2) + B d t^(d-1) + Q t^d, degree preserving for k = 1
    def T_col(d):
        out = [Fraction(0)] * (d + 1)
        for i, c in enumerate(omega):
            e = d - 2 + i
            if 0 <= e <= d and d >= 2:
                out[e] += c * d * (d - 1)
        for i, c in enumerate(B):
            e = d - 1 + i
            if 0 <= e <= d and d >= 1:
                out[e] += c * d
        for i, c in enumerate(Q):
            e = d + i
            if e <= d:
                out[e] += c
        return out

    cols = [T_col(d) for d in range(N + 1)]
    lam0 = -cols[N][N]
    c = [Fraction(0)] * (N + 1)
    c[N] = Fraction(1)
    for d in range(N - 1, -1, -1):
        acc = sum(cols[e][d] * c[e] for e in range(d + 1, N + 1))
        c[d] = -acc / (cols[d][d] + lam0)
    return tuple(c), (lam0,)


def _fit_lambda(params, axes, index, zeros) -> tuple:
    """Solve Lambda * P = -(omega P'' + B P' + Q P) for the coefficients of Lambda."""
    k = axes.k
    omega, B, Q = ode_coefficients(params.as_float(), axes.as_float(), index.p)
    omega, B, Q = ([float(c) for c in v] for v in (omega, B, Q))
    P = _pfromroots(list(zeros), 1.0)
    dP = _pderiv(P)
    ddP = _pderiv(dP)
    R = _padd(_padd(_pmul(omega, ddP), _pmul(B, dP)), _pmul(Q, P))
    # Lambda P has degree N + k - 1; columns are t^i P
    N = len(P) - 1
    rows = N + k
    M = np.zeros((rows, k))
    for i in range(k):
        for d, c in enumerate(P):
            M[i + d, i] = c
    rhs = -np.array([R[d] if d < len(R) else 0.0 for d in range(rows)])
    lam, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    return tuple(float(v) for v in lam)


def solve_stieltjes(params: DunklParams, axes: EllipsoidAxes, index: HarmonicIndex) -> StieltjesPolynomial:
    """Quasi-polynomial E_{n,p} with n_j zeros in (a_{j-1}, a_j) and its lambda."""
    if axes.k != params.k or index.k != params.k:
        raise InvalidParameterError("dimension mismatch between parameters, axes and index")
    zeros = _solve_zeros(params, axes, index)
    coeffs = None
    if params.k == 1 and params.exact and axes.exact:
        coeffs, lam = _exact_planar(params, axes, index)
    else:
        lam = _fit_lambda(params, axes, index, np.concatenate(zeros) if zeros else [])
    return StieltjesPolynomial(params, axes, index, tuple(tuple(g) for g in zeros), lam, coeffs)


def eval_E(sp: StieltjesPolynomial, t, allow_interior: bool = False):
    return sp(t, allow_interior=allow_interior)


def eval_E_prime(sp: StieltjesPolynomial, t, allow_interior: bool = False):
    return sp.derivative(t, allow_interior=allow_interior)


@dataclass(frozen=True)
class SecondSolution:
    """The solution decaying like t^(-mu - m/2), defined for t > a_k."""

    base: StieltjesPolynomial

    @property
    def wronskian_constant(self):
        return float(self.base.params.mu) + self.base.m

    def _integral(self, t, derivative=False):
        sp = self.base
        if t <= float(sp.axes.a[-1]):
            raise DomainError("the second solution is defined only for t > a_k")
        poles = [float(v) for v in sp.axes.a]
        exps = [float(al) + 0.5 + pj for al, pj in zip(sp.params.alpha, sp.index.p)]
        c = self.wronskian_constant
        return tail_integral(t, poles, exps, sp.all_zeros, c, scale=c, derivative=derivative)

    def __call__(self, t) -> float:
        t = float(t)
        return float(self.base(t)) * self._integral(t)

    def derivative(self, t) -> float:
        t = float(t)
        I, dI = self._integral(t, derivative=True)
        return self.base.derivative(t) * I + float(self.base(t)) * dI

    def value_and_derivative(self, t) -> tuple:
        t = float(t)
        I, dI = self._integral(t, derivative=True)
        E = float(self.base(t))
        return E * I, self.base.derivative(t) * I + E * dI

    def wronskian_rhs(self, t) -> float:
        sp = self.base
        return self.wronskian_constant * math.exp(
            -sum((float(al) + 0.5) * math.log(t - float(aj)) for al, aj in zip(sp.params.alpha, sp.axes.a)))


def second_solution(sp: StieltjesPolynomial) -> SecondSolution:
    return SecondSolution(sp)


def eval_Ecal(ss: SecondSolution, t) -> float:
    return ss(t)


def eval_Ecal_prime(ss: SecondSolution, t) -> float:
    return ss.derivative(t)


def wronskian_residual(ss: SecondSolution, t) -> float:
    """|calE E' - E calE' - W(t)| / |W(t)| with W = (mu+m) prod (t-a_j)^(-alpha_j-1/2)."""
    t = float(t)
    Ec, dEc = ss.value_and_derivative(t)
    E = float(ss.base(t))
    dE = ss.base.derivative(t)
    W = ss.wronskian_rhs(t)
    return abs(Ec * dE - E * dEc - W) / abs(W)
