"""One-dimensional special functions: Jacobi P and Q, Gauss-Jacobi rules,
Gegenbauer polynomials and the Pochhammer/normalisation constants."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .model import DomainError, NonConvergenceError, is_exact


@dataclass(frozen=True, eq=False)
class JacobiParams:
    alpha: object
    beta: object

    def __post_init__(self):
        if not (self.alpha > -1 and self.beta > -1):
            raise DomainError("Jacobi parameters must exceed -1")

    @property
    def exact(self) -> bool:
        return is_exact(self.alpha) and is_exact(self.beta)

    def __eq__(self, other):
        if not isinstance(other, JacobiParams):
            return NotImplemented
        return (self.alpha, self.beta, self.exact) == (other.alpha, other.beta, other.exact)

    def __hash__(self):
        return hash((self.alpha, self.beta, self.exact))

    @classmethod
    def from_dunkl(cls, alpha):
        """Planar identification alpha = alpha_1 - 1/2, beta = alpha_0 - 1/2."""
        half = Fraction(1, 2) if all(is_exact(a) for a in alpha) else 0.5
        return cls(alpha[1] - half, alpha[0] - half)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss rule for the weight (1-x)^a (1+x)^b on [-1, 1]."""

    nodes: np.ndarray
    weights: np.ndarray
    a: float
    b: float

    def __len__(self):
        return len(self.nodes)

    def integrate(self, f):
        return np.dot(self.weights, f(self.nodes))


def pochhammer(x, r: int):
    """Rising factorial (x)_r; exact when x is rational."""
    out = Fraction(1) if is_exact(x) else 1.0
    for i in range(r):
        out *= x + i
    return out


def log_gamma(x: float) -> float:
    return math.lgamma(x)


def a_n_const(n: int, jp: JacobiParams):
    """Factor turning P_n^(alpha,beta) into a monic polynomial."""
    return math.factorial(n) * 2**n / pochhammer(jp.alpha + jp.beta + n + 1, n)


def b_n_const(n: int, jp: JacobiParams) -> float:
    al, be = float(jp.alpha), float(jp.beta)
    return math.exp(-(n + al + be) * math.log(2) + log_gamma(2 * n + al + be + 2)
                    - log_gamma(n + al + 1) - log_gamma(n + be + 1))


def jacobi_p(n: int, jp: JacobiParams, t):
    """P_n^(alpha,beta)(t) by the three-term recurrence.

    Works on scalars, numpy arrays and (with rational parameters) fractions.
    """
    al, be = jp.alpha, jp.beta
    p0 = t * 0 + 1
    if n == 0:
        return p0
    p1 = (al + 1) + (al + be + 2) * (t - 1) / 2
    for j in range(2, n + 1):
        c = 2 * j + al + be
        a1 = 2 * j * (j + al + be) * (c - 2)
        a2 = (c - 1) * (al * al - be * be)
        a3 = (c - 2) * (c - 1) * c
        a4 = 2 * (j + al - 1) * (j + be - 1) * c
        p0, p1 = p1, ((a2 + a3 * t) * p1 - a4 * p0) / a1
    return p1


def jacobi_p_coeffs(n: int, jp: JacobiParams) -> list:
    """Monomial coefficients (ascending) of P_n^(alpha,beta).

    Uses the explicit sum over binomials in (t-1)/2 and (t+1)/2; exact for
    rational parameters.
    """
    al, be = jp.alpha, jp.beta
    exact = is_exact(al) and is_exact(be)
    one = Fraction(1) if exact else 1.0
    # P_n = sum_s C(n+al, n-s) C(n+be, s) ((t-1)/2)^s ((t+1)/2)^(n-s)
    coeffs = [one * 0] * (n + 1)
    for s in range(n + 1):
        c = _gbinom(n + al, n - s) * _gbinom(n + be, s) / (one * 2**n)
        # (t-1)^s (t+1)^(n-s)
        poly = [one]
        for _ in range(s):
            poly = _polymul(poly, [-one, one])
        for _ in range(n - s):
            poly = _polymul(poly, [one, one])
        for i, v in enumerate(poly):
            coeffs[i] += c * v
    return coeffs


def _gbinom(x, j: int):
    out = Fraction(1) if is_exact(x) else 1.0
    for i in range(j):
        out = out * (x - i) / (i + 1)
    return out


def _polymul(p, q):
    out = [p[0] * 0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def gegenbauer_c(m: int, mu, u):
    """C_m^mu(u) by the standard recurrence."""
    c0 = u * 0 + 1
    if m == 0:
        return c0
    c1 = 2 * mu * u
    for j in range(2, m + 1):
        c0, c1 = c1, (2 * u * (j + mu - 1) * c1 - (j + 2 * mu - 2) * c0) / j
    return c1


@lru_cache(maxsize=512)
def _gauss_jacobi_cached(N: int, a: float, b: float):
    j = np.arange(N, dtype=float)
    ab = a + b
    c = 2 * j + ab
    with np.errstate(divide="ignore", invalid="ignore"):
        diag = np.where(np.abs(c * (c + 2)) > 0, (b * b - a * a) / (c * (c + 2)), 0.0)
    if N > 0 and abs(ab + 2) > 0:
        diag[0] = (b - a) / (ab + 2)
    jj = j[1:]
    cc = 2 * jj + ab
    with np.errstate(divide="ignore", invalid="ignore"):
        off = np.sqrt(4 * jj * (jj + a) * (jj + b) * (jj + ab) / (cc * cc * (cc + 1) * (cc - 1)))
    if N > 1 and abs(ab + 1) < 1e-14:
        # removable singularity of the first off-diagonal entry
        off[0] = np.sqrt(4 * (1 + a) * (1 + b) / ((ab + 2) ** 2 * (ab + 3)))
    nodes, vecs = eigh_tridiagonal(diag, off)
    mu0 = math.exp((ab + 1) * math.log(2) + math.lgamma(a + 1) + math.lgamma(b + 1)
                   - math.lgamma(ab + 2))
    weights = mu0 * vecs[0, :] ** 2
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_jacobi_rule(N: int, a: float, b: float) -> QuadratureRule:
    """N-point Gauss rule for (1-x)^a (1+x)^b via Golub-Welsch."""
    if N < 1:
        raise DomainError("need at least one node")
    if not (a > -1 and b > -1):
        raise DomainError("Gauss-Jacobi exponents must exceed -1")
    nodes, weights = _gauss_jacobi_cached(int(N), float(a), float(b))
    return QuadratureRule(nodes, weights, float(a), float(b))


# ---------------------------------------------------------------------------
# Decaying second solutions by reduction of order.


def tail_integral(t, poles, exponents, zeros, decay, scale=1.0, derivative=False,
                  rtol=1e-13, nmax=512):
    """Evaluate I(t) = scale * int_t^inf prod (s-c_j)^(-e_j) prod (s-z_i)^(-2) ds.

    ``poles`` are c_0 < ... < c_K with c_K the largest singular point and
    ``t > c_K``.  ``decay`` is the exponent d with integrand ~ s^(-d-1) at
    infinity.  The substitution s = c_K + (t - c_K)/u turns the tail into an
    integral over u in (0, 1] with the algebraic factor u^(d-1) handled by
    Gauss-Jacobi; the interval is graded geometrically towards u = 0 where
    the mapped poles accumulate when t approaches c_K.

    With ``derivative=True`` the t-derivative of I is returned as well,
    obtained by differentiating under the integral sign (it is not derived
    from the Wronskian, so the Wronskian stays an independent check).
    """
    t = float(t)
    poles = np.asarray(poles, dtype=float)
    exponents = np.asarray(exponents, dtype=float)
    zeros = np.asarray(zeros, dtype=float)
    ck = poles[-1]
    T = t - ck
    if T <= 0:
        raise DomainError("tail integral needs t beyond the largest singular point")
    # mapped singularities sit at u = -T / (ck - c) for every c < ck
    others = np.concatenate([poles[:-1], zeros])
    gap = ck - others.max() if others.size else 1.0
    delta = min(1.0, T / max(gap, 1e-300))
    edges = [0.0, delta]
    while edges[-1] < 1.0:
        edges.append(min(1.0, 2.0 * edges[-1]))
    shifted_p = ck - poles[:-1]
    shifted_z = ck - zeros
    ek = exponents[-1]

    def psi(u, with_dt):
        # prod_j (T + (ck - c_j) u)^(-e_j) * prod_i (T + (ck - z_i) u)^(-2)
        logv = np.zeros_like(u)
        dlog = np.zeros_like(u)
        for c, e in zip(shifted_p, exponents[:-1]):
            base = T + c * u
            logv -= e * np.log(base)
            dlog -= e / base
        for c in shifted_z:
            base = T + c * u
            logv -= 2 * np.log(base)
            dlog -= 2 / base
        v = np.exp(logv)
        return v, dlog

    # with s = ck + T/u: integrand ds = T^(1-e_k) u^(d-1) psi(u) du
    pref = T ** (1.0 - ek)

    def panel(lo, hi, N, first):
        if first:
            rule = gauss_jacobi_rule(N, 0.0, decay - 1.0)
            half = 0.5 * (hi - lo)
            u = lo + half * (rule.nodes + 1.0)
            w = rule.weights * half ** decay
            base_w = w
        else:
            rule = gauss_jacobi_rule(N, 0.0, 0.0)
            half = 0.5 * (hi - lo)
            u = lo + half * (rule.nodes + 1.0)
            base_w = rule.weights * half * u ** (decay - 1.0)
        v, dlog = psi(u, derivative)
        val = np.dot(base_w, v)
        if not derivative:
            return val, 0.0
        # d/dT of T^(1-ek) psi: (1-ek)/T * ... + dlog * ...
        dval = np.dot(base_w, v * ((1.0 - ek) / T + dlog))
        return val, dval

    total, dtotal = 0.0, 0.0
    for i in range(len(edges) - 1):
        lo, hi = edges[i], edges[i + 1]
        prev = None
        N = 8
        while True:
            cur = panel(lo, hi, N, i == 0)
            if prev is not None:
                err = abs(cur[0] - prev[0])
                derr = abs(cur[1] - prev[1])
                if err <= rtol * abs(cur[0]) and (not derivative or derr <= rtol * abs(cur[1]) + 1e-300):
                    break
            if N >= nmax:
                raise NonConvergenceError(
                    f"tail quadrature did not converge at t={t}: last values {prev} and {cur}")
            prev = cur
            N *= 2
        total += cur[0]
        dtotal += cur[1]
    val = scale * pref * total
    if not derivative:
        return val
    # pref' = (1-ek) T^-ek, already folded into dtotal through the log-derivative
    return val, scale * pref * dtotal


def jacobi_q(n: int, jp: JacobiParams, t, derivative: bool = False):
    """Jacobi function of the second kind Q_n^(alpha,beta)(t) for t > 1.

    Normalised so that b_n Q_n(t) t^(n+alpha+beta+1) -> 1, computed as
    Q_n = P_n(t) * C * int_t^inf (s-1)^(-alpha-1) (s+1)^(-beta-1) P_n(s)^(-2) ds.
    """
    t = float(t)
    if t <= 1:
        raise DomainError("Jacobi Q_n is evaluated only for t > 1")
    al, be = float(jp.alpha), float(jp.beta)
    decay = 2 * n + al + be + 1
    if decay <= 0:
        raise DomainError("need 2n + alpha + beta + 1 > 0 for a decaying solution")
    an = float(a_n_const(n, jp))
    zeros = _jacobi_zeros(n, al, be)
    # monic E = a_n P_n; E_cal = decay * E * int E^-2 prod (s-a_j)^-(alpha_j+1/2)
    res = tail_integral(t, [-1.0, 1.0], [be + 1, al + 1], zeros, decay,
                        scale=decay, derivative=derivative)
    E = float(an * jacobi_p(n, JacobiParams(al, be), t))
    bn = b_n_const(n, jp)
    if not derivative:
        return E * res / bn
    I, dI = res
    dE = an * jacobi_p_derivative(n, JacobiParams(al, be), t)
    return E * I / bn, (dE * I + E * dI) / bn


def jacobi_p_derivative(n: int, jp: JacobiParams, t):
    if n == 0:
        return t * 0
    return (n + jp.alpha + jp.beta + 1) / 2 * jacobi_p(n - 1, JacobiParams(jp.alpha + 1, jp.beta + 1), t)


@lru_cache(maxsize=256)
def _jacobi_zeros(n: int, al: float, be: float):
    if n == 0:
        return np.zeros(0)
    return gauss_jacobi_rule(n, al, be).nodes.copy()
