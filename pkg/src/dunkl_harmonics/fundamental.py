"""The fundamental solution Phi of the Dunkl-Laplacian and its expansions.

Phi(x, z) = Gamma(mu) / (4 prod Gamma(alpha_j + 1/2))
            * int_{[-1,1]^(k+1)} Psi(x, z, tau)^(-mu) prod_j dnu_j(tau_j),

Psi = |x|^2 - 2 sum tau_j x_j z_j + |z|^2, with the probability measures
dnu_j = c_{alpha_j} (1 + tau)(1 - tau^2)^(alpha_j - 1) dtau, replaced by the
point mass at tau_j = 1 when alpha_j = 0.  Each measure is a Gauss-Jacobi
weight (1 - tau)^(alpha - 1) (1 + tau)^alpha.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .algebra import RadialFunction, SparsePolynomial, dunkl_apply, dunkl_factorial
from .harmonics import (HarmonicEvaluator, e_norm_squared, external_F,
                        harmonic_evaluator, internal_F, reproducing_kernel,
                        spheroconal_G_poly)
from .coords import on_degenerate_set, t0_exterior
from .integrals import sphere_rule
from .model import (DomainError, DunklParams, EllipsoidAxes, NonConvergenceError,
                    check_point, indices_of_degree)
from .orthopoly import gauss_jacobi_rule

NMIN, NMAX = 8, 256
CHUNK = 1 << 21          # grid entries per block of rows


def psi(x: Sequence, z: Sequence, tau: Sequence) -> float:
    x, z, tau = (np.asarray(v, dtype=float) for v in (x, z, tau))
    if np.any(np.abs(tau) > 1):
        raise DomainError("tau must lie in [-1, 1]^(k+1)")
    return float(x @ x - 2 * np.sum(tau * x * z) + z @ z)


@dataclass(frozen=True)
class PhiEvaluator:
    params: DunklParams
    order: int | None = None          # fixed per-coordinate order; None escalates
    rtol: float = 1e-10
    prefactor: float = field(init=False)

    def __post_init__(self):
        p = self.params
        pref = math.exp(math.lgamma(float(p.mu)) - sum(math.lgamma(float(a) + 0.5) for a in p.alpha)) / 4
        object.__setattr__(self, "prefactor", pref)
        if self.order is not None and not 4 <= self.order <= 512:
            raise DomainError("quadrature order must lie in [4, 512]")

    @property
    def degenerate(self) -> tuple:
        return tuple(float(a) == 0 for a in self.params.alpha)

    def rule(self, j: int, N: int):
        """Normalised nodes/weights for coordinate j (a single node at 1 when alpha_j = 0)."""
        a = float(self.params.alpha[j])
        if a == 0:
            return np.ones(1), np.ones(1)
        g = gauss_jacobi_rule(N, a - 1.0, a)
        c = math.exp(math.lgamma(a + 0.5) - math.lgamma(0.5) - math.lgamma(a))   # 1/B(1/2, a)
        return g.nodes, g.weights * c

    def with_order(self, N: int) -> "PhiEvaluator":
        return PhiEvaluator(self.params, N, self.rtol)


def _tensor_sum(pe: PhiEvaluator, X: np.ndarray, z: np.ndarray, N: int) -> np.ndarray:
    """Quadrature of Psi^(-mu) at fixed order for many x (rows of X)."""
    grid = math.prod(len(pe.rule(j, N)[0]) for j in range(X.shape[1]))
    step = max(1, CHUNK // grid)
    if len(X) > step:
        # rows are independent; blocks keep the tensor grid within memory
        return np.concatenate([_tensor_block(pe, X[i:i + step], z, N) for i in range(0, len(X), step)])
    return _tensor_block(pe, X, z, N)


def _tensor_block(pe: PhiEvaluator, X: np.ndarray, z: np.ndarray, N: int) -> np.ndarray:
    mu = float(pe.params.mu)
    base = np.sum(X * X, axis=1) + z @ z
    lin = -2.0 * X * z                       # coefficient of tau_j
    # build sum_j tau_j lin_j on the tensor grid, one coordinate at a time
    acc = base[:, None]
    wacc = np.ones(1)
    for j in range(X.shape[1]):
        nodes, weights = pe.rule(j, N)
        acc = (acc[:, :, None] + lin[:, j][:, None, None] * nodes[None, None, :]).reshape(len(X), -1)
        wacc = (wacc[:, None] * weights[None, :]).ravel()
    if np.any(acc <= 0):
        raise DomainError("Psi vanishes on the quadrature grid: point pair too close to the singular set")
    return (acc ** (-mu)) @ wacc


def _min_psi(X: np.ndarray, z: np.ndarray, degenerate: tuple) -> np.ndarray:
    deg = np.array(degenerate)
    prod = X * z
    # tau_j = sign(x_j z_j) minimises Psi; degenerate coordinates are pinned at 1
    m = np.where(deg, prod, np.abs(prod))
    return np.sum(X * X, axis=1) + z @ z - 2 * np.sum(m, axis=1)


def phi_many(pe: PhiEvaluator, X, z) -> np.ndarray:
    """Phi(x, z) for every row x of X."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    z = np.asarray(z, dtype=float)
    if X.shape[1] != pe.params.k + 1 or z.shape != (pe.params.k + 1,):
        raise DomainError("points must have k+1 coordinates")
    scale = np.sum(X * X, axis=1) + z @ z
    if np.any(_min_psi(X, z, pe.degenerate) < 1e-12 * scale):
        raise DomainError("point pair on (or within 1e-12 of) the singular set |x_j| = |z_j| for all j")
    if pe.order is not None:
        return pe.prefactor * _tensor_sum(pe, X, z, pe.order)
    N = NMIN
    prev = _tensor_sum(pe, X, z, N)
    while N < NMAX:
        N *= 2
        cur = _tensor_sum(pe, X, z, N)
        if np.all(np.abs(cur - prev) <= pe.rtol * np.abs(cur)):
            return pe.prefactor * cur
        prev = cur
    raise NonConvergenceError(
        f"Phi quadrature did not converge up to {NMAX} nodes per coordinate; "
        f"last two values {pe.prefactor * prev[0]!r}, {pe.prefactor * cur[0]!r}")


def phi(pe: PhiEvaluator, x, z) -> float:
    x = check_point(x, pe.params.k)
    z = check_point(z, pe.params.k)
    return float(phi_many(pe, np.array([x], dtype=float), np.array(z, dtype=float))[0])


def settled_order(pe: PhiEvaluator, X, z) -> int:
    """Smallest doubling order at which Phi has converged for the rows of X."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    z = np.asarray(z, dtype=float)
    N = NMIN
    prev = _tensor_sum(pe, X, z, N)
    while N < NMAX:
        N *= 2
        cur = _tensor_sum(pe, X, z, N)
        if np.all(np.abs(cur - prev) <= pe.rtol * np.abs(cur)):
            return N
        prev = cur
    raise NonConvergenceError("Phi quadrature did not converge")


def phi_at_origin(params: DunklParams, z) -> float:
    """Gamma(mu) / (4 prod Gamma(alpha_j + 1/2)) |z|^(-2 mu)."""
    z = np.asarray(z, dtype=float)
    return PhiEvaluator(params).prefactor * float(z @ z) ** (-float(params.mu))


# -- Theorem-level expansions -------------------------------------------------


def laplace_expansion(pe: PhiEvaluator, x, z, M: int, axes: EllipsoidAxes | None = None) -> float:
    """Partial sum over m <= M of |x|^m |z|^(-2mu-m) P_m(x/|x|, z/|z|) / (2(mu + m))."""
    x = np.asarray(check_point(x, pe.params.k), dtype=float)
    z = np.asarray(check_point(z, pe.params.k), dtype=float)
    rx, rz = np.linalg.norm(x), np.linalg.norm(z)
    if not rx < rz:
        raise DomainError("the Laplace expansion needs |x| < |z|")
    return math.fsum(laplace_terms(pe.params, x, z, M, axes))


def laplace_terms(params: DunklParams, x, z, M: int, axes: EllipsoidAxes | None = None) -> list:
    """The individual terms m = 0..M of the Laplace-type expansion."""
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    rx, rz = np.linalg.norm(x), np.linalg.norm(z)
    mu = float(params.mu)
    out = []
    for m in range(M + 1):
        if rx == 0:
            if m > 0:
                out.append(0.0)
                continue
            # P_0 is constant, any unit vector will do
            xh = np.zeros_like(x)
            xh[0] = 1.0
        else:
            xh = x / rx
        Pm = reproducing_kernel(params, m, xh, z / rz, axes)
        out.append(rx**m * rz ** (-2 * mu - m) * Pm / (2 * (mu + m)))
    return out


def _fd_stencil(n: int):
    """Offsets and weights of the second-order central difference for d^n/dx^n."""
    table = {
        0: ((0,), (1.0,)),
        1: ((-1, 1), (-0.5, 0.5)),
        2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
        3: ((-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5)),
        4: ((-2, -1, 0, 1, 2), (1.0, -4.0, 6.0, -4.0, 1.0)),
    }
    if n not in table:
        raise DomainError("finite differences are implemented up to order 4")
    return table[n]


def _partial_fd(f, x0: np.ndarray, q: Sequence[int], h: float) -> float:
    """Tensor central difference for d^q f at x0 (f evaluates rows)."""
    stencils = [_fd_stencil(qj) for qj in q]
    pts, wts = [], []
    for combo in itertools.product(*[list(zip(*s)) for s in stencils]):
        off = np.array([c[0] for c in combo], dtype=float)
        pts.append(x0 + h * off)
        wts.append(math.prod(c[1] for c in combo))
    vals = f(np.array(pts))
    return float(np.dot(wts, vals)) / h ** sum(q)


def richardson_partial(f, x0, q: Sequence[int], h: float) -> float:
    """One Richardson level on the O(h^2) central difference."""
    d1 = _partial_fd(f, np.asarray(x0, dtype=float), q, h)
    d2 = _partial_fd(f, np.asarray(x0, dtype=float), q, h / 2)
    return (4 * d2 - d1) / 3


def lemma31_check(pe: PhiEvaluator, q: Sequence[int], z, h: float | None = None) -> tuple:
    """(D_x^q Phi(x, z) at x = 0 by finite differences, (-1)^|q| D_z^q Phi(0, z) exactly).

    The left side uses D_x^q Phi|_0 = prod_j D^(q_j)(x_j^(q_j)) d^q Phi / q!;
    the right side applies Dunkl operators to |z|^(-2 mu) in the radial class.
    """
    params = pe.params
    q = tuple(int(v) for v in q)
    z = np.asarray(check_point(z, params.k), dtype=float)
    if len(q) != params.k + 1 or any(v < 0 for v in q):
        raise DomainError("q must be a multi-index of length k+1")
    if np.all(z == 0):
        raise DomainError("z must be nonzero")
    if sum(q) > 4:
        raise DomainError("lemma31_check supports |q| <= 4")
    rz = float(np.linalg.norm(z))
    if h is None:
        h = (1e-3 if sum(q) <= 2 else 2e-2) * rz
    # freeze the quadrature order so that the stencil sees one smooth function
    probe = np.array([np.full(params.k + 1, 2 * h)])
    N = pe.order or min(2 * settled_order(pe, probe, z), NMAX)
    fixed = pe.with_order(N)
    deriv = richardson_partial(lambda X: phi_many(fixed, X, z), np.zeros(params.k + 1), q, h)
    lhs = deriv * math.prod(float(dunkl_factorial(qj, aj)) / math.factorial(qj)
                            for qj, aj in zip(q, params.alpha))
    f = RadialFunction.power_of_norm(params.mu, params.k + 1)
    for j, qj in enumerate(q):
        for _ in range(qj):
            f = dunkl_apply(j, f, params.alpha)
    rhs = (-1) ** sum(q) * pe.prefactor * f(tuple(float(v) for v in z))
    return lhs, rhs


def _check_outside(z, R: float):
    if not np.linalg.norm(z) > R:
        raise DomainError(f"z must lie outside the sphere of radius {R}")


def rep_sphere(pe: PhiEvaluator, ev: HarmonicEvaluator, z, N: int = 48) -> float:
    """2(mu + m) int_{S^k} h^2 Phi(x, z) G(x) dS, a candidate for calG(z)."""
    z = np.asarray(check_point(z, pe.params.k), dtype=float)
    _check_outside(z, 1.0)
    return rep_sphere_poly(pe, spheroconal_G_poly(ev), ev.m, z, N)


@lru_cache(maxsize=16)
def _phi_on_rule(pe: PhiEvaluator, N: int, z: tuple) -> np.ndarray:
    """Phi(., z) at the nodes of the order-N sphere rule, shared across harmonics."""
    vals = phi_many(pe, sphere_rule(pe.params.alpha, N).nodes, np.array(z))
    vals.setflags(write=False)
    return vals


def rep_sphere_poly(pe: PhiEvaluator, Y: SparsePolynomial, m: int, z, N: int = 48) -> float:
    z = np.asarray(z, dtype=float)
    _check_outside(z, 1.0)
    rule = sphere_rule(pe.params.alpha, N)
    vals = _phi_on_rule(pe, N, tuple(float(v) for v in z)) * Y(rule.nodes)
    return 2 * (float(pe.params.mu) + m) * rule.integrate(vals)


def rep_two_spheres(pe: PhiEvaluator, Ycal: RadialFunction, z, R: float = 1.0, N: int = 48,
                    eps: float = 1e-3) -> float:
    """int_{|x|=R} h^2 (calY dPhi/dnu - Phi dcalY/dnu) dS, a candidate for calY(z).

    calY must be homogeneous; its normal derivative follows from Euler's
    relation.  dPhi/dnu is a Richardson-extrapolated central difference at a
    frozen quadrature order.
    """
    z = np.asarray(check_point(z, pe.params.k), dtype=float)
    _check_outside(z, R)
    hom = Ycal.homogeneity()
    if len(hom) != 1:
        raise DomainError("calY must be homogeneous")
    # homogeneity() reports |q| - 2s; the full degree subtracts 2 mu
    deg = float(next(iter(hom))) - 2 * float(pe.params.mu)
    rule = sphere_rule(pe.params.alpha, N)
    X = R * np.asarray(rule.nodes)
    N_phi = pe.order or min(2 * settled_order(pe, X, z), NMAX)
    fixed = pe.with_order(N_phi)

    def radial_slice(s):
        return phi_many(fixed, X * s, z)

    h = eps
    d1 = (radial_slice(1 + h) - radial_slice(1 - h)) / (2 * h * R)
    d2 = (radial_slice(1 + h / 2) - radial_slice(1 - h / 2)) / (h * R)
    dphi = (4 * d2 - d1) / 3
    ph = radial_slice(1.0)
    Y = Ycal(X)
    dY = deg / R * Y
    weight = R ** (2 * sum(float(a) for a in pe.params.alpha) + pe.params.k)
    return weight * rule.integrate(Y * dphi - ph * dY)


def rep_ellipsoid(pe: PhiEvaluator, ev: HarmonicEvaluator, z, t, N: int = 48) -> float:
    """Candidate for calF(z) from the integral over the ellipsoid J_t.

    The J-integral of h^2 w Phi F is pulled back to the sphere by y = d x,
    which turns it into prod d_j^(2 alpha_j + 1) int_{S^k} h^2 Phi(d x, z) F(d x) dS;
    that factor cancels the prod (t - a_j)^(-alpha_j - 1/2) in front.
    """
    params = pe.params
    z = np.asarray(check_point(z, params.k), dtype=float)
    t = float(t)
    if t <= float(ev.axes.a[-1]):
        raise DomainError("the ellipsoid parameter t must exceed a_k")
    if not t0_exterior(ev.axes, z) > t:
        raise DomainError("z must lie outside the ellipsoid J_t")
    d = np.sqrt(t - np.array([float(v) for v in ev.axes.a]))
    rule = sphere_rule(params.alpha, N)
    Y = d * np.asarray(rule.nodes)
    F = np.array([internal_F(ev, y) for y in Y])
    vals = phi_many(pe, Y, z) * F
    E_t = float(ev.E(t))
    return 2 * (float(params.mu) + ev.m) / E_t**2 * rule.integrate(vals)


def heine_terms(pe: PhiEvaluator, axes: EllipsoidAxes, y, z, M: int) -> list:
    """[(index, e^2 F(y) calF(z) / (2(mu + m)))] for all indices of degree <= M."""
    params = pe.params
    y = check_point(y, params.k)
    z = check_point(z, params.k)
    if not t0_exterior(axes, z) > _t0_or_floor(axes, y):
        raise DomainError("the t_0 coordinate of z must exceed that of y")
    mu = float(params.mu)
    out = []
    for m in range(M + 1):
        for idx in indices_of_degree(params.k, m):
            ev = harmonic_evaluator(params, axes, idx)
            val = e_norm_squared(ev) * internal_F(ev, y) * external_F(ev, z) / (2 * (mu + m))
            out.append((idx, val))
    return out


def _t0_or_floor(axes: EllipsoidAxes, y) -> float:
    if on_degenerate_set(axes, y):
        return float(axes.a[-1])
    return t0_exterior(axes, y)


def heine_expansion(pe: PhiEvaluator, axes: EllipsoidAxes, y, z, M: int) -> float:
    """Partial sum of the bilinear expansion of Phi(y, z) in ellipsoidal harmonics."""
    return math.fsum(v for _, v in heine_terms(pe, axes, y, z, M))
