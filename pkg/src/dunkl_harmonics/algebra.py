"""Sparse polynomials, the radial extension class and Dunkl operators.

A :class:`SparsePolynomial` maps exponent tuples to nonzero coefficients.  A
:class:`RadialFunction` is a finite sum

    sum c * x^q * |x|^(-2 (mu + s))

with integer shifts ``s``.  Both classes are closed under the Dunkl operators

    D_j u(x) = d_j u(x) + alpha_j (u(x) - u(sigma_j x)) / x_j .

Coefficients are whatever numbers the caller supplies: fractions give exact
results, floats give floating point results.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Mapping, Sequence

import numpy as np

from .model import DomainError, PreconditionError, is_exact


def _graded_key(q):
    return (sum(q), q)


def _is_zero(c) -> bool:
    return c == 0


def _coeff_to_json(c):
    if isinstance(c, Rational):
        c = Fraction(c)
        return f"{c.numerator}/{c.denominator}"
    return float(c)


def _coeff_from_json(c):
    if isinstance(c, str):
        return Fraction(c)
    if isinstance(c, int):
        return Fraction(c)
    return float(c)


class SparsePolynomial:
    """Multivariate polynomial in ``nvars`` variables with sparse storage."""

    __slots__ = ("terms", "nvars")

    def __init__(self, terms: Mapping[tuple, object] | None = None, nvars: int | None = None):
        clean = {}
        for q, c in (terms or {}).items():
            q = tuple(int(v) for v in q)
            if not _is_zero(c):
                clean[q] = clean.get(q, 0) + c
                if _is_zero(clean[q]):
                    del clean[q]
        if nvars is None:
            if not clean:
                raise ValueError("nvars is required for the zero polynomial")
            nvars = len(next(iter(clean)))
        if any(len(q) != nvars for q in clean):
            raise ValueError("exponent vectors must all have length nvars")
        self.terms = clean
        self.nvars = nvars

    # construction -----------------------------------------------------
    @classmethod
    def constant(cls, c, nvars: int) -> "SparsePolynomial":
        return cls({(0,) * nvars: c}, nvars)

    @classmethod
    def variable(cls, j: int, nvars: int, c=1) -> "SparsePolynomial":
        q = [0] * nvars
        q[j] = 1
        return cls({tuple(q): c}, nvars)

    @classmethod
    def monomial(cls, q: Sequence[int], c=1) -> "SparsePolynomial":
        return cls({tuple(q): c}, len(q))

    @classmethod
    def norm_squared(cls, nvars: int, c=1) -> "SparsePolynomial":
        terms = {}
        for j in range(nvars):
            q = [0] * nvars
            q[j] = 2
            terms[tuple(q)] = c
        return cls(terms, nvars)

    # inspection -------------------------------------------------------
    def items(self):
        """Terms in graded lexicographic order."""
        return sorted(self.terms.items(), key=lambda kv: _graded_key(kv[0]))

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(q) for q in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(q) for q in self.terms}) <= 1

    @property
    def exact(self) -> bool:
        return all(is_exact(c) for c in self.terms.values())

    def coefficient(self, q) -> object:
        return self.terms.get(tuple(q), 0)

    def homogeneous_part(self, d: int) -> "SparsePolynomial":
        return SparsePolynomial({q: c for q, c in self.terms.items() if sum(q) == d}, self.nvars)

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, SparsePolynomial):
            other = SparsePolynomial.constant(other, self.nvars)
        out = dict(self.terms)
        for q, c in other.terms.items():
            out[q] = out.get(q, 0) + c
        return SparsePolynomial(out, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return SparsePolynomial({q: -c for q, c in self.terms.items()}, self.nvars)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, SparsePolynomial):
            out = {}
            for q1, c1 in self.terms.items():
                for q2, c2 in other.terms.items():
                    q = tuple(a + b for a, b in zip(q1, q2))
                    out[q] = out.get(q, 0) + c1 * c2
            return SparsePolynomial(out, self.nvars)
        if isinstance(other, RadialFunction):
            return other * self
        return SparsePolynomial({q: c * other for q, c in self.terms.items()}, self.nvars)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return SparsePolynomial({q: c / scalar for q, c in self.terms.items()}, self.nvars)

    def __pow__(self, e: int):
        out = SparsePolynomial.constant(1, self.nvars)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, SparsePolynomial):
            return self.nvars == other.nvars and self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def map_coefficients(self, f) -> "SparsePolynomial":
        return SparsePolynomial({q: f(c) for q, c in self.terms.items()}, self.nvars)

    def to_float(self) -> "SparsePolynomial":
        return self.map_coefficients(float)

    def partial(self, j: int) -> "SparsePolynomial":
        out = {}
        for q, c in self.terms.items():
            if q[j]:
                r = list(q)
                r[j] -= 1
                out[tuple(r)] = c * q[j]
        return SparsePolynomial(out, self.nvars)

    def scale_variables(self, d: Sequence) -> "SparsePolynomial":
        """The polynomial x -> f(d_0 x_0, ..., d_k x_k)."""
        return SparsePolynomial(
            {q: c * math.prod((dj**qj for dj, qj in zip(d, q)), start=1) for q, c in self.terms.items()},
            self.nvars)

    # evaluation -------------------------------------------------------
    def __call__(self, x):
        """Evaluate at one point (sequence) or many points (array of shape (P, nvars))."""
        if isinstance(x, np.ndarray) and x.ndim == 2:
            if not self.terms:
                return np.zeros(x.shape[0])
            qs = np.array(list(self.terms.keys()))
            cs = np.array([float(c) for c in self.terms.values()])
            mon = np.prod(x[:, None, :] ** qs[None, :, :], axis=2)
            return mon @ cs
        total = 0
        for q, c in self.items():
            total += c * math.prod((xj**qj for xj, qj in zip(x, q)), start=1)
        return total

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for q, c in self.items():
            mon = "*".join(f"x{j}^{e}" if e > 1 else f"x{j}" for j, e in enumerate(q) if e)
            parts.append(f"({c})" + (f"*{mon}" if mon else ""))
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {"terms": [{"q": list(q), "c": _coeff_to_json(c)} for q, c in self.items()]}

    @classmethod
    def from_json(cls, obj: dict, nvars: int | None = None) -> "SparsePolynomial":
        terms = {tuple(t["q"]): _coeff_from_json(t["c"]) for t in obj["terms"]}
        return cls(terms, nvars)


class RadialFunction:
    """Finite sum of c * x^q * |x|^(-2 (mu + s)) with the shared constant ``mu``."""

    __slots__ = ("terms", "mu", "nvars", "_ints")

    def __init__(self, terms: Mapping[tuple, object] | None, mu, nvars: int):
        clean = {}
        for (q, s), c in (terms or {}).items():
            key = (tuple(q), int(s))
            if _is_zero(c):
                continue
            v = clean.get(key, 0) + c
            if _is_zero(v):
                clean.pop(key, None)
            else:
                clean[key] = v
        self.terms = clean
        self.mu = mu
        self.nvars = nvars

    @classmethod
    def from_polynomial(cls, poly: SparsePolynomial, mu, s: int = 0) -> "RadialFunction":
        """poly(x) * |x|^(-2 (mu + s))."""
        return cls({(q, s): c for q, c in poly.terms.items()}, mu, poly.nvars)

    @classmethod
    def power_of_norm(cls, mu, nvars: int, s: int = 0, c=1) -> "RadialFunction":
        return cls({((0,) * nvars, s): c}, mu, nvars)

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: (kv[0][1], _graded_key(kv[0][0])))

    def __len__(self):
        return len(self.terms)

    def homogeneity(self) -> set:
        """Set of degrees |q| - 2 mu - 2 s, reported through the integer part |q| - 2 s."""
        return {sum(q) - 2 * s for (q, s) in self.terms}

    def _check(self, other):
        if not isinstance(other, RadialFunction):
            raise TypeError("expected a RadialFunction")
        if other.nvars != self.nvars or other.mu != self.mu:
            raise ValueError("radial functions with different mu or dimension")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, 0) + c
        return RadialFunction(out, self.mu, self.nvars)

    def __neg__(self):
        return RadialFunction({k: -c for k, c in self.terms.items()}, self.mu, self.nvars)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, SparsePolynomial):
            out = {}
            for (q1, s), c1 in self.terms.items():
                for q2, c2 in other.terms.items():
                    key = (tuple(a + b for a, b in zip(q1, q2)), s)
                    out[key] = out.get(key, 0) + c1 * c2
            return RadialFunction(out, self.mu, self.nvars)
        if isinstance(other, RadialFunction):
            raise TypeError("products of two radial functions leave the class")
        return RadialFunction({k: c * other for k, c in self.terms.items()}, self.mu, self.nvars)

    __rmul__ = __mul__

    def map_coefficients(self, f) -> "RadialFunction":
        return RadialFunction({k: f(c) for k, c in self.terms.items()}, self.mu, self.nvars)

    def canonical(self) -> "RadialFunction":
        """Unique representative with every exponent of the last variable below 2.

        Uses x_k^2 = |x|^2 - (x_0^2 + ... + x_{k-1}^2); distinct canonical
        terms are linearly independent functions, so a function vanishes iff
        its canonical form is empty.
        """
        k = self.nvars - 1
        out = {}
        stack = list(self.terms.items())
        while stack:
            (q, s), c = stack.pop()
            if q[k] < 2:
                out[(q, s)] = out.get((q, s), 0) + c
                continue
            base = list(q)
            base[k] -= 2
            stack.append(((tuple(base), s - 1), c))
            for j in range(k):
                r = list(base)
                r[j] += 2
                stack.append(((tuple(r), s), -c))
        return RadialFunction(out, self.mu, self.nvars)

    def is_zero(self) -> bool:
        return not self.canonical().terms

    def equals(self, other, tol: float | None = None) -> bool:
        diff = (self - other).canonical()
        if tol is None:
            return not diff.terms
        scale = max((abs(c) for c in self.canonical().terms.values()), default=1.0)
        return all(abs(c) <= tol * max(scale, 1e-300) for c in diff.terms.values())

    # evaluation -------------------------------------------------------
    def __call__(self, x, exact: bool = False, factor=1):
        """Evaluate ``factor`` times the function at one point or at many (shape (P, nvars)).

        For a single point with rational coordinates (or ``exact=True``, which
        converts floats to fractions) the sum over terms is formed exactly and
        only the common factor |x|^(-2 mu) is applied in floating point.  A
        rational ``factor`` enters the exact sum, which keeps huge terms with
        tiny prefactors in range.
        """
        if isinstance(x, np.ndarray) and x.ndim == 2:
            if exact:
                return np.array([self(row, exact=True, factor=factor) for row in x])
            return float(factor) * self._eval_many(x)
        x = tuple(x)
        if exact:
            x = tuple(Fraction(v) for v in x)
        if all(v == 0 for v in x):
            raise DomainError("radial functions are singular at the origin")
        if all(isinstance(v, Rational) for v in x) and all(is_exact(c) for c in self.terms.values()):
            rho = sum(Fraction(v) ** 2 for v in x)
            inner = self._exact_inner(x)
            if is_exact(factor):
                return _scaled_float(inner * factor, float(rho) ** (-float(self.mu)))
            return _scaled_float(inner, float(factor) * float(rho) ** (-float(self.mu)))
        return float(factor) * float(self._eval_many(np.array([x], dtype=float))[0])

    def _integer_coefficients(self):
        """(terms, L) with every coefficient written as n / L over a common L."""
        cached = getattr(self, "_ints", None)
        if cached is None:
            fr = {k: Fraction(c) for k, c in self.terms.items()}
            L = math.lcm(*(c.denominator for c in fr.values())) if fr else 1
            cached = ([(q, s, c.numerator * (L // c.denominator)) for (q, s), c in fr.items()], L)
            self._ints = cached
        return cached

    def _exact_inner(self, x) -> Fraction:
        """sum c x^q |x|^(-2s) as an exact fraction.

        All denominators are cleared first so the sum runs over plain
        integers: with x_j = X_j / d and |x|^2 = R / d^2 a term equals
        c X^q d^(2s - |q|) R^(-s).
        """
        terms, L = self._integer_coefficients()
        if not terms:
            return Fraction(0)
        xs = [Fraction(v) for v in x]
        d = math.lcm(*(v.denominator for v in xs))
        X = [v.numerator * (d // v.denominator) for v in xs]
        R = sum(v * v for v in X)
        emin = min(2 * s - sum(q) for q, s, _ in terms)
        smax = max(s for _, s, _ in terms)
        xpow = [{} for _ in X]
        dpow, rpow = {}, {}

        def pw(cache, base, e):
            v = cache.get(e)
            if v is None:
                v = cache[e] = base**e
            return v

        total = 0
        for q, s, n in terms:
            v = n * pw(dpow, d, 2 * s - sum(q) - emin) * pw(rpow, R, smax - s)
            for j, e in enumerate(q):
                if e:
                    v *= pw(xpow[j], X[j], e)
            total += v
        num, den = total, L * R**smax
        if emin >= 0:
            num *= d**emin
        else:
            den *= d ** (-emin)
        return Fraction(num, den)

    def _eval_many(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        rho = np.sum(X * X, axis=1)
        if np.any(rho == 0):
            raise DomainError("radial functions are singular at the origin")
        if not self.terms:
            return np.zeros(X.shape[0])
        keys = list(self.terms.keys())
        qs = np.array([k[0] for k in keys])
        ss = np.array([k[1] for k in keys], dtype=float)
        cs = np.array([float(c) for c in self.terms.values()])
        mon = np.prod(X[:, None, :] ** qs[None, :, :], axis=2)
        rad = rho[:, None] ** (-ss[None, :])
        return (mon * rad) @ cs * rho ** (-float(self.mu))

    def __repr__(self):
        parts = []
        for (q, s), c in self.items():
            mon = "*".join(f"x{j}^{e}" if e > 1 else f"x{j}" for j, e in enumerate(q) if e)
            parts.append(f"({c})" + (f"*{mon}" if mon else "") + f"*|x|^(-2(mu+{s}))")
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"mu": _coeff_to_json(self.mu),
                "terms": [{"q": list(q), "c": _coeff_to_json(c), "s": s} for (q, s), c in self.items()]}

    @classmethod
    def from_json(cls, obj: dict, nvars: int | None = None) -> "RadialFunction":
        terms = {(tuple(t["q"]), int(t.get("s", 0))): _coeff_from_json(t["c"]) for t in obj["terms"]}
        if nvars is None:
            nvars = len(obj["terms"][0]["q"])
        return cls(terms, _coeff_from_json(obj["mu"]), nvars)


# ---------------------------------------------------------------------------
# Dunkl operators


def _scaled_float(q: Fraction, factor: float) -> float:
    """float(q) * factor without overflow when q alone exceeds the float range."""
    n, d = q.numerator, q.denominator
    if n == 0:
        return 0.0
    e = abs(n).bit_length() - d.bit_length()
    mant = (n << max(-e, 0)) / (d << max(e, 0))
    return math.ldexp(mant * factor, e)


def _odd_factor(qj: int, aj):
    return qj if qj % 2 == 0 else qj + 2 * aj


def dunkl_apply(j: int, f, alpha: Sequence):
    """D_j f for a SparsePolynomial or RadialFunction."""
    if isinstance(f, SparsePolynomial):
        if not 0 <= j < f.nvars:
            raise IndexError(j)
        out = {}
        aj = alpha[j]
        for q, c in f.terms.items():
            if q[j]:
                r = list(q)
                r[j] -= 1
                r = tuple(r)
                out[r] = out.get(r, 0) + c * _odd_factor(q[j], aj)
        return SparsePolynomial(out, f.nvars)
    if isinstance(f, RadialFunction):
        if not 0 <= j < f.nvars:
            raise IndexError(j)
        out = {}
        aj = alpha[j]
        mu = f.mu
        for (q, s), c in f.terms.items():
            if q[j]:
                r = list(q)
                r[j] -= 1
                key = (tuple(r), s)
                out[key] = out.get(key, 0) + c * _odd_factor(q[j], aj)
            # |x|^(-2 nu) is sigma_j invariant: D_j acts as the gradient on it
            r = list(q)
            r[j] += 1
            key = (tuple(r), s + 1)
            out[key] = out.get(key, 0) - 2 * (mu + s) * c
        return RadialFunction(out, mu, f.nvars)
    raise TypeError(f"cannot apply a Dunkl operator to {type(f).__name__}")


def dunkl_apply_power(j: int, f, alpha: Sequence, times: int):
    for _ in range(times):
        f = dunkl_apply(j, f, alpha)
    return f


def dunkl_laplacian(f, alpha: Sequence):
    out = None
    for j in range(f.nvars):
        term = dunkl_apply(j, dunkl_apply(j, f, alpha), alpha)
        out = term if out is None else out + term
    return out


def dunkl_factorial(m: int, alpha):
    """D^m (x^m) in one variable with exponent ``alpha``."""
    out = Fraction(1) if is_exact(alpha) else 1.0
    for i in range(1, m + 1):
        out *= _odd_factor(i, alpha)
    return out


def operator_apply(Y: SparsePolynomial, target, alpha: Sequence, scale: Sequence | None = None):
    """Apply Y(scale_0 D_0, ..., scale_k D_k) to ``target``.

    The Dunkl operators commute, so each monomial operator D^q is built from a
    memoised shorter one.
    """
    memo = {(0,) * Y.nvars: target}

    def power(q):
        if q in memo:
            return memo[q]
        j = max(i for i, e in enumerate(q) if e)
        r = list(q)
        r[j] -= 1
        val = dunkl_apply(j, power(tuple(r)), alpha)
        memo[q] = val
        return val

    out = None
    for q, c in Y.items():
        if scale is not None:
            c = c * math.prod((sj**qj for sj, qj in zip(scale, q)), start=1)
        term = power(q) * c
        out = term if out is None else out + term
    if out is None:
        return target * 0
    return out


def parity_of(f: SparsePolynomial):
    """Common parity vector of all monomials, or the string ``"mixed"``."""
    if f.is_zero():
        raise PreconditionError("the zero polynomial has no parity")
    pars = {tuple(e % 2 for e in q) for q in f.terms}
    if len(pars) == 1:
        return pars.pop()
    return "mixed"


def homogeneous_basis(nvars: int, degree: int, parity: Sequence[int] | None = None) -> list:
    """Exponent vectors of the given total degree (optionally of fixed parity)."""
    out = []

    def rec(prefix, left):
        if len(prefix) == nvars - 1:
            q = tuple(prefix) + (left,)
            if parity is None or all(e % 2 == p for e, p in zip(q, parity)):
                out.append(q)
            return
        for e in range(left, -1, -1):
            rec(prefix + [e], left - e)

    rec([], degree)
    return out


def harmonic_projection(f: SparsePolynomial, alpha: Sequence, mu) -> SparsePolynomial:
    """Component of a homogeneous polynomial that is h-harmonic.

    proj f = sum_j |x|^(2j) Delta_h^j f / (4^j j! (1 - mu - m)_j)  for deg f = m.
    """
    if not f.is_homogeneous():
        raise PreconditionError("harmonic projection needs a homogeneous polynomial")
    m = f.degree
    if m < 0:
        return f
    rho = SparsePolynomial.norm_squared(f.nvars)
    out = f
    lap = f
    coeff = Fraction(1) if is_exact(mu) and f.exact else 1.0
    rho_pow = SparsePolynomial.constant(1, f.nvars)
    for j in range(1, m // 2 + 1):
        lap = dunkl_laplacian(lap, alpha)
        coeff = coeff / (4 * j * (1 - mu - m + j - 1))
        rho_pow = rho_pow * rho
        out = out + rho_pow * lap * coeff
    return out
