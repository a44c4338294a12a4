"""Parameter and index types shared by every module.

Numbers are carried in one of two modes.  When every input is an ``int`` or a
:class:`fractions.Fraction` the package works in exact rational arithmetic;
as soon as a ``float`` appears the computation is done in binary floating
point.  The mode is inferred, never configured globally.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterator, Sequence

MAX_K = 8


class DunklError(Exception):
    """Base class for errors raised by this package."""


class InvalidParameterError(DunklError, ValueError):
    pass


class DomainError(DunklError, ValueError):
    pass


class NonConvergenceError(DunklError, RuntimeError):
    pass


class PreconditionError(DunklError, ValueError):
    pass


def is_exact(x) -> bool:
    return isinstance(x, Rational)


def as_number(x):
    """Convert ``x`` to Fraction when it is rational-looking, else float.

    Strings such as ``"1/2"`` become fractions, ``float`` stays ``float``.
    """
    if isinstance(x, bool):
        raise InvalidParameterError("booleans are not numbers here")
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return float(x)


def to_float(x) -> float:
    return float(x)


@dataclass(frozen=True, eq=False)
class DunklParams:
    """Dimension ``k`` (space is R^(k+1)) and the weight exponents."""

    k: int
    alpha: tuple
    mu: object = field(init=False)

    def __post_init__(self):
        alpha = tuple(as_number(a) for a in self.alpha)
        object.__setattr__(self, "alpha", alpha)
        if self.k < 1 or self.k > MAX_K:
            raise InvalidParameterError(f"k must lie in [1, {MAX_K}], got {self.k}")
        if len(alpha) != self.k + 1:
            raise InvalidParameterError(
                f"alpha must have k+1 = {self.k + 1} entries, got {len(alpha)}")
        if any(a < 0 for a in alpha):
            raise InvalidParameterError("all alpha_j must be nonnegative")
        mu = sum(alpha) + Fraction(self.k - 1, 2)
        if not self.exact:
            mu = float(mu)
        if mu <= 0:
            raise InvalidParameterError(
                "mu = sum(alpha) + (k-1)/2 must be positive "
                "(k=1 with alpha_0 = alpha_1 = 0 is excluded)")
        object.__setattr__(self, "mu", mu)

    @property
    def exact(self) -> bool:
        return all(is_exact(a) for a in self.alpha)

    # Fraction(1, 2) == 0.5, so exactness is part of the identity (cache keys)
    def __eq__(self, other):
        if not isinstance(other, DunklParams):
            return NotImplemented
        return (self.k, self.alpha, self.exact) == (other.k, other.alpha, other.exact)

    def __hash__(self):
        return hash((self.k, self.alpha, self.exact))

    @property
    def dim(self) -> int:
        return self.k + 1

    def as_float(self) -> "DunklParams":
        return DunklParams(self.k, tuple(float(a) for a in self.alpha))

    def gamma_product(self) -> float:
        """prod_j Gamma(alpha_j + 1/2)."""
        return math.exp(sum(math.lgamma(float(a) + 0.5) for a in self.alpha))


def validate_params(k: int, alpha: Sequence) -> DunklParams:
    return DunklParams(int(k), tuple(alpha))


@dataclass(frozen=True, eq=False)
class EllipsoidAxes:
    """Strictly increasing parameters a_0 < ... < a_k of the confocal family."""

    a: tuple
    bigA: tuple = field(init=False)

    def __post_init__(self):
        a = tuple(as_number(v) for v in self.a)
        object.__setattr__(self, "a", a)
        if len(a) < 2:
            raise InvalidParameterError("need at least two axis parameters")
        if any(a[i] >= a[i + 1] for i in range(len(a) - 1)):
            raise InvalidParameterError("axis parameters must be strictly increasing")
        bigA = tuple(
            math.prod((a[j] - a[i] for i in range(len(a)) if i != j), start=1)
            for j in range(len(a)))
        object.__setattr__(self, "bigA", bigA)

    @property
    def k(self) -> int:
        return len(self.a) - 1

    @property
    def width(self):
        return self.a[-1] - self.a[0]

    @property
    def exact(self) -> bool:
        return all(is_exact(v) for v in self.a)

    def __eq__(self, other):
        if not isinstance(other, EllipsoidAxes):
            return NotImplemented
        return (self.a, self.exact) == (other.a, other.exact)

    def __hash__(self):
        return hash((self.a, self.exact))

    def as_float(self) -> "EllipsoidAxes":
        return EllipsoidAxes(tuple(float(v) for v in self.a))


@dataclass(frozen=True)
class HarmonicIndex:
    """Zero counts ``n`` (length k) and parity bits ``p`` (length k+1)."""

    n: tuple
    p: tuple

    def __post_init__(self):
        n = tuple(int(v) for v in self.n)
        p = tuple(int(v) for v in self.p)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "p", p)
        if len(p) != len(n) + 1:
            raise InvalidParameterError("parity vector must have one more entry than n")
        if any(v < 0 for v in n):
            raise InvalidParameterError("zero counts must be nonnegative")
        if any(v not in (0, 1) for v in p):
            raise InvalidParameterError("parity bits must be 0 or 1")

    @property
    def k(self) -> int:
        return len(self.n)

    @property
    def m(self) -> int:
        return 2 * sum(self.n) + sum(self.p)

    def __str__(self):
        return f"n={list(self.n)},p={list(self.p)}"


def degree(index: HarmonicIndex) -> int:
    return index.m


def indices_of_degree(k: int, m: int) -> Iterator[HarmonicIndex]:
    """All indices (n, p) with 2|n| + |p| = m, in a fixed order."""
    for p in itertools.product((0, 1), repeat=k + 1):
        rest = m - sum(p)
        if rest < 0 or rest % 2:
            continue
        for n in _compositions(rest // 2, k):
            yield HarmonicIndex(n, p)


def _compositions(total: int, parts: int) -> Iterator[tuple]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for tail in _compositions(total - first, parts - 1):
            yield (first,) + tail


def check_point(x: Sequence, k: int) -> tuple:
    x = tuple(x)
    if len(x) != k + 1:
        raise DomainError(f"point must have k+1 = {k + 1} coordinates, got {len(x)}")
    return x


def load_problem(obj: dict) -> tuple[DunklParams, EllipsoidAxes | None, HarmonicIndex | None]:
    """Build the typed problem from the JSON configuration object.

    ``{"k": int, "alpha": [...], "a": [...], "n": [...], "p": [...]}``; the
    ``a``, ``n`` and ``p`` entries are optional.  Numbers may be given as JSON
    numbers or as strings like ``"1/2"`` (which keeps them exact).
    """
    try:
        k = int(obj["k"])
        params = validate_params(k, obj["alpha"])
    except KeyError as exc:
        raise InvalidParameterError(f"configuration lacks {exc.args[0]!r}") from None
    axes = None
    if obj.get("a") is not None:
        axes = EllipsoidAxes(tuple(obj["a"]))
        if axes.k != k:
            raise InvalidParameterError("a must have k+1 entries")
    index = None
    if obj.get("n") is not None or obj.get("p") is not None:
        index = HarmonicIndex(tuple(obj.get("n", [0] * k)), tuple(obj.get("p", [0] * (k + 1))))
        if index.k != k:
            raise InvalidParameterError("n must have k entries")
    return params, axes, index
