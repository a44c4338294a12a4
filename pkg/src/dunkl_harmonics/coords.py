"""Confocal ellipsoidal coordinates.

For a point x the ellipsoidal coordinates are the k+1 roots of

    f(t) = sum_j x_j^2 / (t - a_j) - 1,

one root t_0 > a_k and one root t_i in each interval (a_{i-1}, a_i).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import DomainError, EllipsoidAxes, check_point


@dataclass(frozen=True)
class EllipsoidalCoords:
    t: tuple
    boundary: tuple = ()     # indices j with x_j == 0 (the root sits at a pole)


def _secular(x2, a, t):
    return np.sum(x2 / (t - a)) - 1.0


def _secular_d(x2, a, t):
    return -np.sum(x2 / (t - a) ** 2)


def _root_in(x2, a, lo, hi, width):
    """Root of the secular function in (lo, hi), where it decreases from +inf."""
    f = lambda t: _secular(x2, a, t)
    # bisection down to a small bracket
    l, h = lo, hi
    if not np.isfinite(h):
        h = lo + 1.0
        while f(h) > 0:
            h = lo + 2 * (h - lo)
    target = 1e-3 * width
    for _ in range(400):
        if h - l <= target:
            break
        mid = 0.5 * (l + h)
        fm = f(mid)
        if fm > 0:
            l = mid
        elif fm < 0:
            h = mid
        else:
            return mid
    t = 0.5 * (l + h)
    # safeguarded Newton; bisection takes over near poles
    for _ in range(100):
        near_pole = min(abs(t - lo), abs(t - h)) < 1e-8 * width
        ft = f(t)
        if ft > 0:
            l = t
        elif ft < 0:
            h = t
        else:
            return t
        tn = t - ft / _secular_d(x2, a, t)
        if near_pole or not (l < tn < h):
            tn = 0.5 * (l + h)
        # stop at ulp level: near a pole the residual is ~ x_j^2/(t - a_j)^2 times the error in t
        if abs(tn - t) <= 2 * np.spacing(abs(tn)):
            return tn
        t = tn
        if h - l <= 2 * np.spacing(abs(t)):
            return t
    return t


def cartesian_to_ellipsoidal(axes: EllipsoidAxes, x: Sequence) -> EllipsoidalCoords:
    """Ellipsoidal coordinates of a point in the closed positive cone.

    Components equal to zero put the corresponding root at a pole; those
    indices are reported in ``boundary``.
    """
    x = check_point(x, axes.k)
    x = np.abs(np.array(x, dtype=float))
    if np.all(x == 0):
        raise DomainError("the origin has no ellipsoidal coordinates")
    a = np.array([float(v) for v in axes.a])
    width = a[-1] - a[0]
    keep = x > 0
    x2, poles = x[keep] ** 2, a[keep]
    # the coordinates are the eigenvalues of diag(a) + x x^T: the roots of the
    # reduced secular function plus every a_j whose weight x_j vanishes
    roots = [_root_in(x2, poles, poles[i], poles[i + 1], width)
             for i in range(len(poles) - 1)]
    roots.append(_root_in(x2, poles, poles[-1], np.inf, width))
    roots.extend(a[~keep])
    roots.sort()
    t = (roots[-1],) + tuple(roots[:-1])
    zero = np.flatnonzero(~keep)
    return EllipsoidalCoords(tuple(float(v) for v in t), tuple(int(j) for j in zero))


def ellipsoidal_to_cartesian(axes: EllipsoidAxes, t: Sequence) -> tuple:
    """Point of the closed positive cone with ellipsoidal coordinates ``t``."""
    if isinstance(t, EllipsoidalCoords):
        t = t.t
    t = [float(v) for v in t]
    a = [float(v) for v in axes.a]
    k = axes.k
    if len(t) != k + 1:
        raise DomainError("need k+1 ellipsoidal coordinates")
    if not t[0] >= a[k]:
        raise DomainError("t_0 must not lie below a_k")
    for i in range(1, k + 1):
        if not (a[i - 1] <= t[i] <= a[i]):
            raise DomainError(f"t_{i} must lie in [a_{i-1}, a_{i}]")
    x = []
    for j in range(k + 1):
        num = math.prod(t[i] - a[j] for i in range(k + 1))
        den = math.prod(a[i] - a[j] for i in range(k + 1) if i != j)
        x.append(math.sqrt(max(num / den, 0.0)))
    return tuple(x)


def defining_residual(axes: EllipsoidAxes, x: Sequence, t: Sequence) -> float:
    """max_i |sum_j x_j^2/(t_i - a_j) - 1| over coordinates away from poles."""
    a = np.array([float(v) for v in axes.a])
    x2 = np.array([float(v) ** 2 for v in x])
    out = 0.0
    for ti in t:
        d = ti - a
        if np.any(d == 0):
            continue
        out = max(out, abs(np.sum(x2 / d) - 1.0))
    return out


def on_degenerate_set(axes: EllipsoidAxes, x: Sequence) -> bool:
    """Membership in the focal set x_k = 0, sum_{j<k} x_j^2/(a_k - a_j) <= 1."""
    x = check_point(x, axes.k)
    a = axes.a
    k = axes.k
    if x[k] != 0:
        return False
    return sum(float(x[j]) ** 2 / float(a[k] - a[j]) for j in range(k)) <= 1.0


def t0_exterior(axes: EllipsoidAxes, x: Sequence) -> float:
    """Largest root t_0 > a_k; defined off the degenerate ellipsoid."""
    x = check_point(x, axes.k)
    if on_degenerate_set(axes, x):
        raise DomainError("point lies on the degenerate (focal) ellipsoid "
                          "x_k = 0, sum x_j^2/(a_k - a_j) <= 1; t_0 is undefined there")
    a = np.array([float(v) for v in axes.a])
    x2 = np.array([float(v) ** 2 for v in x])
    keep = x2 > 0
    return _root_in(x2[keep], a[keep], a[-1], np.inf, a[-1] - a[0])


def planar_t0_t1(x0, x1) -> tuple:
    """Closed form coordinates for k = 1 and a = (-1, 1).

    The roots of t^2 - r^2 t + (x0^2 - x1^2 - 1) = 0 with r^2 = x0^2 + x1^2.
    """
    x0, x1 = float(x0), float(x1)
    r2 = x0 * x0 + x1 * x1
    if r2 == 0:
        raise DomainError("the origin has no ellipsoidal coordinates")
    disc = 0.25 * r2 * r2 + 1.0 + x1 * x1 - x0 * x0
    root = math.sqrt(disc)
    t0 = 0.5 * r2 + root
    # product of the roots is x0^2 - x1^2 - 1; avoids cancellation in t1
    t1 = (x0 * x0 - x1 * x1 - 1.0) / t0
    return t0, t1


def planar_t0_t1_as_printed(x0, x1) -> tuple:
    """Literal transcription with (x0^2 + x1^2)^2 in the leading term.

    Kept only to document that this form does not satisfy the defining
    equation; use :func:`planar_t0_t1`.
    """
    r2 = float(x0) ** 2 + float(x1) ** 2
    root = math.sqrt(0.25 * r2 * r2 - float(x0) ** 2 + float(x1) ** 2 + 1.0)
    return 0.5 * r2 * r2 + root, 0.5 * r2 * r2 - root


def semi_axes(axes: EllipsoidAxes, t) -> tuple:
    t = float(t)
    if t <= float(axes.a[-1]):
        raise DomainError("the ellipsoid parameter t must exceed a_k")
    return tuple(math.sqrt(t - float(aj)) for aj in axes.a)


def w_weight(axes: EllipsoidAxes, t, y: Sequence) -> float:
    """Weight w(y) on the ellipsoid sum y_j^2/(t - a_j) = 1.

    w(y) = (sum_j y_j^2/(t - a_j)^2)^(-1/2): the reciprocal length of the
    gradient of the defining function, i.e. the ratio between the sphere and
    ellipsoid surface elements under y = d * x (up to prod d_j).
    """
    t = float(t)
    if t <= float(axes.a[-1]):
        raise DomainError("the ellipsoid parameter t must exceed a_k")
    s = sum(float(yj) ** 2 / (t - float(aj)) ** 2 for yj, aj in zip(y, axes.a))
    return 1.0 / math.sqrt(s)
