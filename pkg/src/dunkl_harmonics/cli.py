"""Command-line front end.

    python -m dunkl_harmonics eval --which G --k 1 --alpha 1/2,1/2 --n 0 --p 1,1 --point 1,0
    python -m dunkl_harmonics verify --suite all --config problem.json

Exit codes: 0 success, 1 verification failure, 2 invalid input or domain
error, 3 non-convergence.
"""
from __future__ import annotations

import argparse
import csv
import itertools
import json
import math
import random
import sys
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import SparsePolynomial, harmonic_projection, homogeneous_basis
from .fundamental import (PhiEvaluator, heine_expansion, heine_terms, laplace_terms,
                          lemma31_check, phi, rep_sphere)
from .harmonics import (external_F, external_G, harmonic_evaluator, internal_F,
                        spheroconal_G, spheroconal_G_poly)
from .integrals import GammaScaled, hobson_check, sphere_monomial_moment
from .model import (DomainError, DunklError, HarmonicIndex,
                    InvalidParameterError, NonConvergenceError,
                    as_number, indices_of_degree, load_problem)
from .niven import (DEFAULT_MAX_TERMS, DEFAULT_TOL, niven_corollary, niven_series,
                    niven_theorem)
from .orthopoly import JacobiParams, b_n_const, jacobi_p, jacobi_q
from .stieltjes import solve_stieltjes, wronskian_residual

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NONCONV = 0, 1, 2, 3


# -- configuration ------------------------------------------------------------


def _parse_list(text: str | None):
    if text is None:
        return None
    text = text.strip()
    if not text:
        return []
    return [v.strip() for v in text.split(",")]


def _number(v, mode: str | None):
    if mode == "exact":
        if isinstance(v, float):
            v = str(v)
        try:
            return Fraction(v)
        except (ValueError, TypeError):
            raise InvalidParameterError(f"exact mode needs rational input, got {v!r}") from None
    if mode == "float":
        return float(Fraction(v)) if isinstance(v, str) else float(v)
    if isinstance(v, str):
        try:
            return Fraction(v)
        except ValueError:
            return float(v)
    return as_number(v)


def build_problem(args) -> tuple:
    """(params, axes, index) from --config and the inline overrides."""
    obj = {}
    if args.config:
        try:
            with open(args.config) as fh:
                obj = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidParameterError(f"cannot read configuration: {exc}") from None
    if args.k is not None:
        obj["k"] = args.k
    for key in ("alpha", "a", "n", "p"):
        val = _parse_list(getattr(args, key))
        if val is not None:
            obj[key] = val
    k = int(obj.get("k", 1))
    obj["k"] = k
    obj.setdefault("alpha", ["1/2"] * (k + 1))
    obj.setdefault("a", [2 * j - 1 for j in range(k + 1)])   # (-1, 1) for the plane
    mode = args.mode
    obj["alpha"] = [_number(v, mode) for v in obj["alpha"]]
    obj["a"] = [_number(v, mode) for v in obj["a"]]
    for key in ("n", "p"):
        if key in obj:
            obj[key] = [int(v) for v in obj[key]]
    return load_problem(obj)


def _points(args, k: int) -> list:
    out = []
    for text in args.point or []:
        vals = [float(Fraction(v)) if "/" in v else float(v) for v in _parse_list(text)]
        if len(vals) != k + 1:
            raise InvalidParameterError(f"point {text!r} needs k+1 = {k + 1} coordinates")
        out.append(tuple(vals))
    return out


def _require_index(index):
    if index is None:
        raise InvalidParameterError("this command needs an index (--n and --p, or n/p in the config)")
    return index


# -- output -------------------------------------------------------------------


def fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, Fraction):
        return str(v)
    f = float(v)
    if math.isfinite(f):
        return float(format(f, ".17g"))
    return str(f)


def emit(rows: list, header: list, fmt_name: str, out) -> None:
    if fmt_name == "json":
        out.write(json.dumps([_jsonable(dict(zip(header, r))) for r in rows], indent=1))
        out.write("\n")
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])


def emit_report(checks: list, fmt_name: str, out) -> None:
    header = ["check", "anchor", "residual", "pass"]
    if fmt_name == "json":
        out.write(json.dumps(_jsonable(checks), indent=1))
        out.write("\n")
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for c in checks:
        w.writerow([fmt(c[h]) for h in header])


def _check(name: str, anchor: str, residual: float, tol: float, **extra) -> dict:
    d = {"check": name, "anchor": anchor, "residual": float(residual),
         "pass": bool(residual <= tol)}
    d.update(extra)
    return d


def _pt(x, digits: int = 17) -> str:
    return "(" + ",".join(format(float(v), f".{digits}g") for v in x) + ")"


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


# -- eval ---------------------------------------------------------------------


def _eval_G(ev, x):
    # the product formula is exact when G has rational coefficients
    if ev.exact:
        return float(spheroconal_G_poly(ev)(tuple(Fraction(v) for v in x)))
    return spheroconal_G(ev, x)


def cmd_eval(args, out) -> int:
    params, axes, index = build_problem(args)
    pts = _points(args, params.k)
    if not pts:
        raise InvalidParameterError("eval needs at least one --point")
    k = params.k
    if args.which == "Phi":
        if len(pts) % 2:
            raise InvalidParameterError("Phi needs points in (x, z) pairs")
        pe = PhiEvaluator(params, args.quad_order)
        rows = []
        for x, z in zip(pts[::2], pts[1::2]):
            rows.append(list(x) + list(z) + [phi(pe, x, z)])
        header = [f"x{j}" for j in range(k + 1)] + [f"z{j}" for j in range(k + 1)] + ["value"]
        emit(rows, header, args.format, out)
        return EXIT_OK
    if axes is None:
        raise InvalidParameterError("eval needs the axis parameters a")
    ev = harmonic_evaluator(params, axes, _require_index(index))
    fn = {"F": internal_F, "Fext": external_F, "G": _eval_G, "Gext": external_G}[args.which]
    rows = [list(x) + [fn(ev, x)] for x in pts]
    emit(rows, [f"x{j}" for j in range(k + 1)] + ["value"], args.format, out)
    return EXIT_OK


# -- verification suites ------------------------------------------------------


def _index_set(params, index, mmax: int):
    if index is not None:
        return [index]
    return [idx for m in range(mmax + 1) for idx in indices_of_degree(params.k, m)]


def suite_wronskian(params, axes, index, args) -> list:
    width = float(axes.a[-1] - axes.a[0])
    ak = float(axes.a[-1])
    grid = ak + width * np.geomspace(0.1, 10.0, 50)
    if index is not None:
        idxs = [index]
    else:
        idxs = [HarmonicIndex(n, p) for n in _n_vectors(params.k, 3) for p in _parities(params.k)]
    checks = []
    for idx in idxs:
        ev = harmonic_evaluator(params, axes, idx)
        res = max(wronskian_residual(ev.Ecal, t) for t in grid)
        checks.append(_check(f"wronskian {idx}", "wronskian-identity", res, args.tol or 1e-9))
    return checks


def _n_vectors(k: int, total: int):
    for s in range(total + 1):
        for idx in indices_of_degree(k, 2 * s):
            if not any(idx.p):
                yield idx.n


def _parities(k: int):
    return itertools.product((0, 1), repeat=k + 1)


def _default_far_points(axes, k: int, factor: float = 4.0) -> list:
    r = math.sqrt(factor * float(axes.a[-1] - axes.a[0]))
    out = []
    for d in ([1.0] * (k + 1), [1.0] + [0.5] * k, [0.3] * k + [1.0]):
        v = np.array(d)
        out.append(tuple(r * v / np.linalg.norm(v)))
    return out


def suite_niven(params, axes, index, args) -> list:
    pts = _points(args, params.k) or _default_far_points(axes, params.k)
    tol = args.tol or DEFAULT_TOL
    cap = args.max_terms or DEFAULT_MAX_TERMS
    checks = []
    for idx in _index_set(params, index, 2):
        ev = harmonic_evaluator(params, axes, idx)
        cor, thm = niven_series(ev, "corollary"), niven_series(ev, "theorem")
        for z in pts:
            ref = external_F(ev, z)
            a = niven_corollary(cor, z, tol, cap)
            b = niven_theorem(thm, z, tol, cap)
            checks.append(_check(f"niven corollary {idx} z={_pt(z)}", "niven-corollary",
                                 _rel(a.value, ref), 1e-6, lhs=ref, rhs=a.value,
                                 terms=a.terms, ratio=a.ratio))
            checks.append(_check(f"niven theorem {idx} z={_pt(z)}", "niven-theorem",
                                 _rel(b.value, ref), 1e-6, lhs=ref, rhs=b.value,
                                 terms=b.terms, ratio=b.ratio))
    return checks


def _random_harmonic(params, nvars, m, rng) -> SparsePolynomial:
    while True:
        basis = homogeneous_basis(nvars, m)
        f = SparsePolynomial({q: Fraction(rng.randint(-3, 3)) for q in basis}, nvars)
        if f.is_zero():
            continue
        Y = harmonic_projection(f, params.alpha, params.mu)
        if not Y.is_zero():
            return Y


def suite_hobson(params, axes, index, args) -> list:
    if not params.exact:
        raise InvalidParameterError("the Hobson suite runs in exact mode (rational alpha)")
    rng = random.Random(20240601)
    nv = params.k + 1
    checks = []
    for case in range(20):
        ell = rng.randint(0, 6)
        m = rng.randint(0, 3)
        f = SparsePolynomial({q: Fraction(rng.randint(-4, 4)) for q in homogeneous_basis(nv, ell)}, nv)
        if f.is_zero():
            f = SparsePolynomial.monomial((ell,) + (0,) * (nv - 1), Fraction(1))
        Y = _random_harmonic(params, nv, m, rng)
        lhs, rhs = hobson_check(params, f, Y)
        diff = lhs - rhs
        res = 0.0 if diff.is_zero() else abs(float(diff))
        checks.append(_check(f"hobson case {case} l={ell} m={m}", "hobson-formula", res, 0.0))
    return checks


def suite_heine(params, axes, index, args) -> list:
    k = params.k
    pts = _points(args, k)
    if len(pts) >= 2:
        y, z = pts[0], pts[1]
    else:
        y = tuple([0.3, 0.2] + [0.1] * (k - 1))
        z = tuple([4.0, 3.0] + [1.0] * (k - 1))
    pe = PhiEvaluator(params, args.quad_order)
    M = args.max_terms if args.max_terms is not None else 12
    ref = phi(pe, y, z)
    val = heine_expansion(pe, axes, y, z, M)
    return [_check(f"heine M={M} y={_pt(y)} z={_pt(z)}", "heine-expansion",
                   _rel(val, ref), args.tol or 1e-5, lhs=ref, rhs=val)]


def suite_fundamental(params, axes, index, args) -> list:
    pe = PhiEvaluator(params, args.quad_order)
    k = params.k
    rng = np.random.default_rng(7)
    checks = []
    z = rng.normal(size=k + 1)
    z *= 2.5 / np.linalg.norm(z)
    x = rng.normal(size=k + 1)
    x *= 0.7 / np.linalg.norm(x)
    checks.append(_check("Phi(0, z) closed form", "phi-at-origin",
                         _rel(phi(pe, np.zeros(k + 1), z), pe.prefactor * float(z @ z) ** -float(params.mu)),
                         1e-10))
    checks.append(_check("Phi symmetry", "phi-symmetry", _rel(phi(pe, z, x), phi(pe, x, z)), 1e-10))
    lam = 1.7
    checks.append(_check("Phi homogeneity", "phi-homogeneity",
                         _rel(phi(pe, lam * x, lam * z), lam ** (-2 * float(params.mu)) * phi(pe, x, z)), 1e-10))
    zz = tuple(3.0 * z / np.linalg.norm(z))
    for idx in _index_set(params, index, 2):
        ev = harmonic_evaluator(params, axes, idx)
        val = rep_sphere(pe, ev, zz)
        ref = external_G(ev, zz)
        checks.append(_check(f"sphere representation {idx}", "sphere-representation",
                             _rel(val, ref), 1e-7))
    return checks


def suite_lemma31(params, axes, index, args) -> list:
    pe = PhiEvaluator(params, args.quad_order)
    k = params.k
    rng = np.random.default_rng(31)
    qs = [q for s in range(3) for q in homogeneous_basis(k + 1, s)]
    checks = []
    for _ in range(3):
        z = rng.normal(size=k + 1)
        z *= 2.0 / np.linalg.norm(z)
        for q in qs:
            lhs, rhs = lemma31_check(pe, q, z)
            checks.append(_check(f"derivative q={list(q)} z={_pt(z, 6)}",
                                 "derivative-at-origin", _rel(lhs, rhs), args.tol or 1e-5))
    return checks


SUITES = {
    "wronskian": suite_wronskian,
    "niven": suite_niven,
    "hobson": suite_hobson,
    "heine": suite_heine,
    "fundamental": suite_fundamental,
    "lemma31": suite_lemma31,
}


def cmd_verify(args, out) -> int:
    params, axes, index = build_problem(args)
    names = list(SUITES) if args.suite == "all" else [args.suite]
    if args.suite == "all" and not params.exact:
        names.remove("hobson")
    checks = []
    for name in names:
        checks.extend(SUITES[name](params, axes, index, args))
    emit_report(checks, args.format, out)
    return EXIT_OK if all(c["pass"] for c in checks) else EXIT_FAIL


# -- expansions ---------------------------------------------------------------


def cmd_expand(args, out) -> int:
    params, axes, index = build_problem(args)
    k = params.k
    pts = _points(args, k)
    M = args.max_terms if args.max_terms is not None else 8
    if args.kind == "niven":
        ev = harmonic_evaluator(params, axes, _require_index(index))
        z = pts[0] if pts else _default_far_points(axes, k)[1]
        if not sum(v * v for v in z) > float(axes.a[-1] - axes.a[0]):
            raise DomainError("the Niven series needs |z|^2 > a_k - a_0")
        ns = niven_series(ev)
        rows = [[r, ns.coefficient(r), ns.term_value(r, z)] for r in range(M + 1)]
        emit(rows, ["r", "coefficient", "term"], args.format, out)
        return EXIT_OK
    if len(pts) < 2:
        raise InvalidParameterError(f"expand {args.kind} needs two points (x or y, then z)")
    x, z = pts[0], pts[1]
    if args.kind == "laplace":
        if not np.linalg.norm(x) < np.linalg.norm(z):
            raise DomainError("the Laplace expansion needs |x| < |z|")
        terms = laplace_terms(params, x, z, M, axes)
        emit([[m, v] for m, v in enumerate(terms)], ["m", "term"], args.format, out)
        return EXIT_OK
    pe = PhiEvaluator(params, args.quad_order)
    rows = [[idx.m, str(idx), v] for idx, v in heine_terms(pe, axes, x, z, M)]
    emit(rows, ["m", "index", "term"], args.format, out)
    return EXIT_OK


# -- tables -------------------------------------------------------------------


def cmd_stieltjes(args, out) -> int:
    params, axes, index = build_problem(args)
    sp = solve_stieltjes(params, axes, _require_index(index))
    rec = {"index": {"n": list(sp.index.n), "p": list(sp.index.p)},
           "zeros": [list(map(float, g)) for g in sp.zeros],
           "lambda": [fmt(v) for v in sp.lam],
           "coefficients": None if sp.coeffs is None else [fmt(c) for c in sp.coeffs]}
    out.write(json.dumps(_jsonable(rec), indent=1))
    out.write("\n")
    return EXIT_OK


def cmd_table(args, out) -> int:
    """P_n and b_n Q_n of the Jacobi family at the given abscissae."""
    al, be = (_number(v, args.mode) for v in (_parse_list(args.jacobi) or ["0", "0"]))
    jp = JacobiParams(al, be)
    ts = [float(v) for v in (_parse_list(args.t) or ["1.5", "2", "3"])]
    N = args.max_terms if args.max_terms is not None else 4
    rows = []
    for n in range(N + 1):
        for t in ts:
            q = b_n_const(n, jp) * jacobi_q(n, jp, t) if t > 1 else float("nan")
            rows.append([n, t, float(jacobi_p(n, JacobiParams(float(al), float(be)), t)), q])
    emit(rows, ["n", "t", "P", "bQ"], args.format, out)
    return EXIT_OK


def cmd_moments(args, out) -> int:
    """Sphere moments int h^2 x^q dS for all even exponents of total degree <= 2 * max_terms."""
    params, _, _ = build_problem(args)
    D = args.max_terms if args.max_terms is not None else 2
    rows = []
    for d in range(D + 1):
        for half in homogeneous_basis(params.k + 1, d):
            q = tuple(2 * v for v in half)
            val = sphere_monomial_moment(params, q)
            if isinstance(val, GammaScaled):
                rows.append([" ".join(map(str, q)), val.coef, float(val)])
            else:
                rows.append([" ".join(map(str, q)), "", float(val)])
    emit(rows, ["q", "rational_factor", "value"], args.format, out)
    return EXIT_OK


# -- entry point --------------------------------------------------------------


def _positive(conv):
    def f(s):
        v = conv(s)
        if not v > 0:
            raise argparse.ArgumentTypeError("must be positive")
        return v
    return f


def _quad_order(s):
    v = int(s)
    if not 4 <= v <= 512:
        raise argparse.ArgumentTypeError("quad-order must lie in [4, 512]")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON problem file {k, alpha, a, n, p}")
    common.add_argument("--k", type=int)
    common.add_argument("--alpha", help="comma separated, e.g. 1/2,1/2")
    common.add_argument("--a", help="axis parameters, comma separated")
    common.add_argument("--n", help="zero counts, comma separated")
    common.add_argument("--p", help="parity bits, comma separated")
    common.add_argument("--mode", choices=("exact", "float"))
    common.add_argument("--tol", type=_positive(float))
    common.add_argument("--max-terms", type=int, dest="max_terms")
    common.add_argument("--quad-order", type=_quad_order, dest="quad_order")
    common.add_argument("--format", choices=("json", "csv"), default="csv")
    common.add_argument("--point", action="append", help="x0,...,xk (repeatable)")

    p = argparse.ArgumentParser(prog="dunkl-harmonics", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    e = sub.add_parser("eval", parents=[common], help="evaluate a harmonic or Phi at points")
    e.add_argument("--which", choices=("F", "Fext", "G", "Gext", "Phi"), required=True)
    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("--suite", choices=tuple(SUITES) + ("all",), default="all")
    x = sub.add_parser("expand", parents=[common], help="terms of an expansion")
    x.add_argument("kind", choices=("heine", "laplace", "niven"))
    sub.add_parser("stieltjes", parents=[common], help="zeros and lambda of a Stieltjes polynomial")
    t = sub.add_parser("table", parents=[common], help="Jacobi P_n and b_n Q_n values")
    t.add_argument("--jacobi", help="alpha,beta of the Jacobi family")
    t.add_argument("--t", help="abscissae, comma separated")
    sub.add_parser("moments", parents=[common], help="sphere moment table")
    return p


COMMANDS = {"eval": cmd_eval, "verify": cmd_verify, "expand": cmd_expand,
            "stieltjes": cmd_stieltjes, "table": cmd_table, "moments": cmd_moments}


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONV
    except (DunklError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
