"""Command line front end.

Exit codes: 0 success, 1 computation error, 2 invalid input.  Errors are
printed as JSON objects ``{"error": ..., "type": ...}``.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .classify import toral_parameter_tests
from .golden import run_all
from .hk import DEFAULT_SEED, HKError, LaurentPoly, dehomogenize_discriminant, hk_parametrize, vanish_check
from .invariant import pi_presentation, shorn_decomposition
from .lattice import GaleContext, LatticeError, build_gale_context, solve_parameter
from .serialize import decode, encode, fmt_rational, int_matrix, rational, rational_vector
from .series import (SeriesError, TruncatedSeries, annihilation_check, gkz_series, horn_series,
                     starting_exponents)
from .systems import SystemSpec, gkz_system, horn_generators, lattice_basis_system
from .weyl import WeylError, WeylOp, WeylRing, format_op, format_theta, parse_op

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# input


def _read(arg: str):
    """JSON or TOML from a file, or inline JSON."""
    text = arg.strip()
    if text[:1] in "[{":
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"inline JSON: {exc}") from exc
    path = Path(arg)
    if not path.is_file():
        raise InputError(f"no such file: {arg}")
    try:
        if path.suffix == ".toml":
            return tomllib.loads(path.read_text())
        return json.loads(path.read_text())
    except (json.JSONDecodeError, tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise InputError(f"{arg}: {exc}") from exc


def _pick(data, key):
    return data[key] if isinstance(data, dict) and key in data else data


def _unwrap(data):
    """Golden fixtures keep their problem under "input"."""
    if isinstance(data, dict) and "A" not in data and isinstance(data.get("input"), dict):
        return data["input"]
    return data


def _vector(arg):
    if arg is None:
        return None
    try:
        if arg.strip()[:1] in "[{" or Path(arg).is_file():
            return rational_vector(_pick(_read(arg), "beta"))
        return rational_vector(arg)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _problem(args) -> dict:
    prob = {}
    if getattr(args, "problem", None):
        prob = _unwrap(_read(args.problem))
        if not isinstance(prob, dict):
            raise InputError("problem file must be an object")
    for key in ("A", "B", "Atilde"):
        val = getattr(args, key, None)
        if val:
            data = _unwrap(_read(val))
            if key == "A" and isinstance(data, dict):
                prob.update(data)
            else:
                prob[key] = _pick(data, key)
    try:
        out = {"A": int_matrix(prob["A"]) if "A" in prob else None,
               "B": int_matrix(prob["B"]) if prob.get("B") else None,
               "Atilde": int_matrix(prob["Atilde"]) if prob.get("Atilde") else None,
               "beta": rational_vector(prob["beta"]) if "beta" in prob else None,
               "kappa": rational_vector(prob["kappa"]) if "kappa" in prob else None,
               "bounds": dict(prob.get("bounds", {}))}
    except (ValueError, TypeError) as exc:
        raise InputError(str(exc)) from exc
    if out["A"] is None:
        raise InputError("the matrix A is required")
    if getattr(args, "beta", None):
        out["beta"] = _vector(args.beta)
    if getattr(args, "kappa", None):
        out["kappa"] = _vector(args.kappa)
    return out


def _context(prob, args):
    try:
        return build_gale_context(prob["A"], prob["B"], prob["Atilde"],
                                  require_pointed=not getattr(args, "no_pointed", False))
    except LatticeError as exc:
        raise InputError(str(exc)) from exc


def _context_arg(arg, args):
    data = _unwrap(_read(arg))
    if isinstance(data, dict) and data.get("__type__") == "GaleContext":
        return decode(data)
    if isinstance(data, dict) and "A" in data:
        try:
            prob = {key: int_matrix(data[key]) if data.get(key) else None for key in ("A", "B", "Atilde")}
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        return _context(prob, args)
    raise InputError("expected a context or a problem file")


def _params(prob, ctx):
    """(beta, kappa) completed from whichever is given."""
    A = prob["A"]
    beta, kappa = prob["beta"], prob["kappa"]
    if kappa is None and beta is None:
        raise InputError("beta or kappa is required")
    if beta is not None and len(beta) != ctx.d:
        raise InputError(f"beta must have length {ctx.d}")
    if kappa is not None and len(kappa) != ctx.n:
        raise InputError(f"kappa must have length {ctx.n}")
    if kappa is None:
        try:
            kappa = solve_parameter(A, beta, "any")
        except LatticeError as exc:
            raise InputError(str(exc)) from exc
    if beta is None:
        beta = tuple(sum(a * k for a, k in zip(row, kappa)) for row in A)
    return beta, kappa


# ---------------------------------------------------------------------------
# commands; each returns (result, pretty_text)


def cmd_context(args):
    ctx = _context(_problem(args), args)
    lines = [f"{name} = {list(map(list, getattr(ctx, name)))}" for name in ("Atilde", "C", "B", "K")]
    lines += [f"varkappa = {list(ctx.varkappa)}", f"epsC = {list(ctx.epsC)}",
              f"latticeIndex = {ctx.latticeIndex}"]
    return ctx, "\n".join(lines)


def _build(args, prob):
    ctx = _context(prob, args)
    beta, kappa = _params(prob, ctx)
    deg = args.degree or prob["bounds"].get("toricDegree", 3)
    if args.system == "gkz":
        return gkz_system(ctx.A, beta, deg, ctx)
    if args.system == "lattice":
        return lattice_basis_system(ctx, kappa)
    return horn_generators(ctx.B, kappa, normalized=args.system == "nhorn")


def _pretty_system(s: SystemSpec) -> str:
    lines = [f"{s.kind}:"] + [f"  {format_op(g)}" for g in s.generators]
    lines += [f"  {format_op(e)}" for e in s.eulerOps]
    return "\n".join(lines)


def cmd_build(args):
    s = _build(args, _problem(args))
    return s, _pretty_system(s)


def _pretty_rows(rows) -> str:
    out = []
    for i, row in enumerate(rows):
        parts = []
        for r, g in row.display():
            mono = "*".join(f"z{j + 1}^({fmt_rational(x)})" for j, x in enumerate(r) if x)
            parts.append(f"{mono + ' * ' if mono else ''}({format_theta(g, 'e')})")
        out.append(f"row {i + 1}: " + " + ".join(parts))
    return "\n".join(out)


def cmd_pi(args):
    prob = _problem(args)
    ctx = _context(prob, args)
    beta, kappa = _params(prob, ctx)
    s = gkz_system(ctx.A, beta, args.degree or 3, ctx) if args.system == "gkz" else lattice_basis_system(ctx, kappa)
    pres = pi_presentation(s, ctx, kappa)
    result = {"kappa": kappa, "rows": [row.display() for row in pres.rows],
              "dropped": pres.dropped, "summandCount": pres.summandCount,
              "residueOrder": pres.residueOrder}
    return result, _pretty_rows(pres.rows)


def cmd_shorn(args):
    prob = _problem(args)
    ctx = _context(prob, args)
    beta, kappa = _params(prob, ctx)
    summands = shorn_decomposition(ctx, kappa)
    lines = []
    for s in summands:
        basis = ", ".join(fmt_rational(x) for x in s.basis)
        lines.append(f"summand z^({basis}): kappa + {list(s.shift)}")
        lines += [f"  {format_op(op)}" for op in s.row_ops]
    return summands, "\n".join(lines)


def _pretty_series(s: TruncatedSeries) -> str:
    base = ", ".join(fmt_rational(x) for x in s.baseExponent)
    lines = [f"{s.side}-series, base exponent ({base}), order {s.order}, {len(s.terms)} terms"]
    for u, c in sorted(s.terms.items(), key=lambda t: (s.grading(t[0]), t[0])):
        lines.append(f"  {fmt_rational(c)} at u = ({', '.join(fmt_rational(x) for x in u)})")
    return "\n".join(lines)


def cmd_series(args):
    data = _read(args.system)
    s = decode(data)
    if not isinstance(s, SystemSpec):
        raise InputError("expected a system as written by the build command")
    order = args.order
    start = _vector(args.start) if args.start else None
    if s.kind in ("Horn", "NormalizedHorn"):
        out = [horn_series(s, start or (0,) * len(s.B[0]), order)]
    elif s.kind == "GKZ":
        starts = [start] if start else [v for _, v in starting_exponents(s.A, s.beta)]
        out = [gkz_series(s, v, order) for v in starts]
    else:
        raise InputError(f"no series generator for {s.kind} systems")
    return out, "\n".join(_pretty_series(x) for x in out)


def _ops_arg(arg):
    data = _read(arg)
    if isinstance(data, dict) and "ops" in data:
        ring = data.get("ring", {})
        R = WeylRing(int(ring["n"]), bool(ring.get("laurent", True)), ring.get("kind", "x"))
        return [parse_op(t, R) for t in data["ops"]]
    obj = decode(data)
    if isinstance(obj, SystemSpec):
        return list(obj.generators) + list(obj.eulerOps)
    if isinstance(obj, WeylOp):
        return [obj]
    if isinstance(obj, tuple) and all(isinstance(o, WeylOp) for o in obj):
        return list(obj)
    raise InputError("expected operators")


def cmd_check(args):
    ops = _ops_arg(args.ops)
    obj = decode(_read(args.series))
    series = list(obj) if isinstance(obj, tuple) else [obj]
    if not all(isinstance(s, TruncatedSeries) for s in series):
        raise InputError("expected series as written by the series command")
    reports = [annihilation_check(ops, s, args.safe_order) for s in series]
    text = "\n".join(f"series {i + 1}: {'zero residual' if r['passed'] else 'NONZERO residual'}"
                     f" ({r['checked']} coefficients through grading {r['safeOrder']})"
                     for i, r in enumerate(reports))
    return reports, text


def cmd_classify(args):
    ctx = _context_arg(args.context, args)
    beta = _vector(args.beta)
    rep = toral_parameter_tests(ctx, beta, jobs=args.jobs)
    lines = [f"candidates: {len(rep['candidates'])} "
             f"({sum(not p.toral for p in rep['candidates'])} Andean)",
             f"toral: {rep['toralFlag'].value}", f"completely toral: {rep['completelyToralFlag'].value}"]
    lines += [f"certificate: {c}" for c in rep["certificates"]]
    return rep, "\n".join(lines)


def cmd_hk(args):
    B = int_matrix(_pick(_read(args.B), "B"))
    result = {"seed": args.seed}
    lines = [f"seed = {args.seed}"]
    if args.s:
        pt = hk_parametrize(B, _vector(args.s))
        result["point"] = pt
        lines.append("(Bs)^B = (" + ", ".join(fmt_rational(x) for x in pt) + ")")
    if args.disc:
        data = _pick(_read(args.disc), "discriminant")
        try:
            disc = {tuple(int(x) for x in e): rational(c) for e, c in data}
        except (TypeError, ValueError) as exc:
            raise InputError(f"discriminant: {exc}") from exc
        f = dehomogenize_discriminant(disc, B)
        rep = vanish_check(f, B, args.samples, args.seed)
        result.update({"laurent": f, "vanish": rep})
        lines += [f"dehomogenized: {f}",
                  f"vanishes on {rep['zeros']}/{rep['samples']} samples: {'PASS' if rep['passed'] else 'FAIL'}"]
    return result, "\n".join(lines)


def cmd_golden(args):
    results = run_all(args.jobs)
    text = "\n".join(f"{'PASS' if r['passed'] else 'FAIL'} {r['name']}" for r in results)
    return results, text


# ---------------------------------------------------------------------------


def _problem_opts(p):
    p.add_argument("--problem", help="JSON or TOML problem file")
    p.add_argument("--A", help="matrix A (file or inline JSON)")
    p.add_argument("--B", help="Gale dual B (file or inline JSON)")
    p.add_argument("--Atilde", help="unimodular completion of A (file or inline JSON)")
    p.add_argument("--beta", help="parameter beta")
    p.add_argument("--kappa", help="parameter kappa")
    p.add_argument("--no-pointed", action="store_true", help="allow a non-pointed A")


def parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gkzhorn", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--format", choices=("json", "pretty"), default="json")
    ap.add_argument("--jobs", type=int, default=1)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("context", help="Gale context of A")
    _problem_opts(p)
    p.set_defaults(func=cmd_context)

    p = sub.add_parser("build", help="build a GKZ, lattice basis or Horn system")
    _problem_opts(p)
    p.add_argument("--system", choices=("gkz", "lattice", "horn", "nhorn"), default="gkz")
    p.add_argument("--degree", type=int, help="degree bound for toric generators")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("pi", help="explicit presentation of the invariant image")
    _problem_opts(p)
    p.add_argument("--system", choices=("gkz", "lattice"), default="lattice")
    p.add_argument("--degree", type=int)
    p.set_defaults(func=cmd_pi)

    p = sub.add_parser("shorn", help="saturated Horn decomposition")
    _problem_opts(p)
    p.set_defaults(func=cmd_shorn)

    p = sub.add_parser("series", help="truncated series solutions")
    p.add_argument("--system", required=True, help="system file written by build")
    p.add_argument("--order", type=int, default=8)
    p.add_argument("--start", help="starting exponent")
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("check", help="annihilation check of series by operators")
    p.add_argument("--ops", required=True)
    p.add_argument("--series", required=True)
    p.add_argument("--safe-order", type=int)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("classify", help="candidate primes and parameter tests")
    p.add_argument("--context", required=True, help="context or problem file")
    p.add_argument("--beta", required=True)
    p.add_argument("--no-pointed", action="store_true")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("hk", help="Horn-Kapranov parametrization and vanishing check")
    p.add_argument("--B", required=True)
    p.add_argument("--disc", help="discriminant as [[exponent, coefficient], ...]")
    p.add_argument("--s", help="evaluate (Bs)^B at this point")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_hk)

    p = sub.add_parser("golden", help="re-run all bundled fixtures")
    p.set_defaults(func=cmd_golden)
    return ap


def _error(exc, kind) -> str:
    return json.dumps({"error": str(exc), "type": kind})


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = parser().parse_args(argv)
    try:
        result, text = args.func(args)
    except InputError as exc:
        print(_error(exc, "InputError"), file=out)
        return 2
    except (LatticeError, WeylError, SeriesError, HKError, ValueError, ZeroDivisionError) as exc:
        print(_error(exc, type(exc).__name__), file=out)
        return 1
    if args.format == "pretty":
        print(text, file=out)
    else:
        print(json.dumps(encode(result), indent=2), file=out)
    if args.command == "golden" and not all(r["passed"] for r in result):
        return 1
    return 0


def main() -> None:
    sys.exit(run())
