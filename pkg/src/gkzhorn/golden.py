"""Structural comparison of bundled fixtures against fresh computations.

Fixture files live in ``fixtures/paper`` (keyed by example number) and
``fixtures/derived``.  Each holds ``input`` and ``expected`` blocks; a fixture
may also carry a ``paper`` block with values exactly as printed when those
differ from ``expected``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .classify import candidate_pairs, toral_parameter_tests
from .hk import dehomogenize_discriminant, vanish_check
from .invariant import pi_presentation, shorn_decomposition
from .lattice import build_gale_context, faces, normalized_volume, solve_parameter
from .serialize import fmt_rational, int_matrix, rational, rational_vector
from .series import (annihilation_check, gkz_series, horn_series, rank_by_series,
                     starting_exponents, torus_factor_map)
from .systems import (SystemSpec, gkz_system, horn_generators, lattice_basis_system,
                      restriction_witnesses, xring, zring)
from .weyl import ThetaPoly, WeylOp, format_op, format_theta, parse_op

FIXTURE_ROOT = Path(__file__).with_name("fixtures")


def fixture_paths() -> list[Path]:
    return sorted(FIXTURE_ROOT.glob("*/*.json"))


def load_fixture(name: str) -> dict:
    for p in fixture_paths():
        if p.stem == name:
            return json.loads(p.read_text())
    raise FileNotFoundError(name)


def context_from(inp: dict):
    return build_gale_context(int_matrix(inp["A"]),
                              int_matrix(inp["B"]) if inp.get("B") else None,
                              int_matrix(inp["Atilde"]) if inp.get("Atilde") else None,
                              require_pointed=inp.get("pointed", True))


# ---------------------------------------------------------------------------
# factored operator notation: coefficient * z^zLeft * prod(B_i . eta + kappa_i + shift)


def factored_theta(ctx, kappa, factors) -> ThetaPoly:
    g = ThetaPoly.const(ctx.m, 1)
    for i, shift in factors:
        row = tuple(Fraction(x) for x in ctx.B[i - 1])
        g = g * ThetaPoly.linear(row, kappa[i - 1] + rational(shift))
    return g


def display_from_terms(ctx, kappa, terms) -> dict:
    out: dict = {}
    for t in terms:
        r = rational_vector(t["prefactor"])
        g = factored_theta(ctx, kappa, t["factors"])
        g = ThetaPoly.const(ctx.m, rational(t["coefficient"])) * g
        out[r] = out.get(r, ThetaPoly(ctx.m)) + g
    return {r: g for r, g in out.items() if g}


def operator_from_terms(ctx, kappa, terms) -> WeylOp:
    R = zring(ctx.m)
    out = WeylOp.zero(R)
    for t in terms:
        a = [int(x) for x in t.get("zLeft", [0] * ctx.m)]
        g = factored_theta(ctx, kappa, t["factors"]).to_weyl(R)
        out = out + WeylOp.monomial(R, a, [0] * ctx.m, rational(t["coefficient"])) * g
    return out


# ---------------------------------------------------------------------------
# runners; each returns a list of (field, expected, got) mismatches


def _cmp(diffs, field, expected, got):
    if expected != got:
        diffs.append((field, expected, got))


def run_context(fx, expected):
    ctx = context_from(fx["input"])
    diffs = []
    for key in ("C", "B", "K"):
        _cmp(diffs, key, int_matrix(expected[key]), getattr(ctx, key))
    _cmp(diffs, "varkappa", tuple(expected["varkappa"]), ctx.varkappa)
    _cmp(diffs, "latticeIndex", expected["latticeIndex"], ctx.latticeIndex)
    _cmp(diffs, "epsC", tuple(expected["epsC"]), ctx.epsC)
    if "volume" in expected:
        _cmp(diffs, "volume", expected["volume"], normalized_volume(ctx.A))
    if "faces" in expected:
        got = sorted(sorted(i + 1 for i in f.columnIndices) for f in faces(ctx.A))
        _cmp(diffs, "faces", sorted(expected["faces"]), got)
    if "rank" in expected:
        beta = rational_vector(fx["input"]["beta"])
        g = gkz_system(ctx.A, beta, ctx=ctx)
        order = fx["input"].get("order", 8)
        _cmp(diffs, "rank", expected["rank"], rank_by_series(g, beta, order))
        if "zRank" in expected:
            _cmp(diffs, "zRank", expected["zRank"], rank_by_series(g, beta, order, side="z"))
    return diffs


def run_images(fx, expected):
    inp = fx["input"]
    ctx = context_from(inp)
    kappa = rational_vector(inp["kappa"])
    beta = tuple(sum(a * k for a, k in zip(row, kappa)) for row in ctx.A)
    R = xring(ctx.n)
    gens = tuple(parse_op(s, R) for s in inp["generators"])
    pres = pi_presentation(SystemSpec("GKZ", gens, A=ctx.A, beta=beta, ctx=ctx), ctx, kappa)
    diffs = []
    _cmp(diffs, "rowCount", len(expected["images"]), len(pres.rows))
    for i, (want, row) in enumerate(zip(expected["images"], pres.rows)):
        _cmp(diffs, f"image{i + 1}", display_from_terms(ctx, kappa, want), dict(row.display()))
    return diffs


def run_shorn(fx, expected):
    inp = fx["input"]
    ctx = context_from(inp)
    kappa = rational_vector(inp["kappa"])
    summands = shorn_decomposition(ctx, kappa)
    diffs = []
    _cmp(diffs, "summandCount", expected["summandCount"], len(summands))
    _cmp(diffs, "epsC", tuple(expected["epsC"]), ctx.epsC)
    _cmp(diffs, "shifts", [tuple(s) for s in expected["shifts"]], [s.shift for s in summands])
    for s in summands:
        _cmp(diffs, f"summand{s.box}", s.horn.generators, s.row_ops)
    want = expected["residueRow"]
    target = tuple(int(x) for x in want["shift"])
    hit = [s for s in summands if s.shift == target]
    if len(hit) != 1:
        diffs.append(("residueRow", target, [s.shift for s in summands]))
        return diffs
    s = hit[0]
    _cmp(diffs, "residueRow.basis", rational_vector(want["basis"]), s.basis)
    ops = tuple(operator_from_terms(ctx, kappa, t) for t in want["rows"])
    _cmp(diffs, "residueRow.ops", ops, s.row_ops)
    return diffs


def run_presentation(fx, expected):
    inp = fx["input"]
    ctx = context_from(inp)
    kappa = rational_vector(inp["kappa"])
    R = xring(ctx.n)
    gens = tuple(parse_op(s, R) for s in inp["generators"])
    sysm = SystemSpec("Module", gens, beta=rational_vector(inp["beta"]), kappa=kappa)
    pres = pi_presentation(sysm, ctx, kappa)
    basis = {tuple(int(x) for x in k): rational_vector(v) for k, v in expected["basis"]}
    Z = zring(ctx.m)
    want = [{tuple(int(x) for x in k): parse_op(op, Z) for k, op in row} for row in expected["rows"]]
    got = [mr.in_basis(basis) for mr in pres.module_rows()]
    diffs = []
    _cmp(diffs, "rows", want, [{k: v for k, v in g.items() if v} for g in got])
    return diffs


def run_classify(fx, expected):
    inp = fx["input"]
    ctx = context_from(inp)
    beta = rational_vector(inp["beta"])
    cands = candidate_pairs(ctx)
    diffs = []
    if "candidates" in expected:
        want = sorted((sorted(s), sorted(w), t) for s, w, t in expected["candidates"])
        got = sorted((sorted(i + 1 for i in p.sigma), sorted(k + 1 for k in p.omega), p.toral)
                     for p in cands)
        _cmp(diffs, "candidates", want, got)
    if "candidateCount" in expected:
        _cmp(diffs, "candidateCount", expected["candidateCount"], len(cands))
    if "andean" in expected:
        got = sorted([sorted(i + 1 for i in p.sigma), sorted(k + 1 for k in p.omega)]
                     for p in cands if not p.toral)
        _cmp(diffs, "andean", sorted(expected["andean"]), got)
    rep = toral_parameter_tests(ctx, beta)
    _cmp(diffs, "toralFlag", expected["toralFlag"], rep["toralFlag"].value)
    _cmp(diffs, "completelyToralFlag", expected["completelyToralFlag"], rep["completelyToralFlag"].value)
    if "inArrangementGammas" in expected:
        got = sorted([k + 1 for k in g["gamma"]] for g in rep["perGamma"] if g["flag"].value == "IN_ARRANGEMENT")
        _cmp(diffs, "inArrangementGammas", sorted(expected["inArrangementGammas"]), got)
    return diffs


def run_horn_series(fx, expected):
    inp = fx["input"]
    B = int_matrix(inp["B"])
    kappa = rational_vector(inp["kappa"])
    h = horn_generators(B, kappa)
    order = inp["order"]
    s = horn_series(h, rational_vector(inp["start"]), order)
    diffs = []
    want = [rational(c) for c in expected["coefficients"]]
    got = [s.coefficient((j,)) for j in range(len(want))]
    _cmp(diffs, "coefficients", want, got)
    rep = annihilation_check(h.generators, s, expected["safeOrder"])
    _cmp(diffs, "annihilated", True, rep["passed"])
    return diffs


def run_transfer(fx, expected):
    inp = fx["input"]
    ctx = context_from(inp)
    beta = rational_vector(inp["beta"])
    kappa = solve_parameter(ctx.A, beta, "annihilating_C")
    g = gkz_system(ctx.A, beta, ctx=ctx)
    horn = horn_generators(ctx.B, kappa)
    order, safe = inp["order"], expected["safeOrder"]
    diffs = []
    starts = starting_exponents(ctx.A, beta)
    _cmp(diffs, "startCount", expected["startCount"], len(starts))
    for sigma, v in starts:
        phi = gkz_series(g, v, order)
        x_ok = annihilation_check(list(g.generators) + list(g.eulerOps), phi, safe)["passed"]
        z_ok = annihilation_check(horn.generators, torus_factor_map(phi, ctx, kappa), safe)["passed"]
        _cmp(diffs, f"x{sigma}", True, x_ok)
        _cmp(diffs, f"z{sigma}", True, z_ok)
    return diffs


def run_witnesses(fx, expected):
    inp = fx["input"]
    ctx = context_from(inp)
    rep = restriction_witnesses(ctx, rational_vector(inp["kappa"]))
    diffs = []
    _cmp(diffs, "nhornEquality", expected["nhornEquality"], rep["nhornEquality"]["passed"])
    _cmp(diffs, "bfunctionWitness", expected["bfunctionWitness"], rep["bfunctionWitness"]["passed"])
    return diffs


def run_hk(fx, expected):
    inp = fx["input"]
    B = int_matrix(inp["B"])
    disc = {tuple(int(x) for x in e): rational(c) for e, c in inp["discriminant"]}
    f = dehomogenize_discriminant(disc, B)
    want = {tuple(int(x) for x in w): rational(c) for w, c in expected["laurent"]}
    diffs = []
    _cmp(diffs, "laurent", want, f.as_dict())
    rep = vanish_check(f, B, inp.get("samples", 20), inp.get("seed", 20240))
    _cmp(diffs, "vanishes", expected["vanishes"], rep["passed"])
    return diffs


RUNNERS = {
    "context": run_context, "images": run_images, "shorn": run_shorn,
    "presentation": run_presentation, "classify": run_classify, "horn_series": run_horn_series,
    "transfer": run_transfer, "witnesses": run_witnesses, "hk": run_hk,
}


def _show(x) -> str:
    if isinstance(x, Fraction):
        return fmt_rational(x)
    if isinstance(x, ThetaPoly):
        return format_theta(x, "e")
    if isinstance(x, WeylOp):
        return format_op(x)
    if isinstance(x, dict):
        return "{" + ", ".join(f"{_show(k)}: {_show(v)}" for k, v in x.items()) + "}"
    if isinstance(x, (list, tuple)):
        return "(" + ", ".join(_show(v) for v in x) + ")"
    return str(x)


def run_fixture(fx: dict, block: str = "expected") -> dict:
    runner = RUNNERS[fx["kind"]]
    diffs = runner(fx, fx[block])
    return {"name": fx.get("name"), "kind": fx["kind"], "passed": not diffs,
            "diffs": [{"field": f, "expected": _show(e), "got": _show(g)} for f, e, g in diffs]}


def run_all(jobs: int = 1) -> list[dict]:
    fixtures = []
    for p in fixture_paths():
        fx = json.loads(p.read_text())
        fx.setdefault("name", p.stem)
        fixtures.append(fx)
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(jobs) as ex:
            return list(ex.map(run_fixture, fixtures))
    return [run_fixture(fx) for fx in fixtures]
