"""Truncated logarithm-free series for GKZ and Horn systems.

x-side series are Gamma-series ``sum_u c_u x^{v+u}`` over the kernel lattice of
A; z-side series are Horn series ``sum_u c_u z^{v+u}``.  Every series carries a
weight vector ``cone`` and is complete up to ``order`` in the grading
``cone . u``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from .lattice import (LatticeError, as_matrix, columns, det, identity, inverse, kernel_basis,
                      matvec, rank, shape, solve_parameter, solve_rational, submatrix, transpose, triangulate)
from .systems import SystemSpec, gkz_system, horn_factors, horn_generators
from .weyl import WeylOp, apply_to_monomial


class SeriesError(ValueError):
    pass


class ResonanceWarning(UserWarning):
    pass


@dataclass
class TruncatedSeries:
    side: str
    baseExponent: tuple
    supportLattice: tuple
    cone: tuple
    terms: dict
    order: int
    branches: int = 1
    sigma: tuple | None = None

    def grading(self, u) -> Fraction:
        return sum(Fraction(w) * Fraction(x) for w, x in zip(self.cone, u))

    def exponent(self, u) -> tuple:
        return tuple(a + b for a, b in zip(self.baseExponent, u))

    def coefficient(self, u) -> Fraction:
        return self.terms.get(tuple(u), Fraction(0))


def _compositions(k: int, total: int):
    if k == 0:
        if total == 0:
            yield ()
        return
    for i in range(total, -1, -1):
        for rest in _compositions(k - 1, total - i):
            yield (i,) + rest


def _graded_points(k: int, order: int):
    for t in range(order + 1):
        yield from sorted(_compositions(k, t))


def _prod_value(factors, point) -> Fraction:
    out = Fraction(1)
    for f in factors:
        out *= f.value(point)
        if not out:
            break
    return out


# ---------------------------------------------------------------------------
# Horn series


def horn_series(hornSys: SystemSpec, startExponent: Sequence, order: int) -> TruncatedSeries:
    B, kappa = hornSys.B, hornSys.kappa
    m = len(B[0])
    v = tuple(Fraction(x) for x in startExponent)
    if len(v) != m:
        raise SeriesError("start exponent has the wrong length")
    facs = hornSys.factored or tuple(horn_factors(B, kappa, k) for k in range(m))

    def q(k, u):
        return _prod_value(facs[k].q, tuple(a + b for a, b in zip(v, u)))

    def p(k, u):
        return _prod_value(facs[k].p, tuple(a + b for a, b in zip(v, u)))

    zero = (0,) * m
    terms = {zero: Fraction(1)}
    for u in _graded_points(m, order):
        if u == zero:
            continue
        for k in range(m):
            if u[k] > 0 and q(k, u) == 0:
                raise SeriesError(f"resonant start exponent: q_{k + 1} vanishes at u={list(u)}")
        k = next(i for i in range(m) if u[i] > 0)
        prev = u[:k] + (u[k] - 1,) + u[k + 1:]
        c = terms.get(prev, 0) * p(k, prev) / q(k, u)
        if c:
            terms[u] = c
    # every recurrence must hold, including the boundary u_k = 0
    for u in _graded_points(m, order):
        cu = terms.get(u, 0)
        for k in range(m):
            prev = u[:k] + (u[k] - 1,) + u[k + 1:]
            lhs = cu * q(k, u)
            rhs = terms.get(prev, 0) * p(k, prev) if u[k] > 0 else 0
            if lhs != rhs:
                raise SeriesError(f"start exponent violates recurrence {k + 1} at u={list(u)}")
    return TruncatedSeries("z", v, identity(m), (1,) * m, terms, order)


# ---------------------------------------------------------------------------
# Gamma-series


def _falling(a: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for i in range(k):
        out *= a - i
    return out


def gkz_series(gkzSys: SystemSpec, v: Sequence, order: int) -> TruncatedSeries:
    """Gamma-series with base v; coordinates of v in N are the support directions."""
    A, beta = gkzSys.A, gkzSys.beta
    d, n = shape(A)
    v = tuple(Fraction(x) for x in v)
    if matvec(A, v) != tuple(Fraction(b) for b in beta):
        raise SeriesError("base exponent does not satisfy A v = beta")
    J = [j for j in range(n) if v[j].denominator == 1 and v[j] >= 0]
    S = [j for j in range(n) if j not in J]
    AS = submatrix(A, None, S)
    AJ = submatrix(A, None, J)
    if S and rank(AS) != len(S):
        raise SeriesError("resonant exponent: the columns with non-natural exponents are dependent")
    w = tuple(int(j in J) for j in range(n))
    vJ = [v[j] for j in J]
    top = int(sum(vJ)) + order
    terms = {}
    for t in _graded_points(len(J), top):
        uJ = [Fraction(a) - b for a, b in zip(t, vJ)]
        rhs = tuple(-x for x in matvec(AJ, uJ)) if J else (Fraction(0),) * d
        if S:
            uS = solve_rational(AS, rhs)
            if uS is None or any(x.denominator != 1 for x in uS):
                continue
        elif any(rhs):
            continue
        else:
            uS = ()
        u = [0] * n
        for j, x in zip(J, uJ):
            u[j] = int(x)
        for j, x in zip(S, uS):
            u[j] = int(x)
        num = Fraction(1)
        den = Fraction(1)
        for j in range(n):
            if u[j] < 0:
                num *= _falling(v[j], -u[j])
            elif u[j] > 0:
                f = _falling(v[j] + u[j], u[j])
                if f == 0:
                    raise SeriesError(f"resonant exponent: factor x_{j + 1}^({v[j] + u[j]}) "
                                      f"falling {u[j]} vanishes at u={u}")
                den *= f
        c = num / den
        if c:
            terms[tuple(u)] = c
    if (0,) * n not in terms:
        raise SeriesError("base exponent carries a zero leading coefficient")
    return TruncatedSeries("x", v, kernel_basis(A), w, terms, order, sigma=tuple(S))


# ---------------------------------------------------------------------------
# verification


def annihilation_check(ops: Sequence[WeylOp], s: TruncatedSeries, safeOrder: int | None = None) -> dict:
    """Apply each operator termwise and test every complete coefficient up to safeOrder."""
    shifts = []
    for op in ops:
        shifts.append([s.grading(tuple(a - b for a, b in zip(sx, tx))) for (sx, tx), _ in op.items()])
    if safeOrder is None:
        worst = max((max(0, -g) for sh in shifts for g in sh), default=0)
        safeOrder = s.order - int(worst)
    nonzero = []
    checked = 0
    for i, op in enumerate(ops):
        out: dict = {}
        for u, c in s.terms.items():
            for e, val in apply_to_monomial(op, s.exponent(u), c).items():
                out[e] = out.get(e, 0) + val
        for e, val in out.items():
            off = tuple(a - b for a, b in zip(e, s.baseExponent))
            g = s.grading(off)
            if g > safeOrder or any(g - sh > s.order for sh in shifts[i]):
                continue
            checked += 1
            if val:
                nonzero.append({"operator": i, "exponent": off, "grading": g, "residual": val})
    nonzero.sort(key=lambda r: (r["grading"], r["operator"], r["exponent"]))
    return {"passed": not nonzero, "checked": checked, "safeOrder": safeOrder,
            "nonzero": nonzero,
            "maxResidual": max((abs(r["residual"]) for r in nonzero), default=Fraction(0))}


# ---------------------------------------------------------------------------
# transfer to the z-side


def torus_factor_map(phi: TruncatedSeries, ctx, kappa: Sequence) -> TruncatedSeries:
    """Write phi = x^kappa f(x^B) and return f; rational offsets mean several branches."""
    if phi.side != "x":
        raise SeriesError("expected an x-side series")
    kappa = tuple(Fraction(k) for k in kappa)
    if any(sum(k * c for k, c in zip(kappa, col)) for col in columns(ctx.C)):
        raise SeriesError("kappa must annihilate C")
    B = ctx.B
    w0 = solve_rational(B, tuple(a - b for a, b in zip(phi.baseExponent, kappa)))
    if w0 is None:
        raise SeriesError("v - kappa is not in the span of B")
    terms = {}
    for u, c in phi.terms.items():
        delta = solve_rational(B, u)
        if delta is None:
            raise SeriesError("support point outside the span of B")
        terms[tuple(delta)] = c
    cone = tuple(sum(Fraction(phi.cone[i]) * B[i][k] for i in range(ctx.n)) for k in range(ctx.m))
    return TruncatedSeries("z", tuple(w0), identity(ctx.m), cone, terms, phi.order,
                           branches=ctx.latticeIndex)


def branch_components(s: TruncatedSeries) -> dict:
    """Split a z-series by the class of its offsets modulo Z^m."""
    parts: dict = {}
    for u, c in s.terms.items():
        key = tuple(x - (x.numerator // x.denominator) for x in map(Fraction, u))
        parts.setdefault(key, {})[u] = c
    out = {}
    for key, terms in sorted(parts.items()):
        base = tuple(a + b for a, b in zip(s.baseExponent, key))
        shifted = {tuple(int(x - k) for x, k in zip(u, key)): c for u, c in terms.items()}
        out[key] = TruncatedSeries("z", base, s.supportLattice, s.cone, shifted, s.order,
                                   sigma=s.sigma)
    return out


# ---------------------------------------------------------------------------
# starting exponents and rank


def _frac_key(M, t):
    return tuple(x - (x.numerator // x.denominator) for x in matvec(M, t))


def starting_exponents(A, beta) -> list[tuple]:
    """(sigma, v) for every simplex of a pulling triangulation of conv(0, A) and class."""
    A = as_matrix(A)
    d, n = shape(A)
    beta = tuple(Fraction(b) for b in beta)
    pts = [(0,) * d] + [tuple(c) for c in columns(A)]
    out = []
    for simplex in triangulate(pts, "first"):
        S = sorted(i - 1 for i in simplex if i)
        if len(S) != d:
            continue
        J = [j for j in range(n) if j not in S]
        AS = submatrix(A, None, S)
        N = abs(int(det(AS)))
        ASinv = inverse(AS)
        M = [[sum(ASinv[r][k] * A[k][j] for k in range(d)) for j in J] for r in range(d)]
        reps = {}
        for total in range((N - 1) * len(J) + 1):
            for t in sorted(_compositions(len(J), total)):
                reps.setdefault(_frac_key(M, t) if J else (), t)
        for t in reps.values():
            rhs = tuple(b - sum(A[r][j] * x for j, x in zip(J, t)) for r, b in enumerate(beta))
            vS = matvec(ASinv, rhs)
            v = [Fraction(0)] * n
            for j, x in zip(J, t):
                v[j] = Fraction(x)
            for j, x in zip(S, vS):
                v[j] = x
            out.append((tuple(S), tuple(v)))
    return out


def rank_by_series(sys: SystemSpec, genericBeta: Sequence, order: int, side: str = "x") -> int:
    """Count independent series built from the starting exponents of A.

    On the z-side each x-series is transported by ``torus_factor_map`` and every
    residue component of its offsets counts separately.
    """
    A = sys.A
    beta = tuple(Fraction(b) for b in genericBeta)
    gsys = sys if sys.kind == "GKZ" and tuple(sys.beta) == beta else gkz_system(A, beta)
    ops = list(gsys.generators) + list(gsys.eulerOps)
    if side == "z":
        if sys.ctx is None:
            raise SeriesError("z-side count needs a Gale context")
        kappa = solve_parameter(A, beta, "annihilating_C")
        horn = horn_generators(sys.ctx.B, kappa)
    seen = set()
    count = 0
    for sigma, v in starting_exponents(A, beta):
        if v in seen:
            continue
        seen.add(v)
        if any(v[j].denominator == 1 for j in sigma):
            warnings.warn(f"resonant start on simplex {sigma}: skipped", ResonanceWarning)
            continue
        try:
            s = gkz_series(gsys, v, order)
        except SeriesError as exc:
            warnings.warn(f"simplex {sigma}: {exc}", ResonanceWarning)
            continue
        if not annihilation_check(ops, s)["passed"]:
            warnings.warn(f"simplex {sigma}: series fails the annihilation check", ResonanceWarning)
            continue
        if side == "x":
            count += 1
            continue
        for comp in branch_components(torus_factor_map(s, sys.ctx, kappa)).values():
            if annihilation_check(horn.generators, comp)["passed"]:
                count += 1
    return count
