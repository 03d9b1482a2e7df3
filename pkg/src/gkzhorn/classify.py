"""Candidate associated primes of lattice basis ideals and parameter tests.

A pair (sigma, omega) describes a prime ``J + <d_i : i not in sigma>`` with J
a prime of the lattice ideal of the submatrix of B on rows sigma, columns omega.
Two necessary conditions produce candidates: the block condition (needed for a
toral component, and sufficient for torality) and the sign condition (needed
for any prime containing I(B) but no d_i with i in sigma).  Andean components
are only known at prime level, so every "not in the arrangement" answer is
reported with the strength it actually has.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .lattice import (LatticeError, as_matrix, columns, det, faces, gale_extension, in_lattice,
                      kernel_basis,
                      left_kernel_basis, matmul, matvec, normalized_volume, rank, rref,
                      saturate_and_compare, shape, submatrix)

MAX_COLUMNS = 14


class Flag(str, Enum):
    NOT_IN_PRIME_LEVEL = "NOT_IN_PRIME_LEVEL"
    IN_ARRANGEMENT = "IN_ARRANGEMENT"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class SigmaOmegaPrime:
    sigma: frozenset
    omega: frozenset
    latticeGens: tuple
    toral: bool
    qdegSpan: tuple
    blockCondition: bool = True
    signCondition: bool = False


@dataclass(frozen=True)
class Subspace:
    span: tuple  # rows form a basis of a rational subspace of Q^d
    dim: int
    ambient: int
    shifts: tuple
    source: tuple = ()

    @property
    def proper(self) -> bool:
        return self.dim < self.ambient

    def contains(self, beta) -> bool:
        beta = tuple(Fraction(b) for b in beta)
        for t in self.shifts:
            x = tuple(b - s for b, s in zip(beta, t))
            if rank(list(self.span) + [x]) == self.dim:
                return True
        return False


@dataclass(frozen=True)
class Arrangement:
    components: tuple
    primeLevel: bool = True

    def contains(self, beta) -> bool:
        return any(c.contains(beta) for c in self.components)


def _span(vectors, d) -> Subspace:
    vecs = [tuple(Fraction(x) for x in v) for v in vectors if any(v)]
    basis = tuple(tuple(r) for r in rref(vecs)[0]) if vecs else ()
    return Subspace(basis, len(basis), d, ((0,) * d,))


def _block_ok(B, sigma, omega) -> bool:
    n, m = len(B), len(B[0]) if B and B[0] else 0
    rows = [i for i in range(n) if i not in sigma]
    out = [k for k in range(m) if k not in omega]
    if len(rows) != len(out):
        return False
    if any(B[i][k] for i in rows for k in omega):
        return False
    return not rows or det([[B[i][k] for k in out] for i in rows]) != 0


def _sign_omega(B, sigma):
    """omega forced by sigma, or None when some binomial becomes a monomial."""
    n, m = len(B), len(B[0]) if B and B[0] else 0
    rows = [i for i in range(n) if i not in sigma]
    omega = []
    for k in range(m):
        vals = [B[i][k] for i in rows]
        if not any(vals):
            omega.append(k)
        elif not (any(v > 0 for v in vals) and any(v < 0 for v in vals)):
            return None
    return tuple(omega)


def _toral(A, B, sigma, omega) -> bool:
    S, W = sorted(sigma), sorted(omega)
    if not S:
        return True
    AS = submatrix(A, None, S)
    ker = kernel_basis(AS) if rank(AS) < len(S) else tuple(() for _ in S)
    gens = tuple(tuple(B[i][k] for k in W) for i in S)
    if not W or not any(any(r) for r in gens):
        return not ker or not ker[0]
    if not ker or not ker[0]:
        return False
    return saturate_and_compare(gens, ker)["equal"]


def _candidates(A, B) -> list[SigmaOmegaPrime]:
    A = as_matrix(A)
    n = len(A[0])
    m = len(B[0]) if B and B[0] else 0
    if n > MAX_COLUMNS:
        raise ValueError(f"brute force limited to n <= {MAX_COLUMNS}")
    found: dict = {}
    for s in range(n, -1, -1):
        for sigma in combinations(range(n), s):
            # the block forces |omega| = m - (n - |sigma|)
            w = m - (n - s)
            if 0 <= w <= m:
                for omega in combinations(range(m), w):
                    if _block_ok(B, sigma, omega):
                        found.setdefault((sigma, omega), [False, False])[0] = True
            omega = _sign_omega(B, sigma)
            if omega is not None:
                found.setdefault((sigma, omega), [False, False])[1] = True
    out = []
    for (sigma, omega), (blk, sgn) in found.items():
        gens = tuple(tuple(B[i][k] for k in omega) for i in sigma)
        span = _span(columns(submatrix(A, None, sigma)) if sigma else [], len(A))
        out.append(SigmaOmegaPrime(frozenset(sigma), frozenset(omega), gens,
                                   _toral(A, B, sigma, omega), span.span, blk, sgn))
    return out


def candidate_pairs(ctx, B=None) -> list[SigmaOmegaPrime]:
    """Pairs passing the block or the sign condition; ``ctx`` may be a GaleContext or A."""
    if B is None:
        return _candidates(ctx.A, ctx.B)
    return _candidates(ctx, as_matrix(B))


def toral_test(ctx, p: SigmaOmegaPrime) -> bool:
    return _toral(ctx.A, ctx.B, p.sigma, p.omega)


def _arrangement(A, cands, d) -> Arrangement:
    comps = []
    seen = set()
    for p in cands:
        if p.toral:
            continue
        cols = [c[:d] for c in columns(submatrix(A, None, sorted(p.sigma)))] if p.sigma else []
        sp = _span(cols, d)
        sp = Subspace(sp.span, sp.dim, d, sp.shifts, (tuple(sorted(p.sigma)), tuple(sorted(p.omega))))
        if sp.span in seen:
            continue
        seen.add(sp.span)
        comps.append(sp)
    return Arrangement(tuple(comps))


def andean_arrangement_prime_level(ctx) -> Arrangement:
    return _arrangement(ctx.A, candidate_pairs(ctx), ctx.d)


def _gamma_data(ctx, gamma):
    Bg = tuple(tuple(row[k] for k in gamma) for row in ctx.B)
    Ag = gale_extension(Bg if gamma else tuple(() for _ in ctx.B), ctx.A)
    cands = _candidates(Ag, Bg)
    return Ag, cands, _arrangement(Ag, cands, ctx.d)


def _flag(cands, arr, beta) -> Flag:
    if not any(not p.toral for p in cands):
        return Flag.NOT_IN_PRIME_LEVEL
    return Flag.IN_ARRANGEMENT if arr.contains(beta) else Flag.UNKNOWN


def toral_parameter_tests(ctx, beta: Sequence, jobs: int = 1) -> dict:
    beta = tuple(Fraction(b) for b in beta)
    cands = candidate_pairs(ctx)
    arr = _arrangement(ctx.A, cands, ctx.d)
    toral = _flag(cands, arr, beta)
    gammas = [g for k in range(ctx.m + 1) for g in combinations(range(ctx.m), k)]
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(jobs) as ex:
            data = list(ex.map(lambda g: _gamma_data(ctx, g), gammas))
    else:
        data = [_gamma_data(ctx, g) for g in gammas]
    per = []
    flags = []
    for g, (Ag, gc, garr) in zip(gammas, data):
        f = _flag(gc, garr, beta)
        flags.append(f)
        per.append({"gamma": g, "flag": f, "arrangement": garr,
                    "andean": [(tuple(sorted(p.sigma)), tuple(sorted(p.omega))) for p in gc if not p.toral]})
    if Flag.IN_ARRANGEMENT in flags:
        complete = Flag.IN_ARRANGEMENT
    elif all(f is Flag.NOT_IN_PRIME_LEVEL for f in flags):
        complete = Flag.NOT_IN_PRIME_LEVEL
    else:
        complete = Flag.UNKNOWN
    certs = []
    if complete is Flag.NOT_IN_PRIME_LEVEL:
        certs.append("Horn(B,kappa) holonomic: no Andean candidate for any gamma")
    elif complete is Flag.UNKNOWN:
        certs.append("Horn(B,kappa) holonomic (prime-level certificate)")
    return {"toralFlag": toral, "completelyToralFlag": complete, "perGamma": per,
            "candidates": cands, "arrangement": arr, "certificates": certs}


# ---------------------------------------------------------------------------
# resonance


def is_resonant(A, G, beta) -> bool:
    """beta in ZA + QG, decided exactly for rational beta."""
    A = as_matrix(A)
    d = len(A)
    beta = tuple(Fraction(b) for b in beta)
    if G:
        M = left_kernel_basis(submatrix(A, None, sorted(G)))
        M = M if M else ()
    else:
        M = tuple(tuple(int(i == j) for j in range(d)) for i in range(d))
    if not M:
        return True
    return in_lattice(matmul(M, A), matvec(M, beta)) is not None


def resonance_and_pyramid(A_sigma, beta) -> dict:
    A = as_matrix(A_sigma)
    fs = faces(A)
    res = {f.columnIndices: is_resonant(A, f.columnIndices, beta) for f in fs}
    centers = [f for f in fs if not res[f.columnIndices]
               and all(res[g.columnIndices] for g in fs if f.columnIndices < g.columnIndices)]
    vol = normalized_volume(A)

    def face_vol(f):
        return normalized_volume(submatrix(A, None, sorted(f.columnIndices))) if f.columnIndices else 1

    pyramids = [face_vol(f) == vol for f in centers]
    unique = len(centers) == 1
    pyramid = unique and pyramids[0]
    return {"centers": centers, "unique": unique, "pyramid": pyramid,
            "centerPyramid": pyramids, "irreducible": unique and pyramid, "resonant": res}
