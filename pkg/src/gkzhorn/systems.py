"""Generators of GKZ, lattice basis, Horn and homogenized binomial systems."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

from .lattice import (LatticeError, as_matrix, columns, det, inverse, matvec,
                      rank, rref, shape, submatrix)
from .weyl import (INHOMOGENEOUS, ThetaPoly, WeightVector, WeylError, WeylOp,
                   WeylRing, a_degree, euler_operators, initial_form)


def xring(n: int) -> WeylRing:
    return WeylRing(n, laurent=False, kind="x")


def zring(m: int) -> WeylRing:
    return WeylRing(m, laurent=True, kind="z")


@dataclass(frozen=True)
class LinearFactor:
    """The linear form row . eta + shift."""

    row: tuple
    shift: Fraction

    def poly(self) -> ThetaPoly:
        return ThetaPoly.linear(self.row, self.shift)

    def value(self, point) -> Fraction:
        return sum(Fraction(r) * Fraction(p) for r, p in zip(self.row, point)) + self.shift


@dataclass(frozen=True)
class HornFactors:
    q: tuple  # LinearFactor, ascending ell per row
    p: tuple


@dataclass(frozen=True)
class SystemSpec:
    kind: str
    generators: tuple
    eulerOps: tuple = ()
    A: tuple | None = None
    B: tuple | None = None
    beta: tuple | None = None
    kappa: tuple | None = None
    ctx: object = None
    degrees: tuple = ()
    factored: tuple = ()

    @property
    def ring(self) -> WeylRing:
        return self.generators[0].ring if self.generators else None


# ---------------------------------------------------------------------------
# commutative binomials


def _binomial(ring, u, v) -> WeylOp:
    z = [0] * ring.n
    return WeylOp.monomial(ring, z, u) - WeylOp.monomial(ring, z, v)


def lattice_basis_ideal(B) -> list[WeylOp]:
    B = as_matrix(B)
    n = len(B)
    R = xring(n)
    out = []
    for w in columns(B):
        if all(x == 0 for x in w):
            raise LatticeError("zero column in B")
        out.append(_binomial(R, [max(x, 0) for x in w], [max(-x, 0) for x in w]))
    return out


def grevlex_key(u):
    """Sort key: ascending key means smaller in degree reverse lexicographic order."""
    return (sum(u), tuple(-x for x in reversed(u)))


def _orient(u, v):
    return (u, v) if grevlex_key(u) > grevlex_key(v) else (v, u)


def _compositions(n, total):
    if n == 1:
        yield (total,)
        return
    for i in range(total + 1):
        for rest in _compositions(n - 1, total - i):
            yield (i,) + rest


def _monomials_upto(n, deg):
    for t in range(deg + 1):
        yield from _compositions(n, t)


def ideal_membership_upto(gens: Sequence[dict], f: dict, degBound: int) -> bool:
    """Is f in <gens> using only multipliers with total degree <= degBound?

    Polynomials are dicts {exponent tuple: coefficient}.
    """
    deg = lambda g: max((sum(e) for e in g), default=0)
    if f and degBound < deg(f):
        raise ValueError("degree bound below the degree of f")
    if not f:
        return True
    n = len(next(iter(f)))
    vectors = []
    for g in gens:
        if not g:
            continue
        for mono in _monomials_upto(n, degBound - deg(g)):
            vectors.append({tuple(a + b for a, b in zip(e, mono)): c for e, c in g.items()})
    if not vectors:
        return False
    support = sorted({e for v in vectors for e in v} | set(f))
    index = {e: i for i, e in enumerate(support)}
    # f in span(vectors)  <=>  rank does not grow when f is appended
    rows = [[Fraction(0)] * len(support) for _ in vectors]
    for r, v in zip(rows, vectors):
        for e, c in v.items():
            r[index[e]] = Fraction(c)
    frow = [Fraction(0)] * len(support)
    for e, c in f.items():
        frow[index[e]] = Fraction(c)
    return rank(rows) == rank(rows + [frow])


def _as_dpoly(op: WeylOp) -> dict:
    return {b: c for (a, b), c in op.items()}


def toric_gens_bounded(A, degBound: int) -> list[WeylOp]:
    """Binomials of I_A up to degBound, reduced to a minimal generating set within that bound."""
    A = as_matrix(A)
    n = len(A[0])
    R = xring(n)
    groups: dict = {}
    for u in _monomials_upto(n, degBound):
        groups.setdefault(matvec(A, u), []).append(u)
    cands = set()
    for us in groups.values():
        for u, v in combinations(us, 2):
            if any(a and b for a, b in zip(u, v)):
                continue
            cands.add(_orient(u, v))
    ordered = sorted(cands, key=lambda uv: (sum(uv[0]), grevlex_key(uv[0]), grevlex_key(uv[1])))
    kept: list = []
    for u, v in ordered:
        f = {u: 1, v: -1}
        if kept and ideal_membership_upto([{a: 1, b: -1} for a, b in kept], f, max(sum(u), sum(v))):
            continue
        kept.append((u, v))
    kept.sort(key=lambda uv: (grevlex_key(uv[0]), grevlex_key(uv[1])))
    return [_binomial(R, u, v) for u, v in kept]


def gkz_system(A, beta, degBound: int = 3, ctx=None) -> SystemSpec:
    A = as_matrix(A)
    gens = tuple(toric_gens_bounded(A, degBound))
    return SystemSpec("GKZ", gens, tuple(euler_operators(A, beta, xring(len(A[0])))), A=A,
                      B=ctx.B if ctx else None, beta=tuple(Fraction(b) for b in beta), ctx=ctx,
                      degrees=tuple(a_degree(g, A) for g in gens))


def lattice_basis_system(ctx, kappa) -> SystemSpec:
    kappa = tuple(Fraction(k) for k in kappa)
    beta = matvec(ctx.A, kappa)
    gens = tuple(lattice_basis_ideal(ctx.B))
    return SystemSpec("LatticeBasisBinomial", gens, tuple(euler_operators(ctx.A, beta, xring(ctx.n))),
                      A=ctx.A, B=ctx.B, beta=beta, kappa=kappa, ctx=ctx,
                      degrees=tuple(a_degree(g, ctx.A) for g in gens))


# ---------------------------------------------------------------------------
# Horn systems


def horn_factors(B, kappa, k: int) -> HornFactors:
    q, p = [], []
    for row, kap in zip(B, kappa):
        b = row[k]
        target = q if b > 0 else p
        for ell in range(abs(b)):
            target.append(LinearFactor(tuple(Fraction(x) for x in row), Fraction(kap) - ell))
    return HornFactors(tuple(q), tuple(p))


def _product_poly(m, factors) -> ThetaPoly:
    out = ThetaPoly.const(m, 1)
    for f in factors:
        out = out * f.poly()
    return out


def find_positive_diagonal(B):
    """Rows r_1..r_m with B[r_k][k] > 0 and B[r_k][j] = 0 for j != k, or None."""
    B = as_matrix(B)
    n, m = shape(B)
    choices = []
    for k in range(m):
        rows = [i for i in range(n) if B[i][k] > 0 and all(B[i][j] == 0 for j in range(m) if j != k)]
        if not rows:
            return None
        choices.append(rows)
    for pick in product(*choices):
        if len(set(pick)) == m:
            return pick
    return None


def horn_generators(B, kappa, normalized: bool = False) -> SystemSpec:
    B = as_matrix(B)
    n, m = shape(B)
    kappa = tuple(Fraction(k) for k in kappa)
    if len(kappa) != n:
        raise ValueError("kappa has the wrong length")
    if rank(B) != m:
        raise LatticeError("B must have full column rank")
    if normalized:
        diag = find_positive_diagonal(B)
        if diag is None:
            raise ValueError("B has no diagonal positive m x m submatrix")
        for k, i in enumerate(diag):
            if kappa[i] != 0:
                raise ValueError(f"row {i + 1}: kappa entry must vanish for the normalized system")
    R = zring(m)
    gens, facs, degs = [], [], []
    for k in range(m):
        hf = horn_factors(B, kappa, k)
        q = _product_poly(m, hf.q).to_weyl(R)
        p = _product_poly(m, hf.p).to_weyl(R)
        zk = WeylOp.var(R, k)
        if normalized:
            g = WeylOp.var(R, k, -1) * q - p
        else:
            g = q - zk * p
        gens.append(g)
        facs.append(hf)
        degs.append(tuple(sorted({tuple(a[i] - b[i] for i in range(m)) for (a, b), _ in g.items()})))
    return SystemSpec("NormalizedHorn" if normalized else "Horn", tuple(gens), (), B=B, kappa=kappa,
                      degrees=tuple(degs), factored=tuple(facs))


# ---------------------------------------------------------------------------
# homogenization


def rho_matrix(A):
    A = as_matrix(A)
    n = len(A[0])
    return ((1,) * (n + 1),) + tuple((0,) + tuple(r) for r in A)


def homogenize_rho(A, gens, beta, beta0) -> SystemSpec:
    A = as_matrix(A)
    n = len(A[0])
    R = xring(n + 1)
    out = []
    for g in gens:
        items = list(g.items())
        if len(items) != 2 or any(any(a) for (a, b), _ in items) or sorted(c for _, c in items) != [-1, 1]:
            raise WeylError("homogenization expects binomials in the derivatives")
        (u, cu), (v, cv) = [(b, c) for (a, b), c in items]
        if cu < 0:
            (u, cu), (v, cv) = (v, cv), (u, cu)
        du, dv = sum(u), sum(v)
        hu = (max(dv - du, 0),) + tuple(u)
        hv = (max(du - dv, 0),) + tuple(v)
        out.append(_binomial(R, hu, hv))
    rA = rho_matrix(A)
    rb = (Fraction(beta0),) + tuple(Fraction(b) for b in beta)
    return SystemSpec("HomogenizedBinomial", tuple(out), tuple(euler_operators(rA, rb, R)), A=rA, beta=rb,
                      degrees=tuple(a_degree(g, rA) for g in out))


# ---------------------------------------------------------------------------
# restriction witnesses


def shift_variable(p: WeylOp, j: int) -> WeylOp:
    """Apply the automorphism x_j -> x_j + 1 (derivatives fixed)."""
    from math import comb

    acc: dict = {}
    for (a, b), c in p.items():
        if a[j] < 0:
            raise WeylError("shift needs nonnegative exponents")
        for i in range(a[j] + 1):
            a2 = list(a)
            a2[j] = i
            key = (tuple(a2), b)
            acc[key] = acc.get(key, 0) + c * comb(a[j], i)
    return WeylOp(p.ring, acc)


def _check_identity_top(ctx, kappa):
    m = ctx.m
    B = ctx.B
    for i in range(m):
        for k in range(m):
            if B[i][k] != int(i == k):
                raise ValueError("the top m rows of B must form an identity matrix")
    for i in range(m):
        if Fraction(kappa[i]) != 0:
            raise ValueError(f"kappa_{i + 1} must vanish")


def restrict_to_ones(op: WeylOp, B, kappa, m: int) -> WeylOp:
    """Rewrite an x-side operator modulo the Euler operators and set x_{m+1..n} = 1.

    theta_j (j > m) is replaced by kappa_j + sum_{i<=m} b_ji theta_i.
    """
    n = op.ring.n
    R = zring(m)
    out = WeylOp.zero(R)
    images = [ThetaPoly.linear(tuple(Fraction(x) for x in B[j]), Fraction(kappa[j])) for j in range(n)]
    for (a, b), c in op.items():
        for j in range(m, n):
            if a[j] < b[j]:
                raise WeylError("term cannot be written with theta in the restricted variables")
        poly = ThetaPoly.const(m, c)
        for j in range(m, n):
            for ell in range(b[j]):
                poly = poly * (images[j] - ell)
        out = out + WeylOp.monomial(R, a[:m], b[:m]) * poly.to_weyl(R)
    return out


def restriction_witnesses(ctx, kappa) -> dict:
    kappa = tuple(Fraction(k) for k in kappa)
    _check_identity_top(ctx, kappa)
    n, m, d = ctx.n, ctx.m, ctx.d
    B = ctx.B
    R = xring(n)
    nhorn = horn_generators(B, kappa, normalized=True)
    eq_details = []
    for k in range(m):
        w = [B[i][k] for i in range(n)]
        mu = [0] * m + [abs(w[j]) for j in range(m, n)]
        op = WeylOp.monomial(R, mu, [0] * n) * _binomial(R, [max(x, 0) for x in w], [max(-x, 0) for x in w])
        lhs = restrict_to_ones(op, B, kappa, m)
        eq_details.append({"k": k + 1, "restricted": lhs, "nhorn": nhorn.generators[k],
                           "equal": lhs == nhorn.generators[k]})
    beta = matvec(ctx.A, kappa)
    Arest = submatrix(ctx.A, None, range(m, n))
    Ainv = inverse(Arest)
    euler = euler_operators(ctx.A, beta, R)
    weight = WeightVector(tuple([0] * m + [-1] * d), tuple([0] * m + [1] * d))
    b_details = []
    for jj in range(d):
        j = m + jj
        nu = Ainv[jj]  # row jj of Arest^{-1}: (nu A)_k = delta_{jk} for k > m
        op = WeylOp.zero(R)
        for i in range(d):
            op = op + euler[i].scale(nu[i])
        op = WeylOp.var(R, j) * shift_variable(op, j)
        inf = initial_form(op, weight)
        b_details.append({"j": j + 1, "nu": nu, "initial": inf, "equal": inf == WeylOp.theta(R, j)})
    return {
        "nhornEquality": {"passed": all(x["equal"] for x in eq_details), "details": eq_details},
        "bfunctionWitness": {"passed": all(x["equal"] for x in b_details), "details": b_details},
    }
