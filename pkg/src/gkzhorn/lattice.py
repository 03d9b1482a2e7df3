"""Exact integer and rational linear algebra.

Matrices are tuples of row tuples holding ``int`` (or ``Fraction`` where
rational data is unavoidable).  Nothing here touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Iterable, Sequence


class LatticeError(ValueError):
    """Raised for degenerate or inconsistent lattice input."""


# ---------------------------------------------------------------------------
# small matrix helpers


def as_matrix(rows) -> tuple:
    out = tuple(tuple(r) for r in rows)
    if out and len({len(r) for r in out}) != 1:
        raise LatticeError("ragged matrix")
    return out


def shape(M) -> tuple[int, int]:
    return (len(M), len(M[0]) if M else 0)


def identity(n: int) -> tuple:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def transpose(M) -> tuple:
    if not M:
        return ()
    return tuple(zip(*M))


def matmul(X, Y) -> tuple:
    Yt = transpose(Y)
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in Yt) for row in X)


def matvec(M, v) -> tuple:
    return tuple(sum(a * b for a, b in zip(row, v)) for row in M)


def vecmat(v, M) -> tuple:
    return tuple(sum(v[i] * M[i][j] for i in range(len(v))) for j in range(len(M[0])))


def columns(M) -> list[tuple]:
    return list(transpose(M))


def from_columns(cols, nrows: int) -> tuple:
    if not cols:
        return tuple(() for _ in range(nrows))
    return transpose(cols)


def submatrix(M, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None) -> tuple:
    rows = range(len(M)) if rows is None else rows
    cols = range(len(M[0]) if M else 0) if cols is None else cols
    return tuple(tuple(M[i][j] for j in cols) for i in rows)


def is_zero(M) -> bool:
    return all(x == 0 for row in M for x in row)


def det(M) -> Fraction | int:
    """Determinant by fraction-free Bareiss elimination."""
    n = len(M)
    if n == 0:
        return 1
    a = [list(r) for r in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j])
                a[i][j] = a[i][j] / prev if isinstance(a[i][j], Fraction) else _exact_div(a[i][j], prev)
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _exact_div(a, b):
    if isinstance(a, int) and isinstance(b, int):
        q, r = divmod(a, b)
        if r == 0:
            return q
    return Fraction(a) / Fraction(b)


def rref(M):
    """Reduced row echelon form over Q.  Returns (rows, pivot columns)."""
    a = [[Fraction(x) for x in r] for r in M]
    if not a:
        return [], []
    nr, nc = len(a), len(a[0])
    pivots = []
    r = 0
    for c in range(nc):
        p = next((i for i in range(r, nr) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        pv = a[r][c]
        a[r] = [x / pv for x in a[r]]
        for i in range(nr):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return a[:r], pivots


def rank(M) -> int:
    if not M or not M[0]:
        return 0
    return len(rref(M)[1])


def nullspace(M, ncols: int | None = None) -> list[tuple]:
    """Basis of the rational right kernel of M."""
    nc = ncols if ncols is not None else (len(M[0]) if M else 0)
    if not M:
        return [tuple(Fraction(int(i == j)) for i in range(nc)) for j in range(nc)]
    R, piv = rref(M)
    free = [c for c in range(nc) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * nc
        v[f] = Fraction(1)
        for row, p in zip(R, piv):
            v[p] = -row[f]
        basis.append(tuple(v))
    return basis


def inverse(M) -> tuple:
    n = len(M)
    aug = [list(map(Fraction, r)) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M)]
    R, piv = rref(aug)
    if piv[:n] != list(range(n)) or len(R) < n:
        raise LatticeError("singular matrix")
    return tuple(tuple(r[n:]) for r in R)


def solve_rational(M, b) -> tuple | None:
    """Some rational x with M x = b, or None."""
    nc = len(M[0])
    aug = [list(r) + [bi] for r, bi in zip(M, b)]
    R, piv = rref(aug)
    if nc in piv:
        return None
    x = [Fraction(0)] * nc
    for row, p in zip(R, piv):
        x[p] = row[nc]
    return tuple(x)


def primitive(v) -> tuple:
    """Scale a rational vector to a primitive integer vector (same direction)."""
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    w = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in w:
        g = gcd(g, x)
    return tuple(x // g for x in w) if g else tuple(w)


# ---------------------------------------------------------------------------
# normal forms


def column_hnf(M):
    """Column-style Hermite normal form.

    Returns ``(H, V, pivots)`` with ``M V = H``, ``V`` unimodular and ``H`` in column
    echelon form: pivots positive, entries to the left of a pivot reduced into
    ``[0, pivot)``, zero columns last.
    """
    M = as_matrix(M)
    nr, nc = shape(M)
    H = [list(r) for r in M]
    V = [list(r) for r in identity(nc)]

    def colop(i, j, a, b, c, d):
        # col_i, col_j <- a col_i + b col_j, c col_i + d col_j
        for X in (H, V):
            for row in X:
                x, y = row[i], row[j]
                row[i], row[j] = a * x + b * y, c * x + d * y

    def swap(i, j):
        for X in (H, V):
            for row in X:
                row[i], row[j] = row[j], row[i]

    def neg(i):
        for X in (H, V):
            for row in X:
                row[i] = -row[i]

    piv_rows = []
    c = 0
    for r in range(nr):
        if c >= nc:
            break
        for j in range(c + 1, nc):
            if H[r][j] == 0:
                continue
            a, b = H[r][c], H[r][j]
            g, s, t = _xgcd(a, b)
            # [a b] * [[s, -b/g], [t, a/g]] = [g 0]
            colop(c, j, s, t, -b // g, a // g)
        if H[r][c] == 0:
            continue
        if H[r][c] < 0:
            neg(c)
        p = H[r][c]
        for j in range(c):
            q = H[r][j] // p
            if q:
                colop(j, c, 1, -q, 0, 1)
        piv_rows.append(r)
        c += 1
    return as_matrix(H), as_matrix(V), piv_rows


def _xgcd(a: int, b: int):
    if a and b % a == 0:
        return abs(a), (1 if a > 0 else -1), 0
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def snf(M):
    """Smith normal form with transforms: ``(U, S, V)`` with ``U M V = S``."""
    M = as_matrix(M)
    nr, nc = shape(M)
    S = [list(r) for r in M]
    U = [list(r) for r in identity(nr)]
    V = [list(r) for r in identity(nc)]

    def rowop(i, j, a, b, c, d):
        for X in (S, U):
            ri, rj = X[i], X[j]
            X[i] = [a * x + b * y for x, y in zip(ri, rj)]
            X[j] = [c * x + d * y for x, y in zip(ri, rj)]

    def colop(i, j, a, b, c, d):
        for X in (S, V):
            for row in X:
                x, y = row[i], row[j]
                row[i], row[j] = a * x + b * y, c * x + d * y

    t = 0
    while t < min(nr, nc):
        nz = [(abs(S[i][j]), i, j) for i in range(t, nr) for j in range(t, nc) if S[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        if i != t:
            rowop(t, i, 0, 1, 1, 0)
        if j != t:
            colop(t, j, 0, 1, 1, 0)
        done = False
        while not done:
            done = True
            for i in range(t + 1, nr):
                if S[i][t]:
                    a, b = S[t][t], S[i][t]
                    g, s, u = _xgcd(a, b)
                    rowop(t, i, s, u, -b // g, a // g)
                    done = False
            for j in range(t + 1, nc):
                if S[t][j]:
                    a, b = S[t][t], S[t][j]
                    g, s, u = _xgcd(a, b)
                    colop(t, j, s, u, -b // g, a // g)
                    done = False
            if done:
                p = S[t][t]
                bad = next(((i, j) for i in range(t + 1, nr) for j in range(t + 1, nc) if S[i][j] % p), None)
                if bad is not None:
                    rowop(t, bad[0], 1, 1, 0, 1)
                    done = False
        if S[t][t] < 0:
            for X in (S, U):
                X[t] = [-x for x in X[t]]
        t += 1
    return as_matrix(U), as_matrix(S), as_matrix(V)


def normal_forms(M) -> dict:
    M = as_matrix(M)
    if not M or is_zero(M):
        raise LatticeError("degenerate input")
    H, _, _ = column_hnf(M)
    return {"hnf": H, "snf": snf(M)}


def elementary_divisors(M) -> tuple:
    _, S, _ = snf(M)
    return tuple(S[i][i] for i in range(min(shape(M))) if S[i][i] != 0)


# ---------------------------------------------------------------------------
# lattices


def kernel_basis(M) -> tuple:
    """Columns form a Z-basis of ker_Z(M) (automatically saturated)."""
    M = as_matrix(M)
    nc = len(M[0])
    H, V, piv = column_hnf(M)
    cols = [tuple(V[i][j] for i in range(nc)) for j in range(len(piv), nc)]
    return from_columns(cols, nc)


def lattice_basis(M) -> tuple:
    """Columns form a Z-basis of the lattice spanned by the columns of M."""
    H, _, piv = column_hnf(M)
    return submatrix(H, None, range(len(piv)))


def in_lattice(M, x) -> tuple | None:
    """Integer coordinates of x in the column lattice of M, or None."""
    nr = len(x)
    if not M or not M[0]:
        return () if all(v == 0 for v in x) else None
    H, V, piv = column_hnf(M)
    k = len(piv)
    y = []
    rem = [Fraction(v) for v in x]
    for c, r in enumerate(piv):
        q = rem[r] / H[r][c]
        if q.denominator != 1:
            return None
        q = int(q)
        y.append(q)
        for i in range(nr):
            rem[i] -= q * H[i][c]
    if any(v != 0 for v in rem):
        return None
    full = [0] * len(M[0])
    y = y + [0] * (len(M[0]) - k)
    for i in range(len(M[0])):
        full[i] = sum(V[i][j] * y[j] for j in range(len(y)))
    return tuple(full)


def left_kernel_basis(M) -> tuple:
    """Rows form a Z-basis of the saturated lattice {r : r M = 0}."""
    K = kernel_basis(transpose(M))
    return transpose(K) if K and K[0] else ()


def saturate(L, ambient: int | None = None) -> tuple:
    """Columns spanning (Q L) ∩ Z^ambient."""
    L = as_matrix(L)
    n = ambient if ambient is not None else len(L)
    if not L or not L[0] or is_zero(L):
        return tuple(() for _ in range(n))
    R = left_kernel_basis(L)
    if not R:
        return identity(n)
    return lattice_basis(kernel_basis(R))


def same_lattice(L, M) -> bool:
    Lc, Mc = columns(lattice_basis(L)) if L and L[0] else [], columns(lattice_basis(M)) if M and M[0] else []
    if len(Lc) != len(Mc):
        return False
    return all(in_lattice(M, v) is not None for v in Lc) and all(in_lattice(L, v) is not None for v in Mc)


def saturate_and_compare(L, M) -> dict:
    L, M = as_matrix(L), as_matrix(M)
    if len(L) != len(M):
        raise LatticeError("dimension mismatch")
    n = len(L)
    sL, sM = saturate(L, n), saturate(M, n)
    return {"satL": sL, "equal": same_lattice(sL, sM)}


def unimodular_completion(A) -> tuple:
    """Square unimodular matrix whose top rows are A (requires ZA = Z^d).

    Built from the column Hermite transform: ``A V = [H | 0]`` with H
    unimodular, so the bottom rows are the last rows of ``V^{-1}``.
    """
    A = as_matrix(A)
    d, n = shape(A)
    H, V, piv = column_hnf(A)
    if len(piv) != d or any(H[r][j] != 1 for j, r in enumerate(piv)):
        raise LatticeError("lattice not full")
    Vinv = inverse(V)
    bottom = tuple(tuple(int(x) for x in Vinv[i]) for i in range(d, n))
    return A + bottom


# ---------------------------------------------------------------------------
# Fourier-Motzkin feasibility


def _normalize_ineq(a, b):
    den = 1
    for x in list(a) + [b]:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    a = [Fraction(x) * den for x in a]
    b = Fraction(b) * den
    g = 0
    for x in a:
        g = gcd(g, int(x))
    if g == 0:
        return tuple(Fraction(0) for _ in a), b
    return tuple(x / g for x in a), b / g


def fm_solve(ineqs: Iterable, nvars: int) -> tuple | None:
    """Find rational x with a·x >= b for every (a, b), or return None."""
    system = {_normalize_ineq(a, b) for a, b in ineqs}
    stages = []
    for k in range(nvars - 1, -1, -1):
        stages.append(system)
        pos = [(a, b) for a, b in system if a[k] > 0]
        neg = [(a, b) for a, b in system if a[k] < 0]
        nxt = {(a, b) for a, b in system if a[k] == 0}
        for ap, bp in pos:
            for an, bn in neg:
                al, ga = ap[k], -an[k]
                a = tuple(ga * x + al * y for x, y in zip(ap, an))
                nxt.add(_normalize_ineq(a, ga * bp + al * bn))
        system = nxt
    if any(b > 0 for a, b in system):
        return None
    x = [Fraction(0)] * nvars
    for k, sysk in zip(range(nvars), reversed(stages)):
        lo = hi = None
        for a, b in sysk:
            if a[k] == 0:
                continue
            rest = sum(a[i] * x[i] for i in range(k))
            bound = (b - rest) / a[k]
            if a[k] > 0:
                lo = bound if lo is None else max(lo, bound)
            else:
                hi = bound if hi is None else min(hi, bound)
        if lo is not None:
            val = Fraction(-((-lo.numerator) // lo.denominator))
            if hi is not None and val > hi:
                val = lo
        elif hi is not None:
            val = Fraction(hi.numerator // hi.denominator)
        else:
            val = Fraction(0)
        x[k] = val
    return tuple(x)


def strict_functional(A, zero_cols: Sequence[int]) -> tuple | None:
    """Rational φ with φ·a_i = 0 on zero_cols and φ·a_i > 0 elsewhere."""
    d, n = shape(A)
    cols = columns(A)
    zs = set(zero_cols)
    eq = [cols[i] for i in zs]
    N = nullspace(eq, d) if eq else [tuple(Fraction(int(i == j)) for i in range(d)) for j in range(d)]
    rest = [i for i in range(n) if i not in zs]
    if not rest:
        return tuple(Fraction(0) for _ in range(d))
    if not N:
        return None
    ineqs = [(tuple(sum(Nv[r] * cols[i][r] for r in range(d)) for Nv in N), 1) for i in rest]
    t = fm_solve(ineqs, len(N))
    if t is None:
        return None
    return tuple(sum(t[j] * N[j][r] for j in range(len(N))) for r in range(d))


def is_pointed(A) -> bool:
    A = as_matrix(A)
    if not A or not A[0]:
        return True
    return strict_functional(A, ()) is not None


# ---------------------------------------------------------------------------
# Gale duality


@dataclass(frozen=True)
class GaleContext:
    A: tuple
    Atilde: tuple
    Aperp: tuple
    Ctilde: tuple
    Cperp: tuple
    C: tuple
    B: tuple
    K: tuple
    varkappa: tuple
    epsC: tuple
    latticeIndex: int
    snfK: tuple  # (U, S, V) with U K V = S

    @property
    def d(self) -> int:
        return len(self.A)

    @property
    def n(self) -> int:
        return len(self.A[0])

    @property
    def m(self) -> int:
        return self.n - self.d


def build_gale_context(A, B=None, Atilde=None, require_pointed: bool = True) -> GaleContext:
    A = as_matrix(A)
    d, n = shape(A)
    if d == 0 or n == 0:
        raise LatticeError("degenerate input")
    if rank(A) != d:
        raise LatticeError("matrix not of full row rank")
    if any(x != 1 for x in elementary_divisors(A)) or len(elementary_divisors(A)) != d:
        raise LatticeError("lattice not full")
    if require_pointed and not is_pointed(A):
        raise LatticeError("matrix not pointed")
    if Atilde is None:
        At = unimodular_completion(A)
    else:
        At = as_matrix(Atilde)
        if shape(At) != (n, n) or At[:d] != A or abs(det(At)) != 1:
            raise LatticeError("Atilde must be unimodular with A as its top rows")
    Ct_q = inverse(At)
    Ct = tuple(tuple(int(x) for x in r) for r in Ct_q)
    m = n - d
    Cperp = submatrix(Ct, None, range(d))
    C = submatrix(Ct, None, range(d, n))
    Aperp = At[d:]
    if B is None:
        B = C
    B = as_matrix(B)
    if shape(B) != (n, m):
        raise LatticeError("not a Gale dual")
    if not is_zero(matmul(A, B)):
        raise LatticeError("not a Gale dual")
    if rank(B) != m:
        raise LatticeError("not a Gale dual")
    K = matmul(Aperp, B)
    if matmul(C, K) != B:
        raise LatticeError("not a Gale dual")
    U, S, V = snf(K)
    kap = tuple(S[i][i] for i in range(m))
    eps = tuple(sum(r) for r in C)
    return GaleContext(A, At, Aperp, Ct, Cperp, C, B, K, kap, eps, abs(int(det(K))), (U, S, V))


def solve_parameter(A, beta, mode: str = "any") -> tuple:
    """κ with Aκ = β; in mode ``annihilating_C`` κ also lies in the row span of A."""
    A = as_matrix(A)
    d, n = shape(A)
    beta = tuple(Fraction(b) for b in beta)
    if mode == "annihilating_C":
        AAt = matmul(A, transpose(A))
        y = matvec(inverse(AAt), beta)
        return tuple(sum(y[i] * A[i][j] for i in range(d)) for j in range(n))
    if mode != "any":
        raise ValueError(f"unknown mode {mode!r}")
    for sigma in combinations(range(n), d):
        As = submatrix(A, None, sigma)
        if det(As) != 0:
            xs = matvec(inverse(As), beta)
            k = [Fraction(0)] * n
            for i, j in enumerate(sigma):
                k[j] = xs[i]
            return tuple(k)
    raise LatticeError("matrix not of full row rank")


def gale_extension(B_gamma, A) -> tuple:
    """A[γ]: A on top, completed to a basis of the left annihilator of B_γ."""
    A, Bg = as_matrix(A), as_matrix(B_gamma)
    n = len(A[0])
    if Bg and Bg[0] and rank(Bg) != len(Bg[0]):
        raise LatticeError("B_gamma is rank deficient")
    if not Bg or not Bg[0]:
        S = identity(n)
    else:
        S = left_kernel_basis(Bg)
    if Bg and Bg[0] and not is_zero(matmul(A, Bg)):
        raise LatticeError("not a Gale dual")
    # coordinates of A's rows in the basis S, then complete them unimodularly
    X = tuple(tuple(int(c) for c in solve_rational(transpose(S), row)) for row in A)
    Xt = unimodular_completion(X)
    return matmul(Xt, S)


# ---------------------------------------------------------------------------
# faces and volumes


@dataclass(frozen=True)
class Face:
    columnIndices: frozenset
    functional: tuple


def faces(A) -> list[Face]:
    A = as_matrix(A)
    d, n = shape(A)
    if not is_pointed(A):
        raise LatticeError("matrix not pointed")
    out = []
    for k in range(n + 1):
        for G in combinations(range(n), k):
            phi = strict_functional(A, G)
            if phi is not None:
                out.append(Face(frozenset(G), phi))
    return out


def _affine_coords(points):
    """Express points in coordinates of their affine hull (origin = points[0])."""
    p0 = points[0]
    diffs = [tuple(Fraction(a - b) for a, b in zip(p, p0)) for p in points]
    R, piv = rref(diffs) if diffs else ([], [])
    basis = R  # rows spanning the difference space
    k = len(basis)
    if k == 0:
        return [()] * len(points), 0
    # coordinates wrt basis rows: solve basis^T c = diff
    Bt = transpose(basis)
    coords = [solve_rational(Bt, dv) for dv in diffs]
    return coords, k


def _facets(coords, k):
    """Facets of conv(coords) in R^k as frozensets of point indices."""
    found = set()
    npts = len(coords)
    for sub in combinations(range(npts), k):
        p0 = coords[sub[0]]
        diffs = [tuple(a - b for a, b in zip(coords[i], p0)) for i in sub[1:]]
        if k > 1 and rank(diffs) != k - 1:
            continue
        normal = nullspace(diffs, k) if diffs else [tuple(Fraction(1) for _ in range(k))] if k == 1 else []
        if len(normal) != 1:
            continue
        nv = normal[0]
        c = sum(a * b for a, b in zip(nv, p0))
        vals = [sum(a * b for a, b in zip(nv, q)) - c for q in coords]
        if all(v >= 0 for v in vals) or all(v <= 0 for v in vals):
            if all(v == 0 for v in vals):
                continue
            found.add(frozenset(i for i, v in enumerate(vals) if v == 0))
    return found


def triangulate(points, apex_order: str = "first") -> list[tuple]:
    """Pulling triangulation of conv(points); returns simplices as index tuples."""
    idx = list(range(len(points)))
    return [tuple(sorted(s)) for s in _pull(points, idx, apex_order)]


def _pull(points, idx, apex_order):
    pts = [points[i] for i in idx]
    coords, k = _affine_coords(pts)
    if len(idx) == k + 1:
        return [tuple(idx)]
    apex_local = 0 if apex_order == "first" else len(idx) - 1
    out = []
    for F in sorted(_facets(coords, k), key=sorted):
        if apex_local in F:
            continue
        sub = [idx[i] for i in sorted(F)]
        for s in _pull(points, sub, apex_order):
            out.append(s + (idx[apex_local],))
    return out


def _lattice_coordinates(A):
    """Columns of A expressed in a basis of the lattice ZA."""
    Hb = lattice_basis(A)
    return [in_lattice_exact(Hb, c) for c in columns(A)], len(Hb[0]) if Hb and Hb[0] else 0


def in_lattice_exact(H, x):
    y = in_lattice(H, x)
    # H has independent columns, so the coordinates are unique
    return y


def normalized_volume(A, apex_order: str = "first") -> int:
    """Normalized volume of conv(0, A) with respect to the lattice ZA."""
    A = as_matrix(A)
    if not A or not A[0] or is_zero(A):
        return 1
    pts, r = _lattice_coordinates(A)
    origin = tuple(0 for _ in range(r))
    allpts = [origin] + [p for p in dict.fromkeys(pts)]
    vol = 0
    for s in triangulate(allpts, apex_order):
        base = allpts[s[0]]
        M = [tuple(a - b for a, b in zip(allpts[i], base)) for i in s[1:]]
        vol += abs(det(M))
    return int(vol)


def faces_and_volume(A, sigma: Sequence[int] | None = None) -> dict:
    A = as_matrix(A)
    As = A if sigma is None else submatrix(A, None, sorted(sigma))
    if As and As[0] and not is_pointed(As):
        raise LatticeError("matrix not pointed")
    return {"faces": faces(As) if As and As[0] else [Face(frozenset(), tuple(0 for _ in A))],
            "vol": normalized_volume(As)}
