"""Torus invariantization: delta, delta-bar, psi and explicit presentations.

A fractional module element is a finite sum ``sum_k P_k * z^{r_k}`` with the
fractional monomial basis written on the right and ``P_k`` in the Laurent Weyl
algebra of the z-variables.  The relations of a presentation are closed under
left multiplication, so this is a left module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Mapping, Sequence

from .lattice import (column_hnf, det, in_lattice, inverse, matvec, solve_rational,
                      submatrix)
from .systems import SystemSpec, horn_generators, zring
from .weyl import (INHOMOGENEOUS, ThetaPoly, WeylError, WeylOp, WeylRing, a_degree,
                   from_theta_form, theta_form)


def to_laurent(p: WeylOp) -> WeylOp:
    if p.ring.laurent:
        return p
    return WeylOp(WeylRing(p.ring.n, True, p.ring.kind), p.items())


def _images(rows, shifts) -> list[ThetaPoly]:
    return [ThetaPoly.linear(tuple(Fraction(x) for x in r), Fraction(s)) for r, s in zip(rows, shifts)]


def _check_invariant(p: WeylOp, ctx):
    deg = a_degree(p, ctx.A)
    if deg is INHOMOGENEOUS or any(deg):
        raise WeylError("not torus invariant")


def delta(ctx, kappa, p: WeylOp) -> WeylOp:
    """x^{Bv} theta^u -> z^v prod (B_i.eta + kappa_i)^{u_i}."""
    _check_invariant(p, ctx)
    m = ctx.m
    R = zring(m)
    imgs = _images(ctx.B, kappa)
    out = WeylOp.zero(R)
    for w, poly in theta_form(p).items():
        v = in_lattice(ctx.B, w)
        if v is None:
            raise WeylError("exponent outside the lattice spanned by B; use delta_bar")
        out = out + WeylOp.monomial(R, v, [0] * m) * poly.substitute(imgs).to_weyl(R)
    return out


def delta_C(ctx, kappa, p: WeylOp) -> list:
    """delta_{C, kappa + eps_C}(p) in y = x^C coordinates: [(s, poly in lambda)]."""
    _check_invariant(p, ctx)
    shifts = [Fraction(k) + e for k, e in zip(kappa, ctx.epsC)]
    imgs = _images(ctx.C, shifts)
    out = []
    for w, poly in theta_form(p).items():
        s = in_lattice(ctx.C, w)
        if s is None:
            raise WeylError("not torus invariant")
        out.append((s, poly.substitute(imgs)))
    return sorted(out, key=lambda t: t[0])


def formal_delta_B(ctx, kappa, p: WeylOp) -> list:
    """delta_{B,kappa} with rational z-exponents: [(r, poly in eta)] with B r = x-exponent."""
    _check_invariant(p, ctx)
    imgs = _images(ctx.B, kappa)
    out: dict = {}
    for w, poly in theta_form(p).items():
        r = solve_rational(ctx.B, w)
        if r is None:
            raise WeylError("not torus invariant")
        out[r] = out.get(r, ThetaPoly(ctx.m)) + poly.substitute(imgs)
    return sorted((r, f) for r, f in out.items() if f)


# ---------------------------------------------------------------------------
# residues of fractional exponents


class Residues:
    """Bookkeeping for K^{-1} Z^m / Z^m via the Smith form of K.

    Classes are keyed by ``U s mod varkappa`` where ``s = K r`` and
    ``U K V = S``.  The representative of the class of the Hermite box vector
    u is ``r_u = -K^{-1} u``, which makes summand u carry the parameter
    kappa + C u.
    """

    def __init__(self, ctx):
        self.ctx = ctx
        U, S, V = ctx.snfK
        self.U = U
        self.kap = ctx.varkappa
        self.Kinv = inverse(ctx.K)
        H, _, _ = column_hnf(ctx.K)
        m = ctx.m
        diag = [H[i][i] for i in range(m)]
        self.box = sorted(product(*[range(h) for h in diag]))
        self.reps: dict = {}
        self.box_of: dict = {}
        for u in self.box:
            r = tuple(-x for x in matvec(self.Kinv, u))
            k = self.key(r)
            if k in self.reps:
                raise AssertionError("Hermite box representatives collide")
            self.reps[k] = r
            self.box_of[k] = u
        if len(self.reps) != ctx.latticeIndex:
            raise AssertionError("residue count differs from the lattice index")

    def key(self, r) -> tuple:
        s = matvec(self.ctx.K, r)
        if any(Fraction(x).denominator != 1 for x in s):
            raise WeylError("exponent is not in K^{-1} Z^m")
        Us = matvec(self.U, [int(x) for x in s])
        return tuple(int(x) % k for x, k in zip(Us, self.kap))

    def split(self, r) -> tuple:
        """(key, c) with r = c + r_key and c integral."""
        k = self.key(r)
        c = tuple(Fraction(a) - b for a, b in zip(r, self.reps[k]))
        assert all(x.denominator == 1 for x in c)
        return k, tuple(int(x) for x in c)

    def frac_rep(self, k) -> tuple:
        """Representative of class k with every entry in [0, 1)."""
        return tuple(x - (x.numerator // x.denominator) for x in map(Fraction, self.reps[k]))

    def ordered_keys(self) -> list:
        return sorted(self.reps, key=lambda k: self.box_of[k])


_RES_CACHE: dict = {}


def residues(ctx) -> Residues:
    key = id(ctx)
    hit = _RES_CACHE.get(key)
    if hit is None or hit[0] is not ctx:
        hit = (ctx, Residues(ctx))
        _RES_CACHE[key] = hit
    return hit[1]


def _conjugate_shift(Q: WeylOp, r) -> WeylOp:
    """z^r Q z^{-r}: eta -> eta - r in the theta form of Q."""
    out = {}
    for a, g in theta_form(Q).items():
        out[a] = g.shift([-Fraction(x) for x in r])
    return from_theta_form(Q.ring, out)


@dataclass(frozen=True)
class FracModuleElt:
    ctx: object
    components: tuple  # sorted ((key, WeylOp), ...), zero parts omitted

    @classmethod
    def build(cls, ctx, comps: Mapping):
        return cls(ctx, tuple(sorted((k, v) for k, v in comps.items() if v)))

    @property
    def comp(self) -> dict:
        return dict(self.components)

    def __bool__(self):
        return bool(self.components)

    def __eq__(self, other):
        return isinstance(other, FracModuleElt) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __add__(self, other):
        acc = self.comp
        for k, v in other.components:
            acc[k] = acc[k] + v if k in acc else v
        return FracModuleElt.build(self.ctx, acc)

    def __neg__(self):
        return FracModuleElt.build(self.ctx, {k: -v for k, v in self.components})

    def __sub__(self, other):
        return self + (-other)

    def left_mul(self, P: WeylOp) -> "FracModuleElt":
        return FracModuleElt.build(self.ctx, {k: P * v for k, v in self.components})

    def left_mul_monomial(self, r) -> "FracModuleElt":
        """z^r * self for a rational exponent r in K^{-1} Z^m."""
        res = residues(self.ctx)
        R = zring(self.ctx.m)
        acc: dict = {}
        for k, Q in self.components:
            total = tuple(Fraction(a) + b for a, b in zip(r, res.reps[k]))
            k2, c = res.split(total)
            term = _conjugate_shift(Q, r) * WeylOp.monomial(R, c, [0] * len(c))
            acc[k2] = acc[k2] + term if k2 in acc else term
        return FracModuleElt.build(self.ctx, acc)

    def display(self) -> list:
        """[(r, g)] meaning sum z^r g(eta), monomials on the left, rational r."""
        res = residues(self.ctx)
        out: dict = {}
        for k, Q in self.components:
            rk = res.reps[k]
            for a, g in theta_form(Q).items():
                r = tuple(Fraction(x) + y for x, y in zip(a, rk))
                out[r] = out.get(r, ThetaPoly(self.ctx.m)) + g.shift(rk)
        return sorted((r, g) for r, g in out.items() if g)

    def in_basis(self, reps: Mapping) -> dict:
        """Components relative to other class representatives {key: r}."""
        res = residues(self.ctx)
        R = zring(self.ctx.m)
        out = {}
        for k, Q in self.components:
            c = tuple(Fraction(a) - Fraction(b) for a, b in zip(res.reps[k], reps[k]))
            assert all(x.denominator == 1 for x in c)
            out[k] = Q * WeylOp.monomial(R, [int(x) for x in c], [0] * len(c))
        return out


def from_display(ctx, terms) -> FracModuleElt:
    """Inverse of FracModuleElt.display."""
    res = residues(ctx)
    R = zring(ctx.m)
    acc: dict = {}
    for r, g in terms:
        k, c = res.split(r)
        Q = WeylOp.monomial(R, c, [0] * len(c)) * g.shift([-x for x in res.reps[k]]).to_weyl(R)
        acc[k] = acc[k] + Q if k in acc else Q
    return FracModuleElt.build(ctx, acc)


def delta_bar(ctx, kappa, p: WeylOp) -> FracModuleElt:
    """delta_{C, kappa+eps_C} followed by y = z^{K^{-1}}, lambda = K eta - 1."""
    m = ctx.m
    lam = [ThetaPoly.linear(tuple(Fraction(x) for x in ctx.K[i]), -1) for i in range(m)]
    terms = []
    for s, poly in delta_C(ctx, kappa, p):
        r = matvec(residues(ctx).Kinv, s)
        terms.append((tuple(r), poly.substitute(lam)))
    merged: dict = {}
    for r, g in terms:
        merged[r] = merged.get(r, ThetaPoly(m)) + g
    return from_display(ctx, [(r, g) for r, g in merged.items() if g])


# ---------------------------------------------------------------------------
# psi


def psi_rows(ctx) -> tuple:
    B = ctx.B
    for rows in combinations(range(ctx.n), ctx.m):
        if det(submatrix(B, rows)) != 0:
            return rows
    raise WeylError("no invertible m x m block of rows in B")


def psi(ctx, kappa, q: WeylOp) -> WeylOp:
    """z^u -> x^{Bu}, eta_i -> sum_j (N^{-1})_{ij} (theta_{r_j} - kappa_{r_j})."""
    rows = psi_rows(ctx)
    Ninv = inverse(submatrix(ctx.B, rows))
    n = ctx.n
    R = WeylRing(n, True, "x")
    thetas = []
    for i in range(ctx.m):
        coeffs = [Fraction(0)] * n
        const = Fraction(0)
        for j, r in enumerate(rows):
            coeffs[r] += Ninv[i][j]
            const -= Ninv[i][j] * Fraction(kappa[r])
        thetas.append(ThetaPoly.linear(coeffs, const))
    out = WeylOp.zero(R)
    for a, g in theta_form(q).items():
        w = matvec(ctx.B, a)
        out = out + WeylOp.monomial(R, w, [0] * n) * g.substitute(thetas).to_weyl(R)
    return out


# ---------------------------------------------------------------------------
# presentations


def clearing_monomial(g: WeylOp) -> tuple:
    """Exponent mu with x^mu g torus invariant, read off the leading term.

    For a binomial in the derivatives the leading term is the one with
    coefficient +1; otherwise it is the term whose derivative exponent is
    largest in degree reverse lexicographic order.
    """
    from .systems import grevlex_key

    items = list(g.items())
    binom = len(items) == 2 and all(not any(a) for (a, b), _ in items) and sorted(c for _, c in items) == [-1, 1]
    if binom:
        (a, b), _ = next(t for t in items if t[1] == 1)
    else:
        (a, b), _ = max(items, key=lambda t: (grevlex_key(t[0][1]), t[0][0]))
    return tuple(y - x for x, y in zip(a, b))


@dataclass(frozen=True)
class Summand:
    box: tuple
    key: tuple
    shift: tuple
    basis: tuple
    horn: SystemSpec
    row_ops: tuple  # component operators of z^{r}*row, one per generator


@dataclass
class PiPresentation:
    system: SystemSpec
    ctx: object
    kappa: tuple
    lifts: list
    rows: list
    dropped: list
    summandCount: int
    decomposed: list | None = None
    residueOrder: list = field(default_factory=list)

    def module_rows(self) -> list:
        """Left D_Z-module generators of the relations: z^f * row for each class.

        The multipliers z^f use the representatives with entries in [0, 1).
        """
        res = residues(self.ctx)
        out = []
        for row in self.rows:
            for k in res.ordered_keys():
                out.append(row.left_mul_monomial(res.frac_rep(k)))
        return out


def pi_presentation(sys: SystemSpec, ctx=None, kappa=None) -> PiPresentation:
    ctx = ctx or sys.ctx
    if ctx is None:
        raise ValueError("a Gale context is required")
    if kappa is None:
        kappa = sys.kappa
    if kappa is None:
        from .lattice import solve_parameter
        kappa = solve_parameter(ctx.A, sys.beta, "any")
    kappa = tuple(Fraction(k) for k in kappa)
    if sys.beta is not None and tuple(matvec(ctx.A, kappa)) != tuple(Fraction(b) for b in sys.beta):
        raise ValueError("kappa does not satisfy A kappa = beta")
    R = WeylRing(ctx.n, True, "x")
    lifts, rows, dropped = [], [], []
    for idx, g in enumerate(sys.generators):
        if a_degree(g, ctx.A) is INHOMOGENEOUS:
            raise WeylError("inhomogeneous generator")
        mu = clearing_monomial(g)
        lift = WeylOp.monomial(R, mu, [0] * ctx.n) * to_laurent(g)
        row = delta_bar(ctx, kappa, lift)
        lifts.append((mu, lift))
        if row:
            rows.append(row)
        else:
            dropped.append(idx)
    res = residues(ctx)
    pres = PiPresentation(sys, ctx, kappa, lifts, rows, dropped, ctx.latticeIndex,
                          residueOrder=[(k, res.box_of[k], res.reps[k]) for k in res.ordered_keys()])
    if sys.kind == "LatticeBasisBinomial":
        pres.decomposed = _decompose(ctx, kappa, rows)
    return pres


def _decompose(ctx, kappa, rows) -> list:
    res = residues(ctx)
    out = []
    for k in res.ordered_keys():
        u = res.box_of[k]
        shift = tuple(sum(ctx.C[i][j] * u[j] for j in range(ctx.m)) for i in range(ctx.n))
        kap = tuple(a + b for a, b in zip(kappa, shift))
        horn = horn_generators(ctx.B, kap)
        ops = []
        for row in rows:
            moved = row.left_mul_monomial(res.reps[k])
            comp = moved.comp
            if set(comp) - {k}:
                raise AssertionError("rows do not block-diagonalize")
            ops.append(comp.get(k, WeylOp.zero(zring(ctx.m))))
        out.append(Summand(u, k, shift, res.reps[k], horn, tuple(ops)))
    return out


def shorn_decomposition(ctx, kappa) -> list:
    from .systems import lattice_basis_system

    pres = pi_presentation(lattice_basis_system(ctx, kappa), ctx, kappa)
    return pres.decomposed
