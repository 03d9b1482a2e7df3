"""Normal-ordered Weyl algebra arithmetic with exact rational coefficients.

An operator is a finite sum of terms ``c * x^a * d^b`` with every x to the
left of every derivative.  On a Laurent ring the x-exponents may be negative.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb
from typing import Iterable, Mapping, Sequence


class WeylError(ValueError):
    pass


@dataclass(frozen=True)
class WeylRing:
    n: int
    laurent: bool = True
    kind: str = "x"  # "x" or "z": only affects variable names

    def __post_init__(self):
        if self.n < 1:
            raise WeylError("a Weyl ring needs at least one variable")

    @property
    def names(self) -> tuple[str, str, str]:
        return ("x", "dx", "t") if self.kind == "x" else ("z", "dz", "e")


def falling(a, k: int):
    """a (a-1) ... (a-k+1)."""
    out = 1
    for i in range(k):
        out *= a - i
    return out


class WeylOp:
    """Immutable normal-ordered operator; ``terms`` maps (xexp, dexp) to a Fraction."""

    __slots__ = ("ring", "_terms", "_key")

    def __init__(self, ring: WeylRing, terms: Mapping | Iterable = ()):
        acc: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for (a, b), c in items:
            a, b = tuple(int(v) for v in a), tuple(int(v) for v in b)
            if len(a) != ring.n or len(b) != ring.n:
                raise WeylError("exponent length does not match ring")
            if any(v < 0 for v in b):
                raise WeylError("negative derivative exponent")
            if not ring.laurent and any(v < 0 for v in a):
                raise WeylError("negative x-exponent in a polynomial Weyl algebra")
            acc[(a, b)] = acc.get((a, b), 0) + Fraction(c)
        self.ring = ring
        self._terms = {k: v for k, v in sorted(acc.items()) if v != 0}
        self._key = (ring, tuple(self._terms.items()))

    # construction -----------------------------------------------------------

    @classmethod
    def const(cls, ring, c=1):
        z = (0,) * ring.n
        return cls(ring, {(z, z): c})

    @classmethod
    def monomial(cls, ring, a, b, c=1):
        return cls(ring, {(tuple(a), tuple(b)): c})

    @classmethod
    def var(cls, ring, i, power=1):
        a = [0] * ring.n
        a[i] = power
        return cls.monomial(ring, a, [0] * ring.n)

    @classmethod
    def der(cls, ring, i, power=1):
        b = [0] * ring.n
        b[i] = power
        return cls.monomial(ring, [0] * ring.n, b)

    @classmethod
    def theta(cls, ring, i):
        e = [0] * ring.n
        e[i] = 1
        return cls.monomial(ring, e, e)

    @classmethod
    def zero(cls, ring):
        return cls(ring, {})

    # container protocol -----------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __iter__(self):
        return iter(self._terms.items())

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self == WeylOp.const(self.ring, other)
        return isinstance(other, WeylOp) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    # arithmetic -------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, WeylOp):
            if other.ring != self.ring:
                raise WeylError("ring mismatch")
            return other
        if isinstance(other, (int, Fraction)):
            return WeylOp.const(self.ring, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self._terms)
        for k, v in other._terms.items():
            acc[k] = acc.get(k, 0) + v
        return WeylOp(self.ring, acc)

    __radd__ = __add__

    def __neg__(self):
        return WeylOp(self.ring, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "WeylOp":
        return WeylOp(self.ring, {k: v * c for k, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        out = WeylOp.const(self.ring, 1)
        for _ in range(k):
            out = out * self
        return out

    # display ----------------------------------------------------------------

    def __str__(self):
        return format_op(self)

    def __repr__(self):
        return f"WeylOp({format_op(self)!r})"


def multiply(p: WeylOp, q: WeylOp) -> WeylOp:
    """Normal-ordered product using d^b x^c = sum_k C(b,k) [c]_k x^(c-k) d^(b-k)."""
    if p.ring != q.ring:
        raise WeylError("ring mismatch")
    n = p.ring.n
    acc: dict = {}
    for (a, b), c1 in p.items():
        for (c, e), c2 in q.items():
            ranges = [range(min(b[i], c[i]) + 1) if (c[i] >= 0 and not p.ring.laurent) else range(b[i] + 1)
                      for i in range(n)]
            for k in product(*ranges):
                coef = c1 * c2
                for i in range(n):
                    if k[i]:
                        coef *= comb(b[i], k[i]) * falling(c[i], k[i])
                        if coef == 0:
                            break
                if coef == 0:
                    continue
                key = (tuple(a[i] + c[i] - k[i] for i in range(n)), tuple(b[i] - k[i] + e[i] for i in range(n)))
                acc[key] = acc.get(key, 0) + coef
    return WeylOp(p.ring, acc)


# ---------------------------------------------------------------------------
# gradings and Euler operators


class _Inhomogeneous:
    def __repr__(self):
        return "INHOMOGENEOUS"


INHOMOGENEOUS = _Inhomogeneous()


def a_degree(p: WeylOp, A):
    """A(u - v) if every term x^u d^v shares it, else INHOMOGENEOUS."""
    degs = {tuple(sum(row[j] * (a[j] - b[j]) for j in range(len(a))) for row in A) for (a, b), _ in p.items()}
    if len(degs) == 1:
        return degs.pop()
    if not degs:
        return tuple(0 for _ in A)
    return INHOMOGENEOUS


def euler_operators(A, beta, ring: WeylRing | None = None) -> list[WeylOp]:
    if not A:
        return []
    n = len(A[0])
    ring = ring or WeylRing(n, laurent=False)
    ops = []
    for row, b in zip(A, beta):
        op = WeylOp.const(ring, -Fraction(b))
        for j, a in enumerate(row):
            if a:
                op = op + WeylOp.theta(ring, j).scale(a)
        ops.append(op)
    return ops


# ---------------------------------------------------------------------------
# commutative polynomials in theta (or eta)


class ThetaPoly:
    """Commutative polynomial in theta_1..theta_n with Fraction coefficients."""

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms: Mapping | Iterable = ()):
        acc: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for e, c in items:
            e = tuple(int(v) for v in e)
            acc[e] = acc.get(e, 0) + Fraction(c)
        self.n = n
        self._terms = {k: v for k, v in sorted(acc.items()) if v != 0}

    @classmethod
    def _make(cls, n, acc: dict) -> "ThetaPoly":
        # trusted input: tuple keys, exact values (int or Fraction)
        obj = cls.__new__(cls)
        obj.n = n
        obj._terms = {k: v for k, v in sorted(acc.items()) if v != 0}
        return obj

    @classmethod
    def const(cls, n, c):
        return cls(n, {(0,) * n: c})

    @classmethod
    def linear(cls, coeffs: Sequence, const=0):
        n = len(coeffs)
        t = {(0,) * n: const}
        for i, c in enumerate(coeffs):
            e = [0] * n
            e[i] = 1
            t[tuple(e)] = c
        return cls(n, t)

    @classmethod
    def falling_factorial(cls, n, exps):
        out = cls.const(n, 1)
        for i, b in enumerate(exps):
            for ell in range(b):
                coeffs = [0] * n
                coeffs[i] = 1
                out = out * cls.linear(coeffs, -ell)
        return out

    def items(self):
        return self._terms.items()

    @property
    def terms(self):
        return dict(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ThetaPoly.const(self.n, other)
        return isinstance(other, ThetaPoly) and self.n == other.n and self._terms == other._terms

    def __hash__(self):
        return hash((self.n, tuple(self._terms.items())))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ThetaPoly.const(self.n, other)
        acc = dict(self._terms)
        for k, v in other._terms.items():
            acc[k] = acc.get(k, 0) + v
        return ThetaPoly._make(self.n, acc)

    __radd__ = __add__

    def __neg__(self):
        return ThetaPoly._make(self.n, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, ThetaPoly) else -Fraction(other))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return ThetaPoly._make(self.n, {k: v * other for k, v in self._terms.items()})
        acc: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(map(int.__add__, e1, e2))
                acc[e] = acc.get(e, 0) + c1 * c2
        return ThetaPoly._make(self.n, acc)

    __rmul__ = __mul__

    def evaluate(self, point: Sequence):
        total = Fraction(0)
        for e, c in self._terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v *= Fraction(x) ** k
            total += v
        return total

    def substitute(self, images: Sequence["ThetaPoly"]) -> "ThetaPoly":
        """Replace theta_i by images[i] (all in a common variable count)."""
        m = images[0].n if images else 0
        powers = [[ThetaPoly.const(m, 1)] for _ in images]

        def power(i, k):
            row = powers[i]
            while len(row) <= k:
                row.append(row[-1] * images[i])
            return row[k]

        acc: dict = {}
        for e, c in self._terms.items():
            t = None
            for i, k in enumerate(e):
                if k:
                    t = power(i, k) if t is None else t * power(i, k)
            if t is None:
                key = (0,) * m
                acc[key] = acc.get(key, 0) + c
                continue
            for key, v in t._terms.items():
                acc[key] = acc.get(key, 0) + c * v
        return ThetaPoly._make(m, acc)

    def shift(self, r: Sequence) -> "ThetaPoly":
        """theta -> theta + r."""
        return self.substitute([ThetaPoly.linear([int(i == j) for j in range(self.n)], r[i]) for i in range(self.n)])

    def to_weyl(self, ring: WeylRing) -> WeylOp:
        acc: dict = {}
        for e, c in self._terms.items():
            # theta^k = sum_j S(k, j) x^j d^j, multiplied out per variable
            parts = [_stirling_row(k) for k in e]
            for js in product(*[list(enumerate(p)) for p in parts]):
                coef = c
                for _, s in js:
                    coef *= s
                if coef:
                    a = tuple(j for j, _ in js)
                    acc[(a, a)] = acc.get((a, a), 0) + coef
        return WeylOp(ring, acc)

    def __repr__(self):
        return f"ThetaPoly({format_theta(self)!r})"


def _stirling_row(k: int) -> list[int]:
    row = [1]
    for i in range(k):
        new = [0] * (len(row) + 1)
        for j, s in enumerate(row):
            new[j] += j * s
            new[j + 1] += s
        row = new
    return row


# ---------------------------------------------------------------------------
# theta forms


def theta_form(p: WeylOp) -> dict:
    """Write p = sum_w x^w poly_w(theta), keyed by the integer vector w = a - b."""
    n = p.ring.n
    out: dict = {}
    for (a, b), c in p.items():
        w = tuple(x - y for x, y in zip(a, b))
        poly = ThetaPoly.falling_factorial(n, b) * c
        out[w] = out.get(w, ThetaPoly(n)) + poly
    return {w: f for w, f in sorted(out.items()) if f}


def from_theta_form(ring: WeylRing, form: Mapping) -> WeylOp:
    # x^w with w < 0 is only an intermediate, so assemble over the Laurent ring
    big = WeylRing(ring.n, True, ring.kind)
    out = WeylOp.zero(big)
    for w, poly in form.items():
        out = out + WeylOp.monomial(big, w, [0] * ring.n) * poly.to_weyl(big)
    return WeylOp(ring, out.items())


def invariant_theta_form(p: WeylOp, ctx, basis: str = "B") -> list:
    """[(v, poly)] with p = sum_v x^{Mv} poly_v(theta), M the chosen basis (B or C)."""
    from .lattice import LatticeError, in_lattice

    deg = a_degree(p, ctx.A)
    if deg is INHOMOGENEOUS or any(deg):
        raise WeylError("not torus invariant")
    M = ctx.B if basis == "B" else ctx.C
    out = []
    for w, poly in theta_form(p).items():
        v = in_lattice(M, w)
        if v is None:
            raise WeylError("outside lattice image")
        out.append((v, poly))
    return sorted(out, key=lambda t: t[0])


# ---------------------------------------------------------------------------
# weights and initial forms


@dataclass(frozen=True)
class WeightVector:
    Lx: tuple
    Ld: tuple

    def __post_init__(self):
        s = {Fraction(a) + Fraction(b) for a, b in zip(self.Lx, self.Ld)}
        if len(s) != 1 or s.pop() < 0:
            raise WeylError("weight vector must satisfy Lx + Ld = c*1 with c >= 0")

    @property
    def c(self):
        return Fraction(self.Lx[0]) + Fraction(self.Ld[0])

    def weight(self, a, b):
        return sum(Fraction(x) * u for x, u in zip(self.Lx, a)) + sum(Fraction(y) * v for y, v in zip(self.Ld, b))


@dataclass(frozen=True)
class CotangentSymbol:
    """Commutative polynomial in x and xi, keyed by (xexp, xiexp)."""

    n: int
    terms: tuple

    def as_dict(self):
        return dict(self.terms)

    def __mul__(self, other):
        acc: dict = {}
        for (a1, b1), c1 in self.terms:
            for (a2, b2), c2 in other.terms:
                k = (tuple(x + y for x, y in zip(a1, a2)), tuple(x + y for x, y in zip(b1, b2)))
                acc[k] = acc.get(k, 0) + c1 * c2
        return CotangentSymbol(self.n, tuple(sorted((k, v) for k, v in acc.items() if v)))


def initial_form(p: WeylOp, L: WeightVector):
    if not p:
        raise WeylError("zero operator has no initial form")
    ws = {k: L.weight(*k) for k, _ in p.items()}
    top = max(ws.values())
    keep = {k: c for k, c in p.items() if ws[k] == top}
    if L.c > 0:
        return CotangentSymbol(p.ring.n, tuple(sorted(keep.items())))
    return WeylOp(p.ring, keep)


# ---------------------------------------------------------------------------
# action on monomials


def apply_to_monomial(p: WeylOp, a: Sequence, coeff=1) -> dict:
    """p applied to coeff * x^a (rational a); returns {exponent: coefficient}."""
    out: dict = {}
    a = tuple(Fraction(v) for v in a)
    for (s, t), c in p.items():
        f = c * Fraction(coeff)
        for ai, ti in zip(a, t):
            f *= falling(ai, ti)
            if f == 0:
                break
        if f == 0:
            continue
        e = tuple(ai - ti + si for ai, ti, si in zip(a, t, s))
        out[e] = out.get(e, 0) + f
    return {e: c for e, c in out.items() if c}


apply_to_series = apply_to_monomial


def apply_to_polynomial(p: WeylOp, poly: Mapping) -> dict:
    out: dict = {}
    for a, c in poly.items():
        for e, v in apply_to_monomial(p, a, c).items():
            out[e] = out.get(e, 0) + v
    return {e: c for e, c in out.items() if c}


# ---------------------------------------------------------------------------
# text format


def _fmt_coef(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_op(p: WeylOp) -> str:
    if not p:
        return "0"
    xs, ds, _ = p.ring.names
    parts = []
    for (a, b), c in p.items():
        fac = []
        for i, e in enumerate(a):
            if e:
                fac.append(f"{xs}{i + 1}" + (f"^{e}" if e != 1 else ""))
        for i, e in enumerate(b):
            if e:
                fac.append(f"{ds}{i + 1}" + (f"^{e}" if e != 1 else ""))
        if not fac:
            parts.append(_fmt_coef(c))
        elif c == 1:
            parts.append("*".join(fac))
        elif c == -1:
            parts.append("-" + "*".join(fac))
        else:
            parts.append(_fmt_coef(c) + "*" + "*".join(fac))
    s = " + ".join(parts)
    return s.replace("+ -", "- ")


def format_theta(t: ThetaPoly, name: str = "t") -> str:
    if not t:
        return "0"
    parts = []
    for e, c in t.items():
        fac = [f"{name}{i + 1}" + (f"^{k}" if k != 1 else "") for i, k in enumerate(e) if k]
        if not fac:
            parts.append(_fmt_coef(c))
        elif c == 1:
            parts.append("*".join(fac))
        elif c == -1:
            parts.append("-" + "*".join(fac))
        else:
            parts.append(_fmt_coef(c) + "*" + "*".join(fac))
    return " + ".join(parts).replace("+ -", "- ")


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<var>(?:dx|dz|x|z|t|e)\d+)(?:\^(?P<exp>-?\d+))?|(?P<op>[-+*()]))")


def parse_op(text: str, ring: WeylRing) -> WeylOp:
    """Parse ``c * x1^a * dx2^b + ...``; factors multiply in the Weyl algebra.

    ``t1`` (or ``e1`` on the z-side) abbreviates x1*dx1.  Parentheses group.
    """
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise WeylError(f"cannot parse operator near {text[pos:pos + 10]!r}")
        pos = m.end()
        if m.group("num"):
            toks.append(("num", Fraction(m.group("num"))))
        elif m.group("var"):
            toks.append(("var", m.group("var"), int(m.group("exp") or 1)))
        else:
            toks.append(("op", m.group("op")))
    toks.append(("end",))
    i = 0

    def peek():
        return toks[i]

    def take():
        nonlocal i
        i += 1
        return toks[i - 1]

    def atom():
        t = take()
        if t[0] == "num":
            return WeylOp.const(ring, t[1])
        if t[0] == "var":
            name, e = t[1], t[2]
            kind = re.match(r"[a-z]+", name).group(0)
            idx = int(name[len(kind):]) - 1
            if not 0 <= idx < ring.n:
                raise WeylError(f"variable {name} out of range")
            if kind in ("x", "z"):
                return WeylOp.var(ring, idx, e)
            if e < 0:
                raise WeylError("negative power of a derivation")
            if kind in ("dx", "dz"):
                return WeylOp.der(ring, idx, e)
            return WeylOp.theta(ring, idx) ** e
        if t == ("op", "("):
            v = expr()
            if take() != ("op", ")"):
                raise WeylError("unbalanced parentheses")
            return v
        if t == ("op", "-"):
            return -atom()
        raise WeylError("unexpected token")

    def term():
        v = atom()
        while True:
            t = peek()
            if t == ("op", "*"):
                take()
                v = v * atom()
            elif t[0] in ("num", "var") or t == ("op", "("):
                v = v * atom()
            else:
                return v

    def expr():
        if peek() == ("op", "-"):
            take()
            v = -term()
        else:
            if peek() == ("op", "+"):
                take()
            v = term()
        while peek() in (("op", "+"), ("op", "-")):
            sign = take()[1]
            t = term()
            v = v + t if sign == "+" else v - t
        return v

    out = expr()
    if peek()[0] != "end":
        raise WeylError("trailing input")
    return out
