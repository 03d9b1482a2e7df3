"""Horn-Kapranov uniformization of reduced A-discriminants."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .lattice import as_matrix, in_lattice, matvec, shape

DEFAULT_SEED = 20240


class HKError(ValueError):
    pass


@dataclass(frozen=True)
class LaurentPoly:
    m: int
    terms: tuple  # sorted ((w, coefficient), ...) with nonzero coefficients

    @classmethod
    def build(cls, m: int, terms: Mapping) -> "LaurentPoly":
        clean = {}
        for w, c in terms.items():
            w = tuple(int(x) for x in w)
            if len(w) != m:
                raise HKError("exponent has the wrong length")
            clean[w] = clean.get(w, 0) + Fraction(c)
        return cls(m, tuple(sorted((w, c) for w, c in clean.items() if c)))

    def as_dict(self) -> dict:
        return dict(self.terms)

    def evaluate(self, z: Sequence) -> Fraction:
        z = [Fraction(x) for x in z]
        total = Fraction(0)
        for w, c in self.terms:
            t = c
            for zi, wi in zip(z, w):
                t *= zi ** wi
            total += t
        return total

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.terms:
            mono = "*".join(f"z{i + 1}" + (f"^{e}" if e != 1 else "") for i, e in enumerate(w) if e)
            parts.append(f"{c}" if not mono else (mono if c == 1 else f"{c}*{mono}"))
        return " + ".join(parts).replace("+ -", "- ")


def hk_parametrize(B, s: Sequence) -> tuple:
    """The point (Bs)^B, one coordinate per column of B."""
    B = as_matrix(B)
    n, m = shape(B)
    s = tuple(Fraction(x) for x in s)
    if len(s) != m:
        raise HKError("s has the wrong length")
    forms = matvec(B, s)
    for i, f in enumerate(forms):
        if f == 0:
            raise HKError(f"row form {i + 1} vanishes at s")
    out = []
    for k in range(m):
        v = Fraction(1)
        for i in range(n):
            v *= forms[i] ** B[i][k]
        out.append(v)
    return tuple(out)


def dehomogenize_discriminant(nablaA: Mapping, B) -> LaurentPoly:
    """Write sum lambda_e x^e as x^{e0} sum lambda_w x^{Bw}; e0 is the lex smallest exponent."""
    B = as_matrix(B)
    n, m = shape(B)
    items = {tuple(int(x) for x in e): Fraction(c) for e, c in nablaA.items() if Fraction(c)}
    if not items:
        return LaurentPoly(m, ())
    e0 = min(items)
    out = {}
    for e, c in items.items():
        if len(e) != n:
            raise HKError("exponent has the wrong length")
        w = in_lattice(B, tuple(a - b for a, b in zip(e, e0)))
        if w is None:
            raise HKError(f"exponent {e} is not on the coset {e0} + ZB")
        out[tuple(w)] = c
    return LaurentPoly.build(m, out)


def sample_points(B, samples: int, seed: int = DEFAULT_SEED, height: int = 9) -> list[tuple]:
    """Seeded small-height rational s avoiding every hyperplane (Bs)_i = 0."""
    B = as_matrix(B)
    n, m = shape(B)
    rng = random.Random(seed)
    pts = []
    while len(pts) < samples:
        s = tuple(Fraction(rng.randint(-height, height), rng.randint(1, height)) for _ in range(m))
        if all(matvec(B, s)):
            pts.append(s)
    return pts


def vanish_check(f: LaurentPoly, B, samples: int, seed: int = DEFAULT_SEED) -> dict:
    if samples < 1:
        raise HKError("samples must be positive")
    values = []
    for s in sample_points(B, samples, seed):
        values.append((s, f.evaluate(hk_parametrize(B, s))))
    zeros = sum(1 for _, v in values if v == 0)
    return {"passed": zeros == samples, "zeros": zeros, "samples": samples, "seed": seed,
            "nonzero": [{"s": s, "value": v} for s, v in values if v]}
