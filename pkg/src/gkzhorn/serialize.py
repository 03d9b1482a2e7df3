"""Lossless JSON encoding of the package's exact objects.

Rationals become strings ``"p/q"`` (``"p"`` when integral), integers stay JSON
integers, tuples become lists, and maps with non-string keys become tagged
pair lists.  ``decode(encode(x)) == x`` for every supported type.
"""

from __future__ import annotations

import dataclasses
import json
import re
from enum import Enum
from fractions import Fraction

from .classify import Arrangement, Flag, SigmaOmegaPrime, Subspace
from .hk import LaurentPoly
from .invariant import FracModuleElt, PiPresentation, Summand
from .lattice import Face, GaleContext
from .series import TruncatedSeries
from .systems import HornFactors, LinearFactor, SystemSpec
from .weyl import INHOMOGENEOUS, ThetaPoly, WeylOp, WeylRing

_RATIONAL = re.compile(r"^-?\d+(/\d+)?$")

_DATACLASSES = {cls.__name__: cls for cls in (
    Arrangement, SigmaOmegaPrime, Subspace, LaurentPoly, FracModuleElt, PiPresentation, Summand,
    Face, GaleContext, TruncatedSeries, HornFactors, LinearFactor, SystemSpec, WeylRing)}


def rational(x) -> Fraction:
    """Parse an int, a Fraction or a string such as ``"-3/4"``."""
    if isinstance(x, bool):
        raise ValueError("boolean is not a rational")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str) and _RATIONAL.match(x.strip()):
        return Fraction(x.strip())
    raise ValueError(f"not an exact rational: {x!r}")


def fmt_rational(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def encode(obj):
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if obj is INHOMOGENEOUS:
        return {"__type__": "INHOMOGENEOUS"}
    if isinstance(obj, Enum):
        return {"__type__": type(obj).__name__, "value": obj.value}
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return fmt_rational(obj)
    if isinstance(obj, WeylOp):
        return {"__type__": "WeylOp", "ring": encode(obj.ring), "terms": encode(obj.terms)}
    if isinstance(obj, ThetaPoly):
        return {"__type__": "ThetaPoly", "n": obj.n, "terms": encode(obj.terms)}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {"__type__": type(obj).__name__}
        for f in dataclasses.fields(obj):
            out[f.name] = encode(getattr(obj, f.name))
        return out
    if isinstance(obj, dict):
        if all(isinstance(k, str) for k in obj):
            return {k: encode(v) for k, v in obj.items()}
        return {"__map__": [[encode(k), encode(v)] for k, v in obj.items()]}
    if isinstance(obj, (set, frozenset)):
        return {"__set__": sorted((encode(v) for v in obj), key=json.dumps)}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    raise TypeError(f"cannot encode {type(obj).__name__}")


def decode(data):
    if isinstance(data, str):
        return Fraction(data) if _RATIONAL.match(data) else data
    if isinstance(data, list):
        return tuple(decode(v) for v in data)
    if not isinstance(data, dict):
        return data
    if "__map__" in data:
        return {_freeze(decode(k)): decode(v) for k, v in data["__map__"]}
    if "__set__" in data:
        return frozenset(_freeze(decode(v)) for v in data["__set__"])
    tag = data.get("__type__")
    if tag is None:
        return {k: decode(v) for k, v in data.items()}
    if tag == "INHOMOGENEOUS":
        return INHOMOGENEOUS
    if tag == "Flag":
        return Flag(data["value"])
    if tag == "WeylOp":
        return WeylOp(decode(data["ring"]), decode(data["terms"]))
    if tag == "ThetaPoly":
        return ThetaPoly(data["n"], decode(data["terms"]))
    cls = _DATACLASSES.get(tag)
    if cls is None:
        raise ValueError(f"unknown type tag {tag!r}")
    kwargs = {k: decode(v) for k, v in data.items() if k != "__type__"}
    for f in dataclasses.fields(cls):
        if f.type in ("list", "list | None") and isinstance(kwargs.get(f.name), tuple):
            kwargs[f.name] = list(kwargs[f.name])
    if cls is TruncatedSeries:
        kwargs["terms"] = dict(kwargs["terms"])
    return cls(**kwargs)


def _freeze(x):
    if isinstance(x, list):
        return tuple(_freeze(v) for v in x)
    return x


def dumps(obj, **kw) -> str:
    return json.dumps(encode(obj), **kw)


def loads(text: str):
    return decode(json.loads(text))


# ---------------------------------------------------------------------------
# plain input parsing


def int_matrix(data) -> tuple:
    if not isinstance(data, (list, tuple)) or not data:
        raise ValueError("matrix must be a non-empty list of rows")
    rows = []
    for r in data:
        if not isinstance(r, (list, tuple)):
            raise ValueError("matrix rows must be lists")
        row = []
        for x in r:
            q = rational(x)
            if q.denominator != 1:
                raise ValueError(f"matrix entry {x!r} is not an integer")
            row.append(int(q))
        rows.append(tuple(row))
    if len({len(r) for r in rows}) != 1:
        raise ValueError("ragged matrix")
    return tuple(rows)


def rational_vector(data) -> tuple:
    if isinstance(data, str):
        data = [p for p in re.split(r"[,\s]+", data.strip()) if p]
    if not isinstance(data, (list, tuple)):
        raise ValueError("expected a vector")
    return tuple(rational(x) for x in data)
