"""Exact rational arithmetic helpers and canonical JSON emission.

All lengths, heights and coordinates in this package are `fractions.Fraction`
values.  JSON never stores floats: every rational is serialized as the string
``"p/q"`` (or ``"p"`` when the denominator is 1) so that reports are exact and
byte-stable.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

Q = Fraction  # short alias used throughout the package


def frac(value: Any) -> Fraction:
    """Coerce ints, "p/q" strings and Fractions to Fraction.  Floats are
    rejected: exactness is a package-wide invariant."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def frac_str(value: Fraction | int) -> str:
    """Serialize a rational as "p" or "p/q" in lowest terms."""
    f = Fraction(value)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def jsonable(obj: Any) -> Any:
    """Recursively convert a structure to plain JSON types.

    Fractions become "p/q" strings, tuples become lists, dict keys are
    stringified.  Floats are rejected so they cannot leak into reports.
    """
    if isinstance(obj, Fraction):
        return frac_str(obj)
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        raise TypeError("floats are not allowed in reports")
    if isinstance(obj, str):
        return obj
    if isinstance(obj, dict):
        return {_key(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(jsonable(v) for v in obj)
    raise TypeError(f"cannot serialize {type(obj).__name__} to JSON")


def _key(k: Any) -> str:
    if isinstance(k, str):
        return k
    if isinstance(k, Fraction):
        return frac_str(k)
    if isinstance(k, int):
        return str(k)
    if isinstance(k, tuple):
        return ",".join(_key(x) for x in k)
    raise TypeError(f"cannot use {type(k).__name__} as a JSON key")


def canonical_json(obj: Any) -> str:
    """Deterministic JSON: sorted keys, no whitespace variance.

    Two runs that compute the same report produce byte-identical output.
    """
    return json.dumps(jsonable(obj), sort_keys=True, separators=(",", ":"))


def dump_json(obj: Any, indent: int = 2) -> str:
    """Human-oriented JSON (still exact and deterministically ordered)."""
    return json.dumps(jsonable(obj), sort_keys=True, indent=indent)
