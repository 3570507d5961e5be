"""Shared numeric helpers: exact rationals, "p/q" parsing, rational roots.

Exact mode works with :class:`fractions.Fraction` throughout; floating mode
with binary64.  Mixed arithmetic degrades to float automatically.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

Num = Union[Fraction, float]

#: absolute slack allowed on triangle checks in floating mode
FLOAT_TRIANGLE_SLACK = 1e-12

#: default relative tolerance for floating comparisons
REL_TOL = 1e-9


def parse_number(value) -> Num:
    """Parse a JSON scalar or "p/q" string into a Fraction or float.

    Strings and ints are exact; floats stay floats.  Never goes through
    ``Fraction(float)`` so decimal text like "0.1" keeps its meaning.
    """
    if isinstance(value, bool):
        raise ValueError(f"not a number: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational literal: {value!r}") from exc
    raise ValueError(f"not a number: {value!r}")


def number_to_json(value: Num, exact: bool):
    """Render a number for JSON: "p/q" strings in exact mode, floats otherwise."""
    if exact:
        if not isinstance(value, Fraction):
            raise ValueError(f"exact serialization of non-rational {value!r}")
        return str(value)
    return float(value)


def as_float(value: Num) -> float:
    return float(value)


def is_exact(value: Num) -> bool:
    return isinstance(value, (Fraction, int))


def rel_close(a: Num, b: Num, tol: float = REL_TOL) -> bool:
    """Relative comparison with an absolute floor at ``tol`` near zero."""
    fa, fb = float(a), float(b)
    return abs(fa - fb) <= tol * max(1.0, abs(fa), abs(fb))


def integer_nth_root(n: int, k: int):
    """Exact k-th root of a nonnegative integer, or None if irrational."""
    if n < 0 or k <= 0:
        raise ValueError("needs n >= 0, k >= 1")
    if n in (0, 1) or k == 1:
        return n
    r = round(n ** (1.0 / k))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**k == n:
            return cand
    return None


def rational_power(base: Fraction, exponent: Fraction):
    """base**exponent as an exact Fraction when the result is rational.

    Returns None when the power is irrational (caller falls back to float).
    """
    if base < 0:
        raise ValueError("negative base")
    if base == 0:
        if exponent <= 0:
            raise ValueError("0 to a nonpositive power")
        return Fraction(0)
    exponent = Fraction(exponent)
    p, q = exponent.numerator, exponent.denominator
    if p < 0:
        base, p = 1 / base, -p
    num = integer_nth_root(base.numerator, q)
    den = integer_nth_root(base.denominator, q)
    if num is None or den is None:
        return None
    return Fraction(num, den) ** p


def power(base: Num, exponent: Fraction) -> Num:
    """base**exponent, exact when possible, float otherwise."""
    if isinstance(base, Fraction):
        exact = rational_power(base, exponent)
        if exact is not None:
            return exact
    return float(base) ** float(exponent)
