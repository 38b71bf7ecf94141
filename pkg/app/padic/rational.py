"""
Rational number text format and sympy interop.

Rationals are written "num/den" (or just "num"), decimal, unbounded size.
"""

from fractions import Fraction
from typing import Union

import sympy

RationalLike = Union[int, Fraction, str]


def parse_rational(value: RationalLike) -> Fraction:
    """Parse an int, Fraction or "num/den" string into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(ch in text for ch in ".eE_ "):
            raise ValueError(f"not a rational: {value!r}")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"not a rational: {value!r}") from e
    raise ValueError(f"not a rational: {value!r}")


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def to_sympy(value: Fraction) -> sympy.Rational:
    value = Fraction(value)
    return sympy.Rational(value.numerator, value.denominator)


def from_sympy(value) -> Fraction:
    """Convert a sympy number to a Fraction; rejects non-rational values."""
    value = sympy.sympify(value)
    if not value.is_Rational:
        raise ValueError(f"not a rational number: {value}")
    return Fraction(int(value.p), int(value.q))
