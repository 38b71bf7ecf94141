"""
Exact p-adic valuations, absolute values and ball predicates.

Absolute values are carried as integer exponents: a radius r = p^e is
stored as e, and |x|_p = p^(-valuation(x)). Zero has valuation math.inf.
"""

import math
from fractions import Fraction
from typing import Sequence, Union

from sympy import multiplicity

from app.exceptions import DimensionError
from app.padic.context import PrimeLike, prime_of

# An integer, or math.inf for the zero element.
Valuation = Union[int, float]

INFINITY = math.inf


def valuation(x, ctx: PrimeLike) -> Valuation:
    """
    Exact p-adic valuation of a rational number.

    Args:
        x: int or Fraction
        ctx: Context or prime

    Returns:
        v(numerator) - v(denominator), or math.inf for zero
    """
    p = prime_of(ctx)
    x = Fraction(x)
    if x == 0:
        return INFINITY
    return int(multiplicity(p, abs(x.numerator))) - int(multiplicity(p, x.denominator))


def norm_valuation(vector: Sequence, ctx: PrimeLike) -> Valuation:
    """Valuation of the sup norm: the minimum componentwise valuation."""
    return min((valuation(x, ctx) for x in vector), default=INFINITY)


def abs_value(x, ctx: PrimeLike) -> Fraction:
    """|x|_p as an exact rational; 0 for 0."""
    v = valuation(x, ctx)
    if v == INFINITY:
        return Fraction(0)
    return Fraction(prime_of(ctx)) ** (-v)


def distance_valuation(y: Sequence, x: Sequence, ctx: PrimeLike) -> Valuation:
    """Valuation of ||y - x||_p."""
    if len(y) != len(x):
        raise DimensionError(f"dimension mismatch: {len(y)} != {len(x)}")
    return norm_valuation([Fraction(a) - Fraction(b) for a, b in zip(y, x)], ctx)


def in_ball(y: Sequence, center: Sequence, radius_exponent: int, ctx: PrimeLike) -> bool:
    """True iff ||y - center||_p <= p^radius_exponent."""
    return distance_valuation(y, center, ctx) >= -radius_exponent


def in_open_ball(y: Sequence, center: Sequence, radius_exponent: int, ctx: PrimeLike) -> bool:
    """True iff ||y - center||_p < p^radius_exponent."""
    return distance_valuation(y, center, ctx) > -radius_exponent


def ball_contains_strict(y: Sequence, center: Sequence, radius_exponent: int, ctx: PrimeLike) -> bool:
    """
    ||y - center||_p < p * r. Norms are powers of p, so this agrees with
    in_ball for the same radius.
    """
    return in_open_ball(y, center, radius_exponent + 1, ctx)


def factorial_valuation(j: int, ctx: PrimeLike) -> int:
    """v_p(j!) by Legendre's formula."""
    if j < 0:
        raise ValueError(f"factorial of negative integer {j}")
    p = prime_of(ctx)
    total, power = 0, p
    while power <= j:
        total += j // power
        power *= p
    return total


def exp_radius_exponent(ctx) -> int:
    """The exponential series converges on the closed ball of radius p^(-d)."""
    return -ctx.d


def format_valuation(v: Valuation) -> Union[int, str]:
    """JSON-safe rendering: integers stay integers, infinities become strings."""
    if v == INFINITY:
        return "inf"
    if v == -INFINITY:
        return "-inf"
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else int(v)
    return int(v)


def parse_valuation(value: Union[int, str]) -> Valuation:
    """Inverse of format_valuation."""
    if value == "inf":
        return INFINITY
    if value == "-inf":
        return -INFINITY
    if isinstance(value, str):
        parsed = Fraction(value)
        return int(parsed) if parsed.denominator == 1 else parsed
    return int(value)
