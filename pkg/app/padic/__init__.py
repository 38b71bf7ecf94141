"""p-adic core: context, valuations, absolute values and balls."""

from app.padic.context import Context, prime_of
from app.padic.rational import format_rational, parse_rational
from app.padic.valuation import (
    INFINITY,
    Valuation,
    abs_value,
    ball_contains_strict,
    distance_valuation,
    exp_radius_exponent,
    factorial_valuation,
    format_valuation,
    in_ball,
    in_open_ball,
    norm_valuation,
    parse_valuation,
    valuation,
)

__all__ = [
    "Context",
    "prime_of",
    "parse_rational",
    "format_rational",
    "INFINITY",
    "Valuation",
    "valuation",
    "norm_valuation",
    "abs_value",
    "distance_valuation",
    "in_ball",
    "in_open_ball",
    "ball_contains_strict",
    "factorial_valuation",
    "exp_radius_exponent",
    "format_valuation",
    "parse_valuation",
]
