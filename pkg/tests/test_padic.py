from fractions import Fraction

import pytest

from app.exceptions import ContextError, DimensionError
from app.padic import (
    INFINITY,
    Context,
    abs_value,
    ball_contains_strict,
    distance_valuation,
    exp_radius_exponent,
    factorial_valuation,
    format_rational,
    format_valuation,
    in_ball,
    in_open_ball,
    norm_valuation,
    parse_rational,
    parse_valuation,
    valuation,
)


def test_context_rejects_composite_prime():
    """Test that p must be prime."""
    with pytest.raises(ContextError):
        Context(p=4)
    with pytest.raises(ContextError):
        Context(p=1)


def test_context_rejects_small_orders():
    with pytest.raises(ContextError):
        Context(p=5, D=1)
    with pytest.raises(ContextError):
        Context(p=5, Dt=0)


def test_context_d_constant():
    """Test d = 2 for p = 2 and 1 otherwise."""
    assert Context(p=2).d == 2
    assert Context(p=3).d == 1
    assert Context(p=101).d == 1
    assert exp_radius_exponent(Context(p=2)) == -2
    assert exp_radius_exponent(Context(p=7)) == -1


def test_valuation_of_rationals():
    assert valuation(0, 5) == INFINITY
    assert valuation(Fraction(50, 3), 5) == 2
    assert valuation(Fraction(3, 25), 5) == -2
    assert valuation(-7, 7) == 1
    assert valuation(Fraction(1, 3), 2) == 0


def test_abs_value_is_exact():
    assert abs_value(50, 5) == Fraction(1, 25)
    assert abs_value(Fraction(1, 125), 5) == 125
    assert abs_value(0, 5) == 0


def test_norm_and_distance():
    assert norm_valuation([5, Fraction(1, 5), 0], 5) == -1
    assert norm_valuation([], 5) == INFINITY
    assert distance_valuation([6, 1], [1, 26], 5) == 1
    with pytest.raises(DimensionError):
        distance_valuation([1, 2], [1], 5)


def test_balls():
    """Test the closed and open ball predicates."""
    assert in_ball([5], [0], -1, 5)
    assert not in_ball([1], [0], -1, 5)
    assert not in_open_ball([5], [0], -1, 5)
    assert in_open_ball([25], [0], -1, 5)
    assert in_ball([0], [0], -100, 5)


def test_strict_containment_matches_closed_ball():
    """Norms are powers of p, so ||y - c|| < p r is the same as ||y - c|| <= r."""
    points = [0, 1, 2, 5, 10, 25, Fraction(1, 5), Fraction(3, 25), 125]
    for y in points:
        for e in range(-3, 3):
            assert ball_contains_strict([y], [0], e, 5) == in_ball([y], [0], e, 5)


def test_factorial_valuation():
    assert factorial_valuation(0, 3) == 0
    assert factorial_valuation(4, 2) == 3
    assert factorial_valuation(25, 5) == 6
    assert factorial_valuation(9, 3) == 4
    with pytest.raises(ValueError):
        factorial_valuation(-1, 5)


def test_parse_rational():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational("-7") == -7
    assert parse_rational(" 10/4 ") == Fraction(5, 2)
    for bad in ["0.5", "1e3", "1/0", "", "abc", True]:
        with pytest.raises(ValueError):
            parse_rational(bad)


def test_format_rational():
    assert format_rational(Fraction(-6, 4)) == "-3/2"
    assert format_rational(Fraction(8)) == "8"
    huge = Fraction(10**40 + 1, 3**30)
    assert parse_rational(format_rational(huge)) == huge


def test_valuation_text_format():
    assert format_valuation(INFINITY) == "inf"
    assert format_valuation(-INFINITY) == "-inf"
    assert format_valuation(Fraction(3, 2)) == "3/2"
    assert format_valuation(Fraction(4, 2)) == 2
    assert format_valuation(-3) == -3
    for value in [INFINITY, -INFINITY, Fraction(3, 2), 7, 0]:
        assert parse_valuation(format_valuation(value)) == value


def _random_rational(rng, p):
    """Rationals with numerator and denominator rich in powers of p."""
    num = rng.choice([-1, 1]) * rng.randint(1, 50) * p ** rng.randint(0, 4)
    den = rng.randint(1, 50) * p ** rng.randint(0, 3)
    return Fraction(num, den)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_valuation_is_multiplicative(rng, p):
    for _ in range(200):
        a, b = _random_rational(rng, p), _random_rational(rng, p)
        assert valuation(a * b, p) == valuation(a, p) + valuation(b, p)
        assert valuation(a / b, p) == valuation(a, p) - valuation(b, p)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_ultrametric_inequality(rng, p):
    for _ in range(200):
        a, b = _random_rational(rng, p), _random_rational(rng, p)
        lower = min(valuation(a, p), valuation(b, p))
        assert valuation(a + b, p) >= lower
        if valuation(a, p) != valuation(b, p):
            assert valuation(a + b, p) == lower


def _brute_factorial_valuation(j, p):
    total = 0
    for k in range(2, j + 1):
        while k % p == 0:
            total += 1
            k //= p
    return total


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11])
def test_factorial_valuation_against_counting(p):
    for j in range(201):
        assert factorial_valuation(j, p) == _brute_factorial_valuation(j, p)
