from fractions import Fraction

import pytest
import sympy

from app.exceptions import CompositionError, InversionError, SeriesError
from app.padic.context import Context
from app.series.functions import coeff_sup, converges_on_ball, exp_convergence, exp_series, log1p_series
from app.series.multiseries import MultiSeries, compose, monomial, recenter
from app.verification.certificate import Verdict

XY = ("x", "y")


def test_product_matches_sympy():
    """Test truncated multiplication against sympy expansion."""
    a = MultiSeries.from_expr("1 + x + 2*y - x*y/3", XY, 5)
    b = MultiSeries.from_expr("2 - y + x**3", XY, 5)
    expected = sympy.expand(a.to_expr() * b.to_expr())
    assert a * b == MultiSeries.from_expr(expected, XY, 5)


def test_power_truncates():
    a = MultiSeries.from_expr("1 + x + y", XY, 3)
    assert a ** 6 == MultiSeries.from_expr("(1 + x + y)**6", XY, 3)
    assert (a ** 6).max_degree() == 3


def test_addition_takes_smaller_order():
    a = MultiSeries.from_expr("1 + x**4", XY, 5)
    b = MultiSeries.from_expr("y", XY, 3)
    total = a + b
    assert total.order == 3
    assert total.coefficient((4, 0)) == 0
    assert total.coefficient((0, 1)) == 1


def test_inverse():
    """Test a * a^{-1} == 1 through the order."""
    a = MultiSeries.from_expr("2 + x - 3*y + x*y", XY, 6)
    assert a * a.inverse() == MultiSeries.constant(1, XY, 6)


def test_inverse_needs_unit():
    with pytest.raises(InversionError):
        MultiSeries.from_expr("x + y", XY, 4).inverse()


def test_geometric_series():
    x = MultiSeries.variable("x", ("x",), 8)
    inverse = (1 - x).inverse()
    assert inverse == MultiSeries(("x",), 8, {(k,): 1 for k in range(9)})


def test_exp_of_log1p():
    """exp(log(1 + x)) = 1 + x."""
    result = compose(exp_series(8), [log1p_series(8)])
    assert result == MultiSeries.from_expr("1 + x", ("x",), 8)


def test_log1p_of_expm1():
    result = compose(log1p_series(8), [exp_series(8) - 1])
    assert result == MultiSeries.variable("x", ("x",), 8)


def test_compose_checks_constant_terms():
    with pytest.raises(CompositionError):
        compose(exp_series(3), [MultiSeries.constant(1, ("x",), 3)])


def test_compose_order():
    f = exp_series(10)
    g = MultiSeries.from_expr("x + y**2", XY, 4)
    assert compose(f, [g]).order == 4
    assert compose(MultiSeries.from_expr("x**2", ("x",), 3), [g], polynomial=True).order == 4


def test_center_mismatch():
    a = MultiSeries.variable("x", ("x",), 3)
    b = MultiSeries.variable("x", ("x",), 3, center=[1])
    with pytest.raises(SeriesError):
        a + b


def test_recenter():
    """Test Taylor re-expansion of x^2 about 1."""
    f = MultiSeries.from_expr("x**2", ("x",), 4)
    moved = recenter(f, [1])
    assert moved.center == (Fraction(1),)
    assert moved.terms == {(0,): 1, (1,): 2, (2,): 1}
    assert moved.evaluate([3]) == 9
    assert f.evaluate([3]) == 9


def test_from_expr_with_center():
    f = MultiSeries.from_expr("x**2", ("x",), 4, center=[2])
    assert f.terms == {(0,): 4, (1,): 4, (2,): 1}


def test_substitute():
    f = MultiSeries.from_expr("x + x*y", XY, 4)
    assert f.substitute({"y": 2}) == MultiSeries.from_expr("3*x", ("x",), 4)


def test_collect():
    f = MultiSeries.from_expr("1 + t*x + t**2", ("t", "x"), 4)
    parts = f.collect("t")
    assert parts[0] == MultiSeries.constant(1, ("x",), 4)
    assert parts[1] == MultiSeries.variable("x", ("x",), 3)
    assert parts[2] == MultiSeries.constant(1, ("x",), 2)
    assert parts[3].is_zero()


def test_partial_derivative_lowers_order():
    f = MultiSeries.from_expr("x**3*y + y**2", XY, 5)
    dx = f.partial_derivative("x")
    assert dx.order == 4
    assert dx == MultiSeries.from_expr("3*x**2*y", XY, 4)
    assert f.partial_derivative("x", polynomial=True).order == 5
    with pytest.raises(SeriesError):
        MultiSeries.constant(1, XY, 0).partial_derivative("x")


def test_align_and_rename():
    f = MultiSeries.from_expr("x + 2*y", XY, 3)
    aligned = f.align(("t", "x", "y"))
    assert aligned.coefficient((0, 0, 1)) == 2
    assert aligned.rename({"t": "s"}).vars == ("s", "x", "y")
    with pytest.raises(SeriesError):
        f.align(("x",))


def test_truncate_cannot_raise_order():
    f = monomial(XY, (1, 1), 3)
    assert f.truncate(1).is_zero()
    with pytest.raises(SeriesError):
        f.truncate(4)


def test_agrees_with_uses_smaller_order():
    a = MultiSeries.from_expr("1 + x + x**5", ("x",), 6)
    b = MultiSeries.from_expr("1 + x", ("x",), 3)
    assert a.agrees_with(b)
    assert not a.agrees_with(MultiSeries.from_expr("1 - x", ("x",), 3))


def test_min_degree_and_valuation():
    f = MultiSeries(XY, 5, {(1, 1): Fraction(1, 25), (3, 0): 10})
    assert f.min_degree() == 2
    assert f.min_valuation(5) == -2
    assert MultiSeries.zero(XY, 3).min_degree() == float("inf")


def test_exp_coeff_sup_at_five():
    """|1/k!|_5 stays 1 until k = 5."""
    sup = coeff_sup(exp_series(6), 5)
    assert sup.values == [0, 0, 0, 0, 0, -1, -1]
    assert sup.abs_values()[5] == 5


@pytest.mark.parametrize("p", [2, 3, 5])
def test_exp_convergence_radius(p):
    """exp converges on |x| <= p^-d and the next ball produces a witness."""
    ctx = Context(p=p)
    inside = exp_convergence(ctx)
    outside = exp_convergence(ctx, widen=1)
    assert inside.verdict == Verdict.CONSISTENT
    assert outside.verdict == Verdict.DIVERGENCE_WITNESS
    witness = outside.details["witness_degree"]
    assert witness >= p ** 2 or p == 2
    assert witness == p ** sympy.multiplicity(p, witness)


def test_converges_on_ball_polynomial():
    """A polynomial has no terms in the upper window."""
    f = MultiSeries.from_expr("1 + 25*x", ("x",), 10)
    assert converges_on_ball(f, 3, 5).verdict == Verdict.CONSISTENT


def test_converges_on_ball_geometric():
    x = MultiSeries.variable("x", ("x",), 12)
    geometric = (1 - x).inverse()
    assert converges_on_ball(geometric, -1, 5).verdict == Verdict.CONSISTENT
    assert converges_on_ball(geometric, 0, 5).verdict == Verdict.DIVERGENCE_WITNESS


@pytest.mark.parametrize(
    "expr, order, radius",
    [
        ("1 + x**5", 6, 0),
        ("1 + x**5", 6, 3),
        ("x**3 - 125*x", 4, 2),
        ("x**7/5", 10, 1),
        ("1 + x + x**2", 9, -1),
        ("0", 5, 4),
    ],
)
def test_polynomials_converge_on_every_ball(expr, order, radius):
    f = MultiSeries.from_expr(expr, ("x",), order)
    certificate = converges_on_ball(f, radius, 5)
    assert certificate.verdict == Verdict.CONSISTENT
    assert certificate.details["polynomial_degree"] == f.max_degree()


def test_polynomial_flag_covers_a_full_window():
    """x^2 at order 2 fills the window; only the caller knows it is exact."""
    f = MultiSeries.from_expr("x**2", ("x",), 2)
    assert converges_on_ball(f, 1, 5).verdict == Verdict.DIVERGENCE_WITNESS
    assert converges_on_ball(f, 1, 5, polynomial=True).verdict == Verdict.CONSISTENT


# ----------------------------------------------------------------------
# Separate degree caps
# ----------------------------------------------------------------------

TX = ("t", "x")


def test_capped_variable_leaves_the_total_degree():
    f = MultiSeries.from_expr("t**3*x**4 + t**4 + x**5", TX, 4, caps={"t": 3})
    assert f.caps == (3, None)
    assert f.degree_caps() == {"t": 3}
    assert f.terms == {(3, 4): 1}
    assert f.contains((3, 4)) and not f.contains((4, 0)) and not f.contains((0, 5))


def test_capped_product_keeps_the_box():
    t = MultiSeries.variable("t", TX, 3, caps={"t": 2})
    x = MultiSeries.variable("x", TX, 3, caps={"t": 2})
    product = ((1 + t) * (1 + x)) ** 3
    assert product.degree_in("t") == 2
    assert product.coefficient((2, 2)) == 9
    assert product == MultiSeries.from_expr("(1 + t)**3 * (1 + x)**3", TX, 3, caps={"t": 2})


def test_inverse_in_a_capped_box():
    t = MultiSeries.variable("t", TX, 4, caps={"t": 5})
    x = MultiSeries.variable("x", TX, 4, caps={"t": 5})
    a = 1 - t * x + t
    assert a * a.inverse() == MultiSeries.constant(1, TX, 4, caps={"t": 5})


def test_mixing_a_capped_and_a_free_variable_is_rejected():
    capped = MultiSeries.variable("t", TX, 3, caps={"t": 2})
    free = MultiSeries.variable("t", TX, 3)
    with pytest.raises(SeriesError):
        capped + free


def test_independent_variables_adopt_the_other_box():
    f = MultiSeries.from_expr("1 + x", ("x",), 3).align(TX)
    assert f.cap("t") == float("inf")
    g = f * MultiSeries.variable("t", TX, 3, caps={"t": 1})
    assert g.caps == (1, None)
    with pytest.raises(SeriesError):
        MultiSeries.variable("t", TX, 3, caps={"t": float("inf")})
    with pytest.raises(SeriesError):
        MultiSeries(TX, 3, {(1, 0): 1}, caps={"t": float("inf")})


def test_truncate_only_narrows_caps():
    f = MultiSeries.from_expr("t**2*x + t*x**3", TX, 4, caps={"t": 3})
    assert f.truncate(caps={"t": 1}).terms == {(1, 3): 1}
    assert f.truncate(3).terms == {(2, 1): 1, (1, 3): 1}
    with pytest.raises(SeriesError):
        f.truncate(caps={"t": 4})
    with pytest.raises(SeriesError):
        f.truncate(caps={"x": 2})


def test_capped_derivatives_and_collect():
    f = MultiSeries.from_expr("t**2*x**4 + t*x", TX, 4, caps={"t": 2})
    dt = f.partial_derivative("t")
    assert (dt.order, dt.caps) == (4, (1, None))
    assert dt == MultiSeries.from_expr("2*t*x**4 + x", TX, 4, caps={"t": 1})
    dx = f.partial_derivative("x")
    assert (dx.order, dx.caps) == (3, (2, None))

    parts = f.collect("t")
    assert sorted(parts) == [0, 1, 2]
    assert all(part.order == 4 for part in parts.values())
    assert parts[2] == MultiSeries.from_expr("x**4", ("x",), 4)


def test_compose_into_a_capped_variable():
    """Substituting t -> t and x -> x + t x^2 keeps the t cap of f."""
    f = MultiSeries.from_expr("x**2 + t*x", TX, 4, caps={"t": 2})
    t = MultiSeries.variable("t", TX, 4, caps={"t": 3})
    x = MultiSeries.variable("x", TX, 4, caps={"t": 3})
    result = compose(f, [t, x + t * x * x])
    assert result.caps == (2, None)
    expected = MultiSeries.from_expr("(x + t*x**2)**2 + t*(x + t*x**2)", TX, 4, caps={"t": 2})
    assert result == expected


def test_compose_rejects_images_without_the_capped_variable():
    f = MultiSeries.from_expr("t*x", TX, 4, caps={"t": 2})
    x = MultiSeries.variable("x", TX, 4, caps={"t": 2})
    with pytest.raises(CompositionError):
        compose(f, [x, x])
    free_image = MultiSeries.variable("t", TX, 4, caps={"t": 2})
    with pytest.raises(CompositionError):
        compose(MultiSeries.from_expr("x**2", TX, 4), [free_image, free_image + 1])


def test_recenter_capped_series():
    f = MultiSeries.from_expr("t**2*x + x**3", TX, 3, caps={"t": 2})
    moved = recenter(f, [Fraction(1, 5), 3])
    assert moved.caps == f.caps
    assert moved.evaluate([2, 7]) == f.evaluate([2, 7])
    assert recenter(moved, [0, 0]) == f


# ----------------------------------------------------------------------
# Seeded ring properties
# ----------------------------------------------------------------------


def test_ring_laws(random_series):
    for _ in range(20):
        a, b, c = (random_series(XY, 5, terms=5) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a - a == MultiSeries.zero(XY, 5)


def test_compose_is_associative(random_series):
    for _ in range(10):
        f = random_series(("u", "w"), 5, terms=5)
        g = [random_series(XY, 5, terms=4, min_degree=1) for _ in range(2)]
        h = [random_series(("s", "r"), 5, terms=4, min_degree=1) for _ in range(2)]
        assert compose(compose(f, g), h) == compose(f, [compose(gi, h) for gi in g])


def test_partial_derivatives_commute(random_series):
    for _ in range(20):
        f = random_series(XY, 6, terms=6)
        assert f.partial_derivative("x").partial_derivative("y") == f.partial_derivative("y").partial_derivative("x")


def test_recenter_round_trip(random_series, rng):
    for _ in range(10):
        f = random_series(XY, 5, terms=5)
        point = [Fraction(rng.randint(-6, 6), rng.choice([1, 5, 7])) for _ in XY]
        moved = recenter(f, point)
        assert moved.evaluate([2, 3]) == f.evaluate([2, 3])
        assert recenter(moved, [0, 0]) == f
