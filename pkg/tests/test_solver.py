from fractions import Fraction

import pytest

from app.exceptions import HypothesisError, InversionError, SeriesError
from app.padic.context import Context
from app.series.functions import log1p_series
from app.series.multiseries import MultiSeries, compose
from app.solver.ivp import IVPProblem, admissible_radius, check_bound, cs_table, ivp_solve
from app.solver.rational import check_decay, min_root_abs, newton_polygon, polynomial, rational_expand
from app.verification.certificate import Verdict

INF = float("inf")


def worked_rhs(order: int) -> MultiSeries:
    """y^2 / (1 - x) through total degree `order`."""
    return MultiSeries(("x", "y"), order, {(k, 2): 1 for k in range(order - 1)})


def worked_problem(initial, order: int = 16) -> IVPProblem:
    return IVPProblem(rhs=[worked_rhs(order)], x_var="x", y_vars=["y"], initial=initial, certified=True)


# ----------------------------------------------------------------------
# Rational functions
# ----------------------------------------------------------------------


def test_expand_one_over_one_plus_x_squared():
    """1/(1 + x^2) = 1 - x^2 + x^4 - ..."""
    series = rational_expand([1], [1, 0, 1], 20)
    assert series.order == 20
    for k in range(21):
        expected = 0 if k % 2 else (-1) ** (k // 2)
        assert series.coefficient((k,)) == expected


def test_expand_with_numerator():
    series = rational_expand([1, 1], [1, -1], 6)
    assert [series.coefficient((k,)) for k in range(7)] == [1, 2, 2, 2, 2, 2, 2]


def test_expand_rejects_zero_constant_term():
    with pytest.raises(InversionError):
        rational_expand([1], [0, 1], 5)


def test_expand_in_one_of_several_variables():
    """Expansion in t with coefficients that are series in s."""
    ring = ("t", "s")
    s = MultiSeries.variable("s", ring, 6)
    t = MultiSeries.variable("t", ring, 6)
    numerator = s.scale(5) + 1
    denominator = (s.scale(5) - t * s.scale(5)) + 1
    expansion = rational_expand(numerator, denominator, 6, var="t")
    assert expansion * denominator == numerator


def test_newton_polygon_unit_roots():
    segments = newton_polygon([1, 0, 1], 5)
    assert [(s.slope, s.multiplicity) for s in segments] == [(0, 2)]
    assert min_root_abs([1, 0, 1], 5) == 0


def test_newton_polygon_small_roots():
    """25 - x^2 has roots +-5 with |root|_5 = 1/5."""
    segments = newton_polygon([25, 0, -1], 5)
    assert [(s.slope, s.multiplicity) for s in segments] == [(-1, 2)]
    assert segments[0].root_valuation == 1
    assert min_root_abs([25, 0, -1], 5) == -1


def test_newton_polygon_mixed_roots():
    """(1 - 5x)(1 - x/25): roots 1/5 and 25."""
    poly = [1, Fraction(-126, 25), Fraction(1, 5)]
    segments = newton_polygon(poly, 5)
    assert [(s.slope, s.multiplicity) for s in segments] == [(-2, 1), (1, 1)]
    assert min_root_abs(poly, 5) == -2


def test_newton_polygon_zero_root():
    segments = newton_polygon([0, -5, 1], 5)
    assert segments[0].slope == -INF
    assert segments[0].multiplicity == 1
    assert min_root_abs([0, -5, 1], 5) == -INF


def test_min_root_abs_of_constant():
    assert min_root_abs([3], 5) == INF


def test_check_decay():
    """Coefficients of 1/(1 + x^2) stay bounded, those of 1/(1 - x) do not shrink."""
    ctx = Context(p=5)
    series = rational_expand([1], [1, 0, 1], 20)
    assert check_decay(series, 0, ctx).verdict == Verdict.PASS

    geometric = rational_expand([1], polynomial([1, -1], "x", 10), 10)
    failed = check_decay(geometric, 1, ctx)
    assert failed.verdict == Verdict.FAIL
    assert failed.details["violation_index"] == 1


def test_check_decay_at_root_radius():
    """1/(1 - 5x) expands as 5^k x^k, which decays like p^-k."""
    ctx = Context(p=5)
    den = polynomial([1, -5], "x", 12)
    series = rational_expand([1], den, 12)
    radius = min_root_abs(den, ctx)
    assert radius == 1
    assert check_decay(series, radius, ctx).passed
    assert not check_decay(series, 2, ctx).passed


# ----------------------------------------------------------------------
# Initial value problems
# ----------------------------------------------------------------------


def test_worked_example_symbolic_coefficients():
    """a_2 = y0^2/2 + y0^3 and a_3 = y0^2/3 + y0^3 + y0^4."""
    sol = ivp_solve(worked_problem("symbolic", 12), 8)
    a1 = sol.coefficient(0, 1)
    a2 = sol.coefficient(0, 2)
    a3 = sol.coefficient(0, 3)
    assert a1.vars == ("y_0",)
    assert a1.terms == {(2,): 1}
    assert a2.terms == {(2,): Fraction(1, 2), (3,): 1}
    assert a3.terms == {(2,): Fraction(1, 3), (3,): 1, (4,): 1}


def test_worked_example_matches_closed_form():
    """y = 1/(1/y0 + log(1 - x)) for y0 = 5."""
    sol = ivp_solve(worked_problem([5]), 12)
    assert sol.order == 12
    x = MultiSeries.variable("x", ("x",), 12)
    expected = (compose(log1p_series(12), [-x]) + Fraction(1, 5)).inverse()
    for j in range(13):
        assert sol.coefficient(0, j) == expected.coefficient((j,))


def test_ode_residual_vanishes():
    sol = ivp_solve(worked_problem([5]), 10)
    assert all(r.is_zero() for r in sol.ode_residual())
    symbolic = ivp_solve(worked_problem("symbolic", 10), 7)
    assert all(r.is_zero() for r in symbolic.ode_residual())


def test_coefficient_bound_and_negative_control():
    """|a_j| <= r/|j!| at r = 1/p, and fails once a_2 is scaled by 1/125."""
    ctx = Context(p=5)
    sol = ivp_solve(worked_problem([5]), 12)
    certificate = check_bound(sol, -1, ctx)
    assert certificate.verdict == Verdict.PASS
    assert certificate.checked_through == 12

    broken = check_bound(sol.with_scaled_coefficient(0, 2, Fraction(1, 125)), -1, ctx)
    assert broken.verdict == Verdict.FAIL
    assert broken.details["violation"]["index"] == 2


def test_check_bound_rejects_far_initial_value():
    sol = ivp_solve(worked_problem([1]), 6)
    with pytest.raises(HypothesisError):
        check_bound(sol, -1, Context(p=5))


def test_check_bound_needs_concrete_solution():
    sol = ivp_solve(worked_problem("symbolic", 8), 4)
    with pytest.raises(HypothesisError):
        check_bound(sol, -1, Context(p=5))


def test_admissible_radius():
    ctx = Context(p=5)
    prob = worked_problem([5])
    table = cs_table(prob, ctx)
    assert table.is_zero(0) and table.is_zero(1)
    assert table.values[2] == 0
    assert admissible_radius(prob, ctx) == 0

    # 25 y^2 allows the larger ball |x| <= 5^2
    scaled = IVPProblem(rhs=[worked_rhs(10).scale(25)], x_var="x", y_vars=["y"], initial=[0])
    assert admissible_radius(scaled, ctx) == 2

    # nothing constrains a zero right-hand side
    flat = IVPProblem(rhs=[MultiSeries.zero(("x", "y"), 6)], x_var="x", y_vars=["y"], initial=[0])
    assert admissible_radius(flat, ctx) == 0

    # y^2 / 5 shrinks it
    shrunk = IVPProblem(rhs=[worked_rhs(10).scale(Fraction(1, 5))], x_var="x", y_vars=["y"], initial=[0])
    assert admissible_radius(shrunk, ctx) == -1


def test_certified_mode_rejects_linear_terms():
    rhs = MultiSeries.from_expr("y + y**2", ("x", "y"), 6)
    prob = IVPProblem(rhs=[rhs], x_var="x", y_vars=["y"], initial=[1], certified=True)
    with pytest.raises(HypothesisError):
        ivp_solve(prob, 4)
    with pytest.raises(HypothesisError):
        admissible_radius(prob, Context(p=3))


def test_uncertified_linear_equation():
    """y' = y gives exp(x)."""
    rhs = MultiSeries.from_expr("y", ("x", "y"), 10)
    sol = ivp_solve(IVPProblem(rhs=[rhs], x_var="x", y_vars=["y"], initial=[1]), 8)
    assert [sol.coefficient(0, j) for j in range(4)] == [1, 1, Fraction(1, 2), Fraction(1, 6)]


def test_system_of_two_unknowns():
    """y' = z^2, z' = y^2 with symmetric data keeps y = z."""
    ring = ("x", "y", "z")
    f = MultiSeries.from_expr("z**2", ring, 8)
    g = MultiSeries.from_expr("y**2", ring, 8)
    sol = ivp_solve(IVPProblem(rhs=[f, g], x_var="x", y_vars=["y", "z"], initial=[3, 3]), 6)
    assert sol.coefficients(0) == sol.coefficients(1)
    assert sol.coefficient(0, 1) == 9


def test_recentering_costs_the_top_degree_in_y():
    """y^2 terms re-expanded about y0 = 5 are exact only through order - 2."""
    sol = ivp_solve(worked_problem([5], 12), 12)
    assert sol.order == 11
    assert all(r.is_zero() for r in sol.ode_residual())


def test_symbolic_coefficients_specialize_to_concrete_ones():
    """a_j(y0) evaluated at y0 = 5 gives the concrete a_j while deg a_j = j + 1 fits the box."""
    symbolic = ivp_solve(worked_problem("symbolic"), 12)
    concrete = ivp_solve(worked_problem([5]), 12)
    for j in range(6):
        assert symbolic.coefficient(0, j).evaluate([5]) == concrete.coefficient(0, j)


def test_solution_ignores_term_order(rng):
    ring = ("x", "y", "z")
    f = MultiSeries.from_expr("z**2 + x*y**2 - y*z/3", ring, 8)
    g = MultiSeries.from_expr("y**3 + 2*x*z**2", ring, 8)

    def shuffled(series):
        items = list(series.terms.items())
        rng.shuffle(items)
        return MultiSeries(series.vars, series.order, dict(items))

    prob = IVPProblem(rhs=[f, g], x_var="x", y_vars=["y", "z"], initial=[2, -1])
    again = IVPProblem(rhs=[shuffled(f), shuffled(g)], x_var="x", y_vars=["y", "z"], initial=[2, -1])
    swapped = IVPProblem(rhs=[g, f], x_var="x", y_vars=["z", "y"], initial=[-1, 2])
    sol, sol_again, sol_swapped = (ivp_solve(p, 7) for p in (prob, again, swapped))
    assert sol.series == sol_again.series
    assert sol.coefficients(0) == sol_swapped.coefficients(1)
    assert sol.coefficients(1) == sol_swapped.coefficients(0)


def test_capped_independent_variable():
    """x capped at 2 on its own: y' = y^2 runs to x-degree 3 at full order in y0."""
    rhs = MultiSeries.from_expr("y**2", ("x", "y"), 5, caps={"x": 2})
    sol = ivp_solve(IVPProblem(rhs=[rhs], x_var="x", y_vars=["y"], initial="symbolic", certified=True), 10)
    assert sol.order == 3
    assert sol.space_order == 5
    assert sol.series[0].terms == {(k, k + 1): 1 for k in range(4)}
    assert sol.coefficient(0, 3).order == 5

    with pytest.raises(SeriesError):
        ivp_solve(IVPProblem(rhs=[rhs], x_var="x", y_vars=["y"], initial=[1]), 4)
