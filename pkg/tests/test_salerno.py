from fractions import Fraction

import pytest

from app.darboux.moser import flow, verify_moser_constancy
from app.exterior.forms import VectorField, exterior_d, standard_symplectic
from app.padic.context import Context
from app.padic.valuation import INFINITY
from app.salerno import (
    SalernoParams,
    Variant,
    alpha_form,
    closed_form_field,
    f_ode_residual,
    f_series,
    field_residuals,
    gamma_form,
    salerno_end_to_end,
    salerno_form,
)
from app.series.multiseries import MultiSeries
from app.verification.certificate import Verdict

PAIR = ("x1", "y1")


def test_f_coefficients():
    """f(u) = -u/4 + u^2/6 - u^3/8 + ..."""
    f = f_series(6)
    assert [f.coefficient((k,)) for k in range(4)] == [0, Fraction(-1, 4), Fraction(1, 6), Fraction(-1, 8)]
    assert f.coefficient((6,)) == Fraction(1, 14)


def test_f_solves_its_ode():
    assert f_ode_residual(12).is_zero()


def test_coords_and_radius():
    params = SalernoParams(nu=5, ctx=Context(p=5, D=6, Dt=4), n=2)
    assert params.coords == ("x1", "y1", "x2", "y2")
    assert params.radius_squared(1, 6) == MultiSeries.from_expr("x2**2 + y2**2", params.coords, 6)
    assert params.nu == Fraction(5)
    with pytest.raises(ValueError):
        SalernoParams(nu=1, ctx=Context(p=5), n=0)


def test_salerno_form_expansion():
    params = SalernoParams(nu=5, ctx=Context(p=5, D=6, Dt=4))
    omega1 = salerno_form(params)
    expected = MultiSeries.from_expr("1 - 5*s + 25*s**2 - 125*s**3".replace("s", "(x1**2 + y1**2)"), PAIR, 6)
    assert omega1.coefficient((0, 1)) == expected
    assert exterior_d(omega1).is_zero()


def test_dnls_limit_is_standard():
    params = SalernoParams(nu=0, ctx=Context(p=5, D=6, Dt=4))
    assert salerno_form(params) == standard_symplectic(PAIR, 6)
    assert alpha_form(params).is_zero()
    assert gamma_form(params).is_zero()
    assert closed_form_field(params, Variant.DERIVED).is_zero()


@pytest.mark.parametrize("p,nu", [(5, 5), (7, 3), (2, Fraction(1, 3))])
def test_gamma_is_a_primitive(p, nu):
    params = SalernoParams(nu=nu, ctx=Context(p=p, D=8, Dt=6))
    gamma = gamma_form(params)
    assert gamma.order == 9
    assert (exterior_d(gamma) - alpha_form(params)).is_zero()
    # f(nu s) starts at -nu s / 4
    assert gamma.coefficient((1,)).coefficient((3, 0)) == -Fraction(nu) / 4


@pytest.mark.parametrize("p,nu", [(5, 5), (7, 3)])
def test_derived_closed_form_is_exact(p, nu):
    """The DERIVED field satisfies both Moser identities at D = 10."""
    params = SalernoParams(nu=nu, ctx=Context(p=p, D=10, Dt=8))
    residuals = field_residuals(params, Variant.DERIVED)
    assert residuals == {"contraction": INFINITY, "moser_identity": INFINITY}


def test_printed_closed_form_is_not():
    params = SalernoParams(nu=5, ctx=Context(p=5, D=6, Dt=5))
    residuals = field_residuals(params, Variant.PRINTED)
    assert residuals["contraction"] != INFINITY
    assert residuals["moser_identity"] != INFINITY


def test_variants_differ_by_half_the_prefactor():
    params = SalernoParams(nu=5, ctx=Context(p=5, D=6, Dt=5))
    printed = closed_form_field(params, "printed")
    derived = closed_form_field(params, Variant.DERIVED)
    difference = printed - derived
    # at t = 0 the prefactor is 1, leaving (x, y)/2 in lowest order
    assert difference.components[0].coefficient((0, 1, 0)) == Fraction(1, 2)
    assert difference.components[1].coefficient((0, 0, 1)) == Fraction(1, 2)


def test_end_to_end_flagship():
    """p = 5, nu = 5 at D = 10, Dt = 8."""
    report = salerno_end_to_end(SalernoParams(nu=5, ctx=Context(p=5, D=10, Dt=8)))
    assert report.succeeded
    assert report.certified
    assert report.comparison["primitive_matches_gamma"] is True
    assert report.comparison["field_matches_closed_form"] is True
    assert report.comparison["field_difference_valuation"] == "inf"
    assert report.certificates["t_convergence_evidence"].verdict == Verdict.PASS


def test_end_to_end_spot_check():
    report = salerno_end_to_end(SalernoParams(nu=3, ctx=Context(p=7, D=8, Dt=6)))
    assert report.succeeded
    assert report.comparison["field_matches_closed_form"] is True


def test_end_to_end_two_pairs():
    params = SalernoParams(nu=5, ctx=Context(p=5, D=5, Dt=4), n=2)
    report = salerno_end_to_end(params)
    assert report.succeeded
    assert report.comparison["primitive_matches_gamma"] is True


def test_end_to_end_dnls_limit():
    report = salerno_end_to_end(SalernoParams(nu=0, ctx=Context(p=5, D=6, Dt=5)))
    assert report.succeeded
    assert report.X.is_zero()
    assert report.flow[0].terms == {(0, 1, 0): 1}
    assert report.flow[1].terms == {(0, 0, 1): 1}


def test_perturbed_flow_breaks_constancy():
    """Adding x^3/7 to the x-component makes psi_t^* omega_t depend on t."""
    ctx = Context(p=5, D=6, Dt=5)
    report = salerno_end_to_end(SalernoParams(nu=5, ctx=ctx))
    X = report.X
    bump = MultiSeries(X.vars, X.order, {(0, 3, 0): Fraction(1, 7)}, caps=X.components[0].caps)
    perturbed = VectorField(X.coords, [X.components[0] + bump, X.components[1]])
    certificate = verify_moser_constancy(flow(perturbed, ctx), report.omega0, report.alpha, ctx)
    assert certificate.verdict == Verdict.FAIL
    assert certificate.details["time_residual_terms"] > 0


@pytest.mark.parametrize("Dt,t_degree", [(8, 3), (2, 2)])
def test_closed_form_time_degree(Dt, t_degree):
    """t^k first appears at coordinate degree 2k + 3, so D = 10 reaches t^3."""
    params = SalernoParams(nu=5, ctx=Context(p=5, D=10, Dt=Dt))
    X = closed_form_field(params)
    assert X.order == 10
    assert X.degree_in("t") == t_degree
    assert X.components[0].cap("t") == Dt


def test_time_cap_only_truncates():
    wide = closed_form_field(SalernoParams(nu=5, ctx=Context(p=5, D=10, Dt=8)))
    narrow = closed_form_field(SalernoParams(nu=5, ctx=Context(p=5, D=10, Dt=2)))
    assert wide.truncate(caps={"t": 2}) == narrow


def test_end_to_end_second_prime_at_full_depth():
    """p = 7, nu = 3 at D = 10, Dt = 8."""
    report = salerno_end_to_end(SalernoParams(nu=3, ctx=Context(p=7, D=10, Dt=8)))
    assert report.succeeded
    assert report.certified
    assert report.comparison["field_matches_closed_form"] is True
    constancy = report.certificates["moser_constancy"]
    assert constancy.details["t_order"] == 8
    assert constancy.details["space_order"] == constancy.checked_through
    assert constancy.details["flow_t_degree"] == 4
