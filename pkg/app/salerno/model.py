"""
The Salerno lattice form

    omega1 = sum_i dx_i ^ dy_i / (1 + nu (x_i^2 + y_i^2)),

its explicit primitive gamma, the closed-form Moser field, and the run of
the generic Darboux pipeline on it. nu = 0 is the dNLS limit.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Tuple

from app.config import settings
from app.darboux.moser import moser_residuals
from app.darboux.pipeline import DarbouxReport, darboux_transform
from app.exceptions import IdentityError
from app.exterior.forms import KForm, VectorField, exterior_d, standard_symplectic
from app.padic.context import Context
from app.padic.valuation import INFINITY, Valuation, format_valuation
from app.series.functions import log1p_series
from app.series.multiseries import MultiSeries, compose
from app.solver.rational import rational_expand

logger = logging.getLogger("padic_darboux")


class Variant(str, Enum):
    """Scalar factor of the closed-form field."""

    PRINTED = "printed"
    DERIVED = "derived"


@dataclass(frozen=True)
class SalernoParams:
    nu: Fraction
    ctx: Context
    n: int = 1

    def __post_init__(self):
        object.__setattr__(self, "nu", Fraction(self.nu))
        if self.n < 1:
            raise ValueError(f"need at least one (x, y) pair, got n={self.n}")

    @property
    def coords(self) -> Tuple[str, ...]:
        names: Tuple[str, ...] = ()
        for i in range(1, self.n + 1):
            names += (f"x{i}", f"y{i}")
        return names

    def radius_squared(self, i: int, order: int) -> MultiSeries:
        """s_i = x_i^2 + y_i^2 for the pair i (0-based)."""
        coords = self.coords
        terms = {}
        for k in (2 * i, 2 * i + 1):
            e = [0] * len(coords)
            e[k] = 2
            terms[tuple(e)] = Fraction(1)
        return MultiSeries(coords, order, terms)


def salerno_form(params: SalernoParams) -> KForm:
    """sum_i (1 + nu s_i)^{-1} dx_i ^ dy_i through order D."""
    order = params.ctx.D
    terms = {}
    for i in range(params.n):
        terms[(2 * i, 2 * i + 1)] = (params.radius_squared(i, order).scale(params.nu) + 1).inverse()
    return KForm(2, params.coords, terms, order=order)


def alpha_form(params: SalernoParams) -> KForm:
    """alpha = omega1 - omega0 = -sum_i nu s_i / (1 + nu s_i) dx_i ^ dy_i."""
    return salerno_form(params) - standard_symplectic(params.coords, params.ctx.D)


def f_series(order: int, var: str = "u") -> MultiSeries:
    """f(u) = (log(1 + u)/u - 1)/2, the coefficient of u^k being (-1)^k / (2(k + 1)) for k >= 1."""
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    log = log1p_series(order + 1, var)
    shifted = {(e[0] - 1,): c for e, c in log.terms.items()}
    return (MultiSeries((var,), order, shifted) - 1).scale(Fraction(1, 2))


def f_ode_residual(order: int, var: str = "u") -> MultiSeries:
    """2f + 2u f' + u/(1 + u), zero through order - 1."""
    f = f_series(order, var)
    u = MultiSeries.variable(var, (var,), order)
    rhs = u * (u + 1).inverse()
    lhs = f.scale(2) + (u * f.partial_derivative(var)).scale(2)
    top = min(lhs.order, rhs.order)
    return lhs.truncate(top) + rhs.truncate(top)


def _pair_functions(params: SalernoParams, fn: MultiSeries, order: int) -> List[MultiSeries]:
    """fn(nu s_i) for every pair."""
    return [compose(fn, [params.radius_squared(i, order).scale(params.nu)]) for i in range(params.n)]


def _rotation(params: SalernoParams, i: int, order: int) -> Tuple[MultiSeries, MultiSeries]:
    x = MultiSeries.variable(params.coords[2 * i], params.coords, order)
    y = MultiSeries.variable(params.coords[2 * i + 1], params.coords, order)
    return x, y


def gamma_form(params: SalernoParams) -> KForm:
    """
    gamma = sum_i f(nu s_i) (-y_i dx_i + x_i dy_i), built one order above
    D like every primitive; d(gamma) = alpha is checked before returning.

    Raises:
        IdentityError: d(gamma) != alpha at truncation
    """
    order = params.ctx.D + 1
    terms = {}
    for i, fi in enumerate(_pair_functions(params, f_series(order), order)):
        x, y = _rotation(params, i, order)
        terms[(2 * i,)] = -(fi * y)
        terms[(2 * i + 1,)] = fi * x
    gamma = KForm(1, params.coords, terms, vars=params.coords, order=order)
    if not (exterior_d(gamma) - alpha_form(params)).is_zero():
        raise IdentityError("d(gamma) differs from alpha")
    return gamma


def closed_form_field(params: SalernoParams, variant: Variant = Variant.DERIVED) -> VectorField:
    """
    X_t = (1 + nu s)/(1 + (1 - t) nu s) * phi(nu s) * (x, y) on every pair,
    with phi(u) = 1/2 - log(1 + u)/(2u) (DERIVED, equal to -f) or
    phi(u) = 1 - log(1 + u)/(2u) (PRINTED). The prefactor is expanded in t
    with series coefficients in (x, y): through degree Dt in t and total
    degree D in the coordinates.
    """
    variant = Variant(variant)
    t = settings.time_variable
    order = params.ctx.D
    names = (t, *params.coords)
    phi = -f_series(order)
    if variant is Variant.PRINTED:
        phi = phi + Fraction(1, 2)

    time = MultiSeries.variable(t, names, order, caps={t: params.ctx.Dt})
    components: List[MultiSeries] = []
    for i, phi_i in enumerate(_pair_functions(params, phi, order)):
        nus = params.radius_squared(i, order).scale(params.nu).align(names)
        prefactor = rational_expand(nus + 1, (nus - time * nus) + 1, order, var=t)
        scalar = prefactor * phi_i.align(names)
        x, y = _rotation(params, i, order)
        components.extend([scalar * x.align(names), scalar * y.align(names)])
    return VectorField(params.coords, components, vars=names, order=order)


def field_residuals(params: SalernoParams, variant: Variant = Variant.DERIVED) -> Dict[str, Valuation]:
    """Contraction and Moser-identity defects of the closed-form field."""
    X = closed_form_field(params, variant)
    omega0 = standard_symplectic(params.coords, params.ctx.D)
    return moser_residuals(X, omega0, alpha_form(params), gamma_form(params), params.ctx)


def salerno_end_to_end(params: SalernoParams) -> DarbouxReport:
    """
    Run the Darboux pipeline on the Salerno form and compare its primitive
    and field with gamma and the DERIVED closed form.
    """
    logger.info(f"salerno_end_to_end: nu={params.nu}, n={params.n}, p={params.ctx.p}")
    report = darboux_transform(salerno_form(params), params.ctx)
    gamma = gamma_form(params)
    closed = closed_form_field(params, Variant.DERIVED)
    difference = [a - b for a, b in zip(report.X.align(closed.vars).components, closed.components)]
    report.comparison = {
        "nu": str(params.nu),
        "pairs": params.n,
        "variant": Variant.DERIVED.value,
        "primitive_matches_gamma": report.beta.agrees_with(gamma),
        "field_matches_closed_form": report.X.agrees_with(closed),
        "field_difference_valuation": format_valuation(
            min((c.min_valuation(params.ctx) for c in difference), default=INFINITY)
        ),
    }
    logger.info(f"salerno_end_to_end: comparison {report.comparison}")
    return report
