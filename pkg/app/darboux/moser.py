"""
Moser's path method on a single chart.

For the family omega_t = omega0 + t alpha with alpha = d(beta2), the field
X_t solving i_X omega_t = -beta2 satisfies d/dt omega_t + L_X omega_t = 0,
so its flow psi_t pulls omega_t back to omega0. The time variable is a
parameter of every form here (settings.time_variable). Given a context,
t is truncated at degree Dt on its own while the coordinates keep the
total-degree order D.
"""

import logging
from typing import Dict, List, Optional, Tuple

import sympy

from app.config import settings
from app.exceptions import FormError, HypothesisError, IdentityError
from app.exterior.forms import (
    KForm,
    VectorField,
    _union_vars,
    contract,
    covector,
    lie_derivative,
    pullback,
    time_derivative,
)
from app.exterior.matrix import form_value_matrix, rational_matrix, two_form_matrix
from app.padic.context import Context
from app.padic.rational import from_sympy
from app.padic.valuation import INFINITY, Valuation, format_valuation
from app.series.multiseries import MultiSeries
from app.solver.ivp import SYMBOLIC, IVPProblem, initial_variable, ivp_solve
from app.solver.rational import min_root_abs, newton_polygon
from app.verification.certificate import Certificate, combine_verdict

logger = logging.getLogger("padic_darboux")


def _time_ring(omega0: KForm, *forms: KForm) -> Tuple[str, Tuple[str, ...]]:
    t = settings.time_variable
    if t in omega0.coords:
        raise FormError(f"time variable {t!r} collides with a coordinate")
    for a in forms:
        if a.coords != omega0.coords:
            raise FormError(f"forms over different coordinates: {omega0.coords} vs {a.coords}")
    return t, _union_vars((t,), omega0.coords, omega0.vars, *(a.vars for a in forms))


def _time_cap(vars, caps) -> Optional[int]:
    """Finite degree cap of the time variable in a ring, or None."""
    t = settings.time_variable
    if t not in vars:
        return None
    cap = caps[vars.index(t)]
    return None if cap is None or cap == INFINITY else cap


def moser_family(omega0: KForm, alpha: KForm, t_order: Optional[int] = None) -> KForm:
    """
    omega_t = omega0 + t alpha, as a 2-form with t among its parameters,
    capped at degree `t_order` in t when given.
    """
    t, names = _time_ring(omega0, alpha)
    a = alpha.align(names)
    caps = None if t_order is None else {t: t_order}
    time = MultiSeries.variable(t, names, a.order, a.center, caps=caps)
    return omega0.align(names) + a.scale(time)


def _defects(X: VectorField, omega_t: KForm, beta2: KForm) -> Tuple[KForm, KForm]:
    t = settings.time_variable
    contraction = contract(X, omega_t) + beta2
    identity = time_derivative(omega_t, t) + lie_derivative(X, omega_t)
    return contraction, identity


def moser_field(omega0: KForm, alpha: KForm, beta2: KForm, ctx: Optional[Context] = None) -> VectorField:
    """
    X_t = -(Omega0 + t A)^{-1} b solved over truncated series in (t, x),
    capped at degree ctx.Dt in t when a context is given.

    Both i_X omega_t + beta2 = 0 and alpha + L_X omega_t = 0 are checked
    exactly before returning.

    Raises:
        DegenerateFormError: omega0 is singular at the center
        HypothesisError: beta2 has terms of coordinate degree < 2
        IdentityError: either identity fails at truncation
    """
    t, names = _time_ring(omega0, alpha, beta2)
    low = beta2.min_coords_degree()
    if low < 2:
        raise HypothesisError(f"beta2 has coefficient terms of coordinate degree {low} < 2")

    omega_t = moser_family(omega0, alpha, ctx.Dt if ctx is not None else None)
    b = beta2.align(names)
    system = two_form_matrix(omega_t)
    components = system.solve(covector(b))
    X = VectorField(omega0.coords, components, vars=names, order=system.order)
    logger.info(f"moser_field: {len(omega0.coords)} coordinates, order {X.order}, t degree {X.degree_in(t)}")

    contraction, identity = _defects(X, omega_t, b)
    if not contraction.is_zero():
        raise IdentityError(f"i_X omega_t + beta2 has {len(contraction.terms)} nonzero coefficients")
    if not identity.is_zero():
        raise IdentityError(f"alpha + L_X omega_t has {len(identity.terms)} nonzero coefficients")
    return X


def moser_residuals(X: VectorField, omega0: KForm, alpha: KForm, beta2: KForm, ctx: Context) -> Dict[str, Valuation]:
    """
    Valuations of the contraction and Moser-identity defects (inf when
    exact), in the t truncation X itself carries.
    """
    _, names = _time_ring(omega0, alpha, beta2)
    omega_t = moser_family(omega0, alpha, _time_cap(X.vars, X.caps))
    contraction, identity = _defects(X, omega_t, beta2.align(names))
    return {
        "contraction": contraction.min_valuation(ctx),
        "moser_identity": identity.min_valuation(ctx),
    }


def t_convergence_evidence(omega0: KForm, alpha: KForm, ctx: Context) -> Certificate:
    """
    Root norms in t of det(Omega0(c) + t A(c)) at the chart center c.

    PASS when every root satisfies |t|_p > p^d, so the expansion of the
    inverse matrix in t converges past t = 1.
    """
    t = sympy.Symbol(settings.time_variable)
    m0 = rational_matrix(form_value_matrix(omega0))
    a0 = rational_matrix(form_value_matrix(alpha))
    det = sympy.expand((m0 + t * a0).det())
    notes = ["evaluated at the chart center only"]

    if det == 0:
        logger.info("t_convergence_evidence: determinant vanishes identically")
        return Certificate(
            name="t_convergence_evidence",
            verdict=combine_verdict(False),
            first_violation="det(Omega0 + t A) is identically zero",
            details={"d": ctx.d, "determinant": []},
            notes=notes,
        )

    coefficients = [from_sympy(c) for c in reversed(sympy.Poly(det, t).all_coeffs())]
    segments = newton_polygon(coefficients, ctx)
    smallest = min_root_abs(coefficients, ctx)
    ok = smallest > ctx.d
    verdict = combine_verdict(ok)
    logger.info(f"t_convergence_evidence: min root |t| = p^{format_valuation(smallest)}, d = {ctx.d}: {verdict.value}")
    return Certificate(
        name="t_convergence_evidence",
        verdict=verdict,
        first_violation=None if ok else f"root with |t|_p = p^{format_valuation(smallest)} <= p^{ctx.d}",
        details={
            "d": ctx.d,
            "determinant": [str(c) for c in coefficients],
            "slopes": [format_valuation(s.slope) for s in segments],
            "multiplicities": [s.multiplicity for s in segments],
            "min_root_abs_exponent": format_valuation(smallest),
        },
        notes=notes,
    )


def flow(X: VectorField, ctx: Context, order: Optional[int] = None) -> List[MultiSeries]:
    """
    Integrate dx/dt = X_t(x) with symbolic initial point, giving psi_t as
    series in (t, x_0 ...). A field capped in t integrates through t-degree
    Dt + 1 keeping its space order; an uncapped one is bounded by Dt + 1
    and its own order + 1 in total degree.

    Raises:
        HypothesisError: X has terms of coordinate degree <= 1
    """
    t = settings.time_variable
    names = _union_vars((t,), X.coords, X.vars)
    extra = [v for v in names if v != t and v not in X.coords]
    if extra:
        raise FormError(f"vector field depends on parameters {extra} besides {t!r}")
    X = X.align(names)
    if order is None:
        capped = _time_cap(X.vars, X.caps) is not None
        order = ctx.Dt + 1 if capped else min(ctx.Dt + 1, X.order + 1)

    prob = IVPProblem(
        rhs=list(X.components),
        x_var=t,
        y_vars=list(X.coords),
        initial=SYMBOLIC,
        certified=True,
    )
    solution = ivp_solve(prob, order)
    logger.info(
        f"flow: {len(X.coords)} components integrated to order {solution.order}, "
        f"t degree {max(s.degree_in(t) for s in solution.series)}"
    )
    return solution.series


def _split_time(residual: KForm, t: str) -> Tuple[KForm, KForm]:
    idx = residual.vars.index(t) if t in residual.vars else None
    moving, still = {}, {}
    for subset, c in residual.terms.items():
        hi = {e: v for e, v in c.terms.items() if idx is not None and e[idx] > 0}
        lo = {e: v for e, v in c.terms.items() if e not in hi}
        if hi:
            moving[subset] = MultiSeries._raw(c.vars, c.order, hi, c.center, c.caps)
        if lo:
            still[subset] = MultiSeries._raw(c.vars, c.order, lo, c.center, c.caps)
    ring = (residual.degree, residual.coords, residual.vars, residual.order, residual.center)
    return KForm._raw(*ring, moving, residual.caps), KForm._raw(*ring, still, residual.caps)


def verify_moser_constancy(psi: List[MultiSeries], omega0: KForm, alpha: KForm, ctx: Context) -> Certificate:
    """
    Check that psi_t^*(omega0 + t alpha) = omega0 exactly at truncation:
    every t-dependent coefficient vanishes and the t^0 part is omega0.

    For a flow capped in t the check runs through degree ctx.Dt in t and
    the residual order in the initial point; otherwise through one total
    degree in both.
    """
    t = settings.time_variable
    source = [initial_variable(c) for c in omega0.coords]
    capped = bool(psi) and _time_cap(psi[0].vars, psi[0].caps) is not None
    omega_t = moser_family(omega0, alpha, ctx.Dt if capped else None)
    pulled = pullback(psi, omega_t, source_coords=source)
    reference = omega0.rename(dict(zip(omega0.coords, source)))
    residual = pulled - reference.align(_union_vars(pulled.vars, reference.vars))
    moving, still = _split_time(residual, t)

    first = None
    for label, part in (("t-dependent", moving), ("t^0", still)):
        if not part.is_zero():
            subset, c = part.sorted_terms()[0]
            exponent, value = c.sorted_terms()[0]
            first = f"{label} coefficient {value} at {dict(zip(c.vars, exponent))} on dx{subset}"
            break

    verdict = combine_verdict(first is None)
    t_order = _time_cap(residual.vars, residual.caps)
    if t_order is None:
        note = f"terms of total degree above {residual.order} in ({t}, initial point) are unverified"
    else:
        note = (
            f"terms of degree above {residual.order} in the initial point "
            f"or above {t_order} in {t} are unverified"
        )
    logger.info(
        f"verify_moser_constancy through space order {residual.order}, "
        f"t order {t_order if t_order is not None else residual.order}: {verdict.value}"
    )
    return Certificate(
        name="moser_constancy",
        verdict=verdict,
        checked_through=residual.order,
        first_violation=first,
        details={
            "time_residual": format_valuation(moving.min_valuation(ctx)),
            "time_residual_terms": sum(len(c.terms) for c in moving.terms.values()),
            "initial_residual": format_valuation(still.min_valuation(ctx)),
            "initial_residual_terms": sum(len(c.terms) for c in still.terms.values()),
            "space_order": residual.order,
            "t_order": t_order if t_order is not None else residual.order,
            "flow_t_degree": max((s.degree_in(t) for s in psi if t in s.vars), default=0),
        },
        notes=[note],
    )
