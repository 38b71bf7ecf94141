"""
Stage functions of the Darboux graph. Each takes the current state and
returns only the fields it adds.
"""

import logging
from fractions import Fraction
from typing import Any, Dict

from app.darboux.linear import normalization_residual, symplectic_normalize
from app.darboux.moser import (
    flow,
    moser_field,
    moser_residuals,
    t_convergence_evidence,
    verify_moser_constancy,
)
from app.darboux.primitive import poincare_primitive, split_linear
from app.exceptions import FormError, HypothesisError
from app.exterior.forms import exterior_d, pullback, standard_symplectic
from app.exterior.matrix import form_value_matrix
from app.padic.valuation import INFINITY, parse_valuation, valuation
from app.series.multiseries import MultiSeries

logger = logging.getLogger("padic_darboux")


def _with(state: Dict[str, Any], key: str, **values) -> Dict[str, Any]:
    merged = dict(state.get(key) or {})
    merged.update(values)
    return merged


def _done(state: Dict[str, Any], stage: str) -> list:
    return list(state.get("stages") or []) + [stage]


def normalize_node(state: Dict[str, Any]) -> Dict[str, Any]:
    """A constant linear change of coordinates making omega1 standard at the center."""
    omega1 = state["omega1"]
    ctx = state["ctx"]
    if omega1.degree != 2:
        raise FormError(f"expected a 2-form, got degree {omega1.degree}")
    if omega1.parameters:
        raise FormError(f"form depends on parameters {omega1.parameters}")
    if any(c != 0 for c in omega1.center):
        raise FormError("form must be centered at the origin")
    if omega1.order >= 1 and not exterior_d(omega1).is_zero():
        raise HypothesisError("form is not closed at truncation")

    m = form_value_matrix(omega1)
    p = symplectic_normalize(m, ctx)
    residual = normalization_residual(m, p)
    n = len(p)
    normalized = omega1
    if any(p[i][j] != Fraction(int(i == j)) for i in range(n) for j in range(n)):
        mapping = []
        for i in range(n):
            terms = {}
            for j in range(n):
                if p[i][j]:
                    exponent = [0] * len(omega1.vars)
                    exponent[omega1.vars.index(omega1.coords[j])] = 1
                    terms[tuple(exponent)] = p[i][j]
            mapping.append(MultiSeries(omega1.vars, omega1.order, terms))
        normalized = pullback(mapping, omega1, exact_map=True)

    omega0 = standard_symplectic(omega1.coords, normalized.order, vars=normalized.vars)
    worst = min((valuation(x, ctx) for row in residual for x in row), default=INFINITY)
    logger.info(f"normalize: {n} coordinates, identity={normalized is omega1}")
    return {
        "coords": list(omega1.coords),
        "normalization": p,
        "omega1_normalized": normalized,
        "omega0": omega0,
        "residuals": _with(state, "residuals", normalization=worst),
        "stages": _done(state, "normalize"),
    }


def alpha_node(state: Dict[str, Any]) -> Dict[str, Any]:
    """alpha = omega1 - omega0, vanishing at the center."""
    alpha = state["omega1_normalized"] - state["omega0"]
    return {"alpha": alpha, "stages": _done(state, "alpha")}


def primitive_node(state: Dict[str, Any]) -> Dict[str, Any]:
    ctx = state["ctx"]
    alpha = state["alpha"]
    beta = poincare_primitive(alpha, ctx)
    defect = exterior_d(beta) - alpha
    return {
        "beta": beta,
        "residuals": _with(state, "residuals", primitive=defect.min_valuation(ctx)),
        "stages": _done(state, "primitive"),
    }


def split_node(state: Dict[str, Any]) -> Dict[str, Any]:
    """The linear part of beta is closed, so beta2 alone is a primitive of alpha."""
    ctx = state["ctx"]
    beta1, beta2 = split_linear(state["beta"])
    linear = exterior_d(beta1).min_valuation(ctx) if beta1.order >= 1 else INFINITY
    high = (exterior_d(beta2) - state["alpha"]).min_valuation(ctx)
    return {
        "beta1": beta1,
        "beta2": beta2,
        "residuals": _with(state, "residuals", linear_part=linear, primitive_high=high),
        "stages": _done(state, "split"),
    }


def moser_node(state: Dict[str, Any]) -> Dict[str, Any]:
    ctx = state["ctx"]
    X = moser_field(state["omega0"], state["alpha"], state["beta2"], ctx)
    found = moser_residuals(X, state["omega0"], state["alpha"], state["beta2"], ctx)
    return {
        "X": X,
        "residuals": _with(state, "residuals", **found),
        "stages": _done(state, "moser"),
    }


def t_evidence_node(state: Dict[str, Any]) -> Dict[str, Any]:
    certificate = t_convergence_evidence(state["omega0"], state["alpha"], state["ctx"])
    return {
        "certificates": _with(state, "certificates", t_convergence_evidence=certificate),
        "stages": _done(state, "t_evidence"),
    }


def flow_node(state: Dict[str, Any]) -> Dict[str, Any]:
    return {"flow": flow(state["X"], state["ctx"]), "stages": _done(state, "flow")}


def constancy_node(state: Dict[str, Any]) -> Dict[str, Any]:
    """psi_t^* omega_t must have no t-dependence and start at omega0."""
    ctx = state["ctx"]
    certificate = verify_moser_constancy(state["flow"], state["omega0"], state["alpha"], ctx)
    details = certificate.details
    return {
        "certificates": _with(state, "certificates", moser_constancy=certificate),
        "residuals": _with(
            state,
            "residuals",
            constancy_time=parse_valuation(details["time_residual"]),
            constancy_initial=parse_valuation(details["initial_residual"]),
        ),
        "stages": _done(state, "constancy"),
    }
