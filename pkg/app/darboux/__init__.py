"""Darboux normal form: normalization, primitives, Moser field, flow and checks."""

from app.darboux.graph_builder import DarbouxGraphBuilder
from app.darboux.linear import normalization_residual, standard_matrix, symplectic_normalize
from app.darboux.moser import (
    flow,
    moser_family,
    moser_field,
    moser_residuals,
    t_convergence_evidence,
    verify_moser_constancy,
)
from app.darboux.pipeline import DarbouxReport, darboux_transform
from app.darboux.primitive import poincare_primitive, split_linear

__all__ = [
    "symplectic_normalize",
    "standard_matrix",
    "normalization_residual",
    "poincare_primitive",
    "split_linear",
    "moser_family",
    "moser_field",
    "moser_residuals",
    "t_convergence_evidence",
    "flow",
    "verify_moser_constancy",
    "DarbouxGraphBuilder",
    "DarbouxReport",
    "darboux_transform",
]
