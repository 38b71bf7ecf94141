"""Salerno / Ablowitz-Ladik symplectic form and its Darboux coordinates."""

from app.salerno.model import (
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

__all__ = [
    "SalernoParams",
    "Variant",
    "salerno_form",
    "alpha_form",
    "f_series",
    "f_ode_residual",
    "gamma_form",
    "closed_form_field",
    "field_residuals",
    "salerno_end_to_end",
]
