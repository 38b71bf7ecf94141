"""Exterior calculus over truncated series."""

from app.exterior.forms import (
    KForm,
    VectorField,
    contract,
    coordinate_differential,
    covector,
    exterior_d,
    function_form,
    lie_derivative,
    pullback,
    standard_symplectic,
    time_derivative,
    wedge,
)
from app.exterior.matrix import (
    FormMatrix,
    form_value_matrix,
    fraction_rows,
    is_skew,
    matrix_two_form,
    rational_matrix,
    two_form_matrix,
)

__all__ = [
    "KForm",
    "VectorField",
    "wedge",
    "exterior_d",
    "contract",
    "lie_derivative",
    "time_derivative",
    "pullback",
    "function_form",
    "coordinate_differential",
    "covector",
    "standard_symplectic",
    "FormMatrix",
    "two_form_matrix",
    "matrix_two_form",
    "form_value_matrix",
    "rational_matrix",
    "fraction_rows",
    "is_skew",
]
