"""IVP solver and rational expansion with their certificates."""

from app.solver.ivp import (
    SYMBOLIC,
    CsTable,
    IVPProblem,
    IVPSolution,
    admissible_radius,
    check_bound,
    cs_table,
    initial_variable,
    ivp_solve,
)
from app.solver.rational import (
    NewtonSegment,
    check_decay,
    coefficient_list,
    min_root_abs,
    newton_polygon,
    polynomial,
    rational_expand,
)

__all__ = [
    "SYMBOLIC",
    "CsTable",
    "IVPProblem",
    "IVPSolution",
    "ivp_solve",
    "cs_table",
    "admissible_radius",
    "check_bound",
    "initial_variable",
    "NewtonSegment",
    "rational_expand",
    "newton_polygon",
    "min_root_abs",
    "check_decay",
    "coefficient_list",
    "polynomial",
]
