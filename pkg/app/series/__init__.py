"""Truncated multivariate power series."""

from app.series.functions import (
    CoeffSup,
    coeff_sup,
    converges_on_ball,
    exp_convergence,
    exp_series,
    log1p_series,
)
from app.series.multiseries import (
    MultiSeries,
    add,
    compose,
    inverse,
    monomial,
    mul,
    partial_derivative,
    recenter,
    scalar_mul,
    sub,
)

__all__ = [
    "MultiSeries",
    "add",
    "sub",
    "mul",
    "scalar_mul",
    "inverse",
    "compose",
    "partial_derivative",
    "recenter",
    "monomial",
    "CoeffSup",
    "coeff_sup",
    "converges_on_ball",
    "exp_convergence",
    "exp_series",
    "log1p_series",
]
