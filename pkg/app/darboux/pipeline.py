"""
Darboux coordinates for a closed nondegenerate 2-form on one chart.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional

from app.darboux.graph_builder import DarbouxGraphBuilder
from app.exceptions import StageError
from app.exterior.forms import KForm, VectorField
from app.logger import log_with_context
from app.padic.context import Context
from app.padic.valuation import INFINITY
from app.series.multiseries import MultiSeries
from app.verification.certificate import Certificate

logger = logging.getLogger("padic_darboux")


@dataclass
class DarbouxReport:
    """
    Everything a run produced.

    `residuals` maps each checked identity to the valuation of its defect
    (math.inf when the defect is exactly zero at truncation):
    normalization (P^T M P - J0), primitive (d beta - alpha),
    linear_part (d beta1), primitive_high (d beta2 - alpha),
    contraction (i_X omega_t + beta2), moser_identity (alpha + L_X omega_t),
    constancy_time and constancy_initial (t-dependent and t^0 parts of
    psi_t^* omega_t - omega0).
    """

    ctx: Context
    coords: List[str]
    omega1: KForm
    omega0: KForm
    normalization: List[List[Fraction]]
    alpha: KForm
    beta: KForm
    beta1: KForm
    beta2: KForm
    X: VectorField
    flow: List[MultiSeries]
    residuals: Dict[str, Any] = field(default_factory=dict)
    certificates: Dict[str, Certificate] = field(default_factory=dict)
    comparison: Optional[Dict[str, Any]] = None

    @property
    def succeeded(self) -> bool:
        """All identities exact and psi_t^* omega_t constant."""
        constancy = self.certificates.get("moser_constancy")
        return all(v == INFINITY for v in self.residuals.values()) and bool(constancy and constancy.passed)

    @property
    def certified(self) -> bool:
        """succeeded, and the convergence-in-t evidence passed as well."""
        evidence = self.certificates.get("t_convergence_evidence")
        return self.succeeded and bool(evidence and evidence.passed)


def darboux_transform(omega1: KForm, ctx: Context) -> DarbouxReport:
    """
    Run every stage on omega1 with omega0 = sum_i dx_{2i} ^ dx_{2i+1}.

    Raises:
        StageError: a stage rejected its input; `.stage` names it and
            `.cause` is the original PadicError
    """
    logger.info(f"darboux_transform: {len(omega1.coords)} coordinates, p={ctx.p}, D={ctx.D}, Dt={ctx.Dt}")
    state = DarbouxGraphBuilder(ctx).invoke({"omega1": omega1})
    error = state.get("error")
    if error is not None:
        raise StageError(state["failed_stage"], error) from error

    report = DarbouxReport(
        ctx=ctx,
        coords=state["coords"],
        omega1=omega1,
        omega0=state["omega0"],
        normalization=state["normalization"],
        alpha=state["alpha"],
        beta=state["beta"],
        beta1=state["beta1"],
        beta2=state["beta2"],
        X=state["X"],
        flow=state["flow"],
        residuals=dict(state["residuals"]),
        certificates=dict(state["certificates"]),
    )
    log_with_context(
        "darboux_transform finished",
        succeeded=report.succeeded,
        certified=report.certified,
        residuals={name: str(v) for name, v in report.residuals.items()},
    )
    return report
