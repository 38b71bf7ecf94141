"""
State carried through the Darboux stage graph.
TypedDict so that LangGraph merges the partial dicts each stage returns.
"""

from typing import Any, Dict, List, Optional, TypedDict

from app.exterior.forms import KForm, VectorField
from app.padic.context import Context
from app.series.multiseries import MultiSeries
from app.verification.certificate import Certificate


class DarbouxState(TypedDict, total=False):
    """
    State for the Darboux pipeline graph.

    total=False: every stage fills in only the fields it produces.
    """
    # Input fields
    ctx: Context
    omega1: KForm

    # Normalization
    coords: List[str]
    normalization: List[List[Any]]
    omega1_normalized: KForm
    omega0: KForm

    # Primitive and splitting
    alpha: KForm
    beta: KForm
    beta1: KForm
    beta2: KForm

    # Moser field and flow
    X: VectorField
    flow: List[MultiSeries]

    # Verification
    residuals: Dict[str, Any]
    certificates: Dict[str, Certificate]

    # Flow control
    stages: List[str]
    error: Optional[BaseException]
    failed_stage: Optional[str]
