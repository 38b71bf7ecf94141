"""
Structured verification results shared by the solver and pipeline stages.
"""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class Verdict(str, Enum):
    """Outcome of a check. FAIL and DIVERGENCE_WITNESS are reported, never raised."""

    PASS = "PASS"
    FAIL = "FAIL"
    CONSISTENT = "CONSISTENT"
    DIVERGENCE_WITNESS = "DIVERGENCE-WITNESS"


class Certificate(BaseModel):
    """Certificate schema."""

    name: str = Field(..., description="Check that produced this certificate")
    verdict: Verdict = Field(..., description="Outcome of the check")
    checked_through: Optional[int] = Field(None, description="Truncation order actually verified")
    first_violation: Optional[str] = Field(None, description="First offending index or term")
    details: Dict[str, Any] = Field(default_factory=dict, description="JSON-safe evidence")
    notes: List[str] = Field(default_factory=list, description="What the check does not establish")

    @property
    def passed(self) -> bool:
        return self.verdict in (Verdict.PASS, Verdict.CONSISTENT)


def combine_verdict(ok: bool) -> Verdict:
    return Verdict.PASS if ok else Verdict.FAIL
