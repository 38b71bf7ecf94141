"""
Interchange document schemas.

Integers and rationals travel as decimal strings ("num" or "num/den") so
that coefficients of any size round-trip exactly. Term lists are written
sorted, which makes the JSON output of identical inputs byte-identical.
"""

from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator

from app.padic.rational import parse_rational
from app.verification.certificate import Certificate

ValuationText = Union[int, str]


def _check_rational(value: str) -> str:
    parse_rational(value)
    return value


def _rational_list(value: Any) -> List[str]:
    if not isinstance(value, (list, tuple)):
        raise ValueError(f"expected a list of rationals, got {value!r}")
    return [_check_rational(str(v)) for v in value]


class TermDocument(BaseModel):
    """One monomial coefficient of a series."""

    exponents: List[int] = Field(..., description="Exponent per variable, in `vars` order")
    numerator: str = Field(..., description="Coefficient numerator, decimal")
    denominator: str = Field("1", description="Coefficient denominator, decimal")

    @field_validator("numerator", "denominator", mode="before")
    @classmethod
    def _integer_text(cls, value: Any) -> str:
        text = str(value)
        if isinstance(value, bool) or not text.lstrip("-").isdigit():
            raise ValueError(f"expected a decimal integer, got {value!r}")
        return text


class SeriesDocument(BaseModel):
    """Truncated multivariate power series."""

    p: Optional[int] = Field(None, description="Prime the series was produced for")
    vars: List[str] = Field(..., description="Variable names")
    order: int = Field(..., ge=0, description="Inclusive total-degree truncation over the uncapped variables")
    caps: Dict[str, int] = Field(default_factory=dict, description="Separate degree cap per variable, if any")
    center: List[str] = Field(default_factory=list, description="Expansion point, one rational per variable")
    terms: List[TermDocument] = Field(default_factory=list, description="Nonzero coefficients, sorted")

    @field_validator("center", mode="before")
    @classmethod
    def _rationals(cls, value: Any) -> List[str]:
        return _rational_list(value)

    @field_validator("caps")
    @classmethod
    def _caps(cls, value: Dict[str, int]) -> Dict[str, int]:
        negative = sorted(v for v, cap in value.items() if cap < 0)
        if negative:
            raise ValueError(f"degree caps must be >= 0, got negative caps for {negative}")
        return value


class FormTermDocument(BaseModel):
    subset: List[int] = Field(..., description="Strictly increasing 0-based coordinate indices")
    series: SeriesDocument = Field(..., description="Coefficient of dx_subset")


class FormDocument(BaseModel):
    """Differential k-form with series coefficients."""

    p: Optional[int] = Field(None, description="Prime the form was produced for")
    degree: int = Field(..., ge=0, description="Form degree k")
    coords: List[str] = Field(..., description="Differential directions")
    vars: List[str] = Field(..., description="Ring variables (coords plus parameters)")
    order: int = Field(..., ge=0, description="Inclusive total-degree truncation")
    center: List[str] = Field(default_factory=list, description="Expansion point")
    terms: List[FormTermDocument] = Field(default_factory=list, description="Nonzero coefficients, sorted")


class VectorFieldDocument(BaseModel):
    coords: List[str] = Field(..., description="Directions d/dx_i")
    vars: List[str] = Field(..., description="Ring variables")
    order: int = Field(..., ge=0, description="Inclusive total-degree truncation")
    components: List[SeriesDocument] = Field(..., description="Component series, one per coordinate")


class RationalProblemDocument(BaseModel):
    """Input of expand-rational: numerator / denominator as coefficient lists."""

    p: int = Field(..., description="Prime")
    var: str = Field("x", description="Expansion variable")
    numerator: List[str] = Field(default_factory=lambda: ["1"], description="b_0, b_1, ... low to high")
    denominator: List[str] = Field(..., min_length=1, description="Coefficients low to high")
    order: Optional[int] = Field(None, ge=0, description="Expansion order (overrides the CLI default)")
    radius_claim: Optional[int] = Field(None, description="Claimed radius exponent R for the decay check")

    @field_validator("numerator", "denominator", mode="before")
    @classmethod
    def _rationals(cls, value: Any) -> List[str]:
        return _rational_list(value)


class IVPProblemDocument(BaseModel):
    """Input of solve-ivp."""

    p: int = Field(..., description="Prime")
    x_var: str = Field("x", description="Independent variable")
    y_vars: List[str] = Field(..., min_length=1, description="Unknowns")
    x0: str = Field("0", description="Initial point")
    v: Optional[List[str]] = Field(None, description="Ball center; zero when omitted")
    initial: Union[Literal["symbolic"], List[str]] = Field(..., description="y(x0), or \"symbolic\"")
    certified: bool = Field(False, description="Enforce the y-degree >= 2 hypothesis")
    rhs: List[SeriesDocument] = Field(..., description="f_i in the variables (x_var, *y_vars)")

    @field_validator("x0", mode="before")
    @classmethod
    def _rational(cls, value: Any) -> str:
        return _check_rational(str(value))


class ExpansionDocument(BaseModel):
    """Output of expand-rational."""

    p: int
    series: SeriesDocument
    newton_slopes: List[ValuationText] = Field(..., description="Newton polygon slopes of the denominator")
    newton_multiplicities: List[int]
    min_root_abs_exponent: ValuationText = Field(..., description="R with p^R the smallest root norm")
    certificate: Certificate


class SolutionDocument(BaseModel):
    """Output of solve-ivp."""

    p: int
    order: int = Field(..., description="Number of coefficients computed past a_0")
    radius_exponent: Optional[int] = Field(None, description="Radius exponent used by the bound check")
    series: List[SeriesDocument]
    oracle: Optional[Dict[str, Any]] = Field(None, description="Coefficient comparison against a closed form")
    certificates: List[Certificate] = Field(default_factory=list)


class PrimitiveDocument(BaseModel):
    """Output of primitive."""

    p: int
    alpha: FormDocument
    beta: FormDocument
    residual: ValuationText = Field(..., description="Valuation of d(beta) - alpha; inf when exact")


class ReportDocument(BaseModel):
    """A Darboux pipeline run."""

    p: int
    order: int
    t_order: int
    d: int
    coords: List[str]
    succeeded: bool
    certified: bool
    residuals: Dict[str, ValuationText] = Field(..., description="Defect valuation per checked identity")
    normalization: List[List[str]] = Field(..., description="P with P^T M P = J0")
    certificates: List[Certificate] = Field(default_factory=list)
    comparison: Optional[Dict[str, Any]] = None
    omega1: FormDocument
    alpha: FormDocument
    beta2: FormDocument
    field: VectorFieldDocument
    flow: List[SeriesDocument]
