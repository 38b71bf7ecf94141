"""Interchange documents and their JSON codec."""

from app.formats.codec import (
    document_to_form,
    document_to_series,
    dumps,
    field_to_document,
    form_to_document,
    ivp_problem,
    rational_problem,
    read_document,
    report_to_document,
    series_to_document,
    write_document,
)
from app.formats.schemas import (
    ExpansionDocument,
    FormDocument,
    IVPProblemDocument,
    PrimitiveDocument,
    RationalProblemDocument,
    ReportDocument,
    SeriesDocument,
    SolutionDocument,
    VectorFieldDocument,
)

__all__ = [
    "SeriesDocument",
    "FormDocument",
    "VectorFieldDocument",
    "RationalProblemDocument",
    "IVPProblemDocument",
    "ExpansionDocument",
    "SolutionDocument",
    "PrimitiveDocument",
    "ReportDocument",
    "series_to_document",
    "document_to_series",
    "form_to_document",
    "document_to_form",
    "field_to_document",
    "rational_problem",
    "ivp_problem",
    "report_to_document",
    "dumps",
    "write_document",
    "read_document",
]
