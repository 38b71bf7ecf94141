"""
Conversion between in-memory objects and interchange documents, and
reading/writing them as JSON files.
"""

import logging
from pathlib import Path
from typing import List, Optional, Tuple, Type, TypeVar, Union

from pydantic import BaseModel

from app.darboux.pipeline import DarbouxReport
from app.exterior.forms import KForm, VectorField
from app.formats.schemas import (
    FormDocument,
    FormTermDocument,
    IVPProblemDocument,
    RationalProblemDocument,
    ReportDocument,
    SeriesDocument,
    TermDocument,
    VectorFieldDocument,
)
from app.padic.rational import format_rational, parse_rational
from app.padic.valuation import format_valuation
from app.series.multiseries import MultiSeries
from app.solver.ivp import SYMBOLIC, IVPProblem
from app.solver.rational import polynomial

logger = logging.getLogger("padic_darboux")

Document = TypeVar("Document", bound=BaseModel)


def series_to_document(series: MultiSeries, p: Optional[int] = None) -> SeriesDocument:
    return SeriesDocument(
        p=p,
        vars=list(series.vars),
        order=series.order,
        caps=series.degree_caps(),
        center=[format_rational(c) for c in series.center],
        terms=[
            TermDocument(exponents=list(e), numerator=str(c.numerator), denominator=str(c.denominator))
            for e, c in series.sorted_terms()
        ],
    )


def document_to_series(doc: SeriesDocument) -> MultiSeries:
    terms = {}
    for term in doc.terms:
        if len(term.exponents) != len(doc.vars):
            raise ValueError(f"term {term.exponents} does not match variables {doc.vars}")
        key = tuple(term.exponents)
        if key in terms:
            raise ValueError(f"duplicate term {term.exponents}")
        terms[key] = parse_rational(f"{term.numerator}/{term.denominator}")
    center = [parse_rational(c) for c in doc.center] if doc.center else None
    return MultiSeries(doc.vars, doc.order, terms, center, doc.caps or None)


def form_to_document(form: KForm, p: Optional[int] = None) -> FormDocument:
    return FormDocument(
        p=p,
        degree=form.degree,
        coords=list(form.coords),
        vars=list(form.vars),
        order=form.order,
        center=[format_rational(c) for c in form.center],
        terms=[FormTermDocument(subset=list(s), series=series_to_document(c)) for s, c in form.sorted_terms()],
    )


def document_to_form(doc: FormDocument) -> KForm:
    terms = {tuple(t.subset): document_to_series(t.series) for t in doc.terms}
    center = [parse_rational(c) for c in doc.center] if doc.center else None
    return KForm(doc.degree, doc.coords, terms, vars=doc.vars, order=doc.order, center=center)


def field_to_document(X: VectorField) -> VectorFieldDocument:
    return VectorFieldDocument(
        coords=list(X.coords),
        vars=list(X.vars),
        order=X.order,
        components=[series_to_document(c) for c in X.components],
    )


def rational_problem(doc: RationalProblemDocument, order: int) -> Tuple[MultiSeries, MultiSeries]:
    """(numerator, denominator) as univariate polynomials in doc.var."""
    numerator = polynomial([parse_rational(c) for c in doc.numerator], doc.var, order)
    denominator = polynomial([parse_rational(c) for c in doc.denominator], doc.var, order)
    return numerator, denominator


def ivp_problem(doc: IVPProblemDocument) -> IVPProblem:
    initial: Union[str, List] = SYMBOLIC if doc.initial == SYMBOLIC else [parse_rational(c) for c in doc.initial]
    return IVPProblem(
        rhs=[document_to_series(f) for f in doc.rhs],
        x_var=doc.x_var,
        y_vars=doc.y_vars,
        initial=initial,
        x0=parse_rational(doc.x0),
        v=[parse_rational(c) for c in doc.v] if doc.v is not None else None,
        certified=doc.certified,
    )


def report_to_document(report: DarbouxReport) -> ReportDocument:
    ctx = report.ctx
    return ReportDocument(
        p=ctx.p,
        order=ctx.D,
        t_order=ctx.Dt,
        d=ctx.d,
        coords=list(report.coords),
        succeeded=report.succeeded,
        certified=report.certified,
        residuals={name: format_valuation(v) for name, v in report.residuals.items()},
        normalization=[[format_rational(x) for x in row] for row in report.normalization],
        certificates=list(report.certificates.values()),
        comparison=report.comparison,
        omega1=form_to_document(report.omega1, ctx.p),
        alpha=form_to_document(report.alpha, ctx.p),
        beta2=form_to_document(report.beta2, ctx.p),
        field=field_to_document(report.X),
        flow=[series_to_document(s, ctx.p) for s in report.flow],
    )


def dumps(doc: BaseModel) -> str:
    """Deterministic JSON text of a document."""
    return doc.model_dump_json(indent=2) + "\n"


def write_document(doc: BaseModel, path: Optional[Union[str, Path]] = None) -> str:
    """Serialize `doc`; also write it to `path` when given."""
    text = dumps(doc)
    if path is not None:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
        logger.info(f"Wrote {type(doc).__name__} to {target}")
    return text


def read_document(path: Union[str, Path], model: Type[Document]) -> Document:
    """
    Load and validate a JSON document.

    Raises:
        FileNotFoundError: missing file
        pydantic.ValidationError: malformed document
    """
    text = Path(path).read_text(encoding="utf-8")
    return model.model_validate_json(text)
