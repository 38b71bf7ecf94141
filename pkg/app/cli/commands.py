"""
Command-line surface.

Exit codes: 0 success, 1 input error, 2 certificate or residual failure,
3 violated hypothesis. JSON documents go to --out or stdout; the summary
tables go to stderr.
"""

import logging
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional

import click
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from app.config import settings
from app.darboux.pipeline import DarbouxReport, darboux_transform
from app.darboux.primitive import poincare_primitive
from app.exceptions import (
    ContextError,
    HypothesisError,
    IdentityError,
    PadicError,
    StageError,
)
from app.exterior.forms import KForm, exterior_d, standard_symplectic
from app.formats.codec import (
    document_to_form,
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
    SolutionDocument,
)
from app.models.profiles import RunProfile, RunProfiles
from app.padic.context import Context
from app.padic.rational import parse_rational
from app.padic.valuation import INFINITY, distance_valuation, format_valuation
from app.salerno.model import SalernoParams, Variant, field_residuals, salerno_end_to_end
from app.series.functions import log1p_series
from app.series.multiseries import MultiSeries, compose
from app.solver.ivp import IVPProblem, IVPSolution, admissible_radius, check_bound, ivp_solve
from app.solver.rational import check_decay, min_root_abs, newton_polygon, rational_expand
from app.verification.certificate import Certificate

logger = logging.getLogger("padic_darboux")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_CERTIFICATE = 2
EXIT_HYPOTHESIS = 3

app = typer.Typer(
    name="padic-darboux",
    help="Exact p-adic series, forms and Darboux coordinates.",
    no_args_is_help=True,
    add_completion=False,
)
console = Console(stderr=True)


class Example(str, Enum):
    worked = "worked"


class FormExample(str, Enum):
    standard = "standard"
    smoke = "smoke"


class Oracle(str, Enum):
    closed_form = "closed-form"


def exit_code_for(exc: BaseException) -> int:
    """Exit code of a failed run; usage errors count as input errors."""
    if isinstance(exc, click.exceptions.UsageError):
        return EXIT_INPUT
    if isinstance(exc, StageError) and exc.cause is not None:
        return exit_code_for(exc.cause)
    if isinstance(exc, HypothesisError):
        return EXIT_HYPOTHESIS
    if isinstance(exc, IdentityError):
        return EXIT_CERTIFICATE
    return EXIT_INPUT


def _abort(exc: BaseException) -> None:
    code = exit_code_for(exc)
    logger.error(f"{type(exc).__name__}: {exc}")
    console.print(f"[bold red]error[/bold red] ({type(exc).__name__}): {exc}")
    raise typer.Exit(code)


def _first(*values):
    return next((v for v in values if v is not None), None)


def _context(prime: Optional[int], order: Optional[int], t_order: Optional[int],
             max_order: Optional[int], run: Optional[RunProfile] = None,
             default_prime: Optional[int] = None, default_order: Optional[int] = None) -> Context:
    """Flags first, then the profile's context, then the input document, then settings."""
    base = run.context() if run is not None else None
    ctx = Context.from_settings(
        _first(prime, base.p if base is not None else None, default_prime),
        _first(order, base.D if base is not None else None, default_order),
        _first(t_order, base.Dt if base is not None else None),
    )
    limit = max_order if max_order is not None else settings.max_order
    if ctx.D > limit or ctx.Dt > limit:
        raise ContextError(f"orders ({ctx.D}, {ctx.Dt}) exceed --max-order {limit}")
    return ctx


def _profile(name: Optional[str]) -> Optional[RunProfile]:
    if name is None:
        return None
    return RunProfiles(settings.profiles_path).get_profile(name)


def _pick(flag, profile: Optional[RunProfile], attribute: str):
    if flag is not None:
        return flag
    if profile is not None:
        return getattr(profile, attribute)
    return None


def _emit(doc, out: Optional[Path]) -> None:
    text = write_document(doc, out)
    if out is None:
        typer.echo(text, nl=False)


def _certificate_table(certificates: List[Certificate]) -> Table:
    table = Table(title="Certificates", show_header=True, header_style="bold magenta")
    table.add_column("check")
    table.add_column("verdict")
    table.add_column("through")
    table.add_column("first violation")
    for c in certificates:
        style = "green" if c.passed else "red"
        table.add_row(c.name, f"[{style}]{c.verdict.value}[/{style}]",
                      "-" if c.checked_through is None else str(c.checked_through),
                      c.first_violation or "")
    return table


def _residual_table(residuals: Dict[str, object]) -> Table:
    table = Table(title="Residuals (valuation of defect)", show_header=True, header_style="bold magenta")
    table.add_column("identity")
    table.add_column("valuation")
    table.add_column("exact")
    for name, v in residuals.items():
        exact = v == INFINITY
        table.add_row(name, str(format_valuation(v)), "[green]yes[/green]" if exact else "[red]no[/red]")
    return table


# ----------------------------------------------------------------------
# expand-rational
# ----------------------------------------------------------------------


def _coefficients(text: str) -> List[Fraction]:
    return [parse_rational(c) for c in text.split(",")]


@app.command("expand-rational")
def expand_rational(
    input_path: Optional[Path] = typer.Option(None, "--in", help="RationalProblemDocument JSON"),
    denominator: Optional[str] = typer.Option(None, help="Denominator coefficients low to high, comma separated"),
    numerator: str = typer.Option("1", help="Numerator coefficients low to high, comma separated"),
    prime: Optional[int] = typer.Option(None, "--prime", "-p", help="Prime p"),
    order: Optional[int] = typer.Option(None, "--order", help="Expansion order"),
    radius_claim: Optional[str] = typer.Option(None, "--radius-claim", help="Claimed radius exponent R for the decay check"),
    max_order: Optional[int] = typer.Option(None, "--max-order", help="Order guard"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output path (stdout when omitted)"),
):
    """Expand numerator/denominator, locate the roots and check coefficient decay."""
    try:
        if input_path is not None:
            doc = read_document(input_path, RationalProblemDocument)
        elif denominator is not None:
            doc = RationalProblemDocument(
                p=prime if prime is not None else settings.default_prime,
                numerator=numerator.split(","),
                denominator=denominator.split(","),
            )
        else:
            raise ContextError("give --in or --denominator")
        ctx = _context(prime, order, None, max_order, default_prime=doc.p, default_order=doc.order)
        num, den = rational_problem(doc, ctx.D)
        series = rational_expand(num, den, ctx.D)
        segments = newton_polygon(den, ctx)
        smallest = min_root_abs(den, ctx)
        claim = radius_claim if radius_claim is not None else doc.radius_claim
        if claim is not None:
            radius = parse_rational(str(claim))
        else:
            radius = smallest if smallest not in (INFINITY, -INFINITY) else 0
        certificate = check_decay(series, radius, ctx)
    except (PadicError, ValueError, ValidationError, FileNotFoundError) as e:
        _abort(e)

    _emit(ExpansionDocument(
        p=ctx.p,
        series=series_to_document(series, ctx.p),
        newton_slopes=[format_valuation(s.slope) for s in segments],
        newton_multiplicities=[s.multiplicity for s in segments],
        min_root_abs_exponent=format_valuation(smallest),
        certificate=certificate,
    ), out)
    console.print(_certificate_table([certificate]))
    raise typer.Exit(EXIT_OK if certificate.passed else EXIT_CERTIFICATE)


# ----------------------------------------------------------------------
# solve-ivp
# ----------------------------------------------------------------------


def worked_example(ctx: Context, initial) -> IVPProblem:
    """
    y' = y^2 / (1 - x), y(0) = initial.

    The right-hand side is built through total degree D + 2 so that every
    x^k y^2 with k <= D is present: re-expanding about y0 costs two degrees.
    """
    rhs = MultiSeries(("x", "y"), ctx.D + 2, {(k, 2): Fraction(1) for k in range(ctx.D + 1)})
    return IVPProblem(rhs=[rhs], x_var="x", y_vars=["y"], initial=initial, certified=True)


def worked_oracle(sol: IVPSolution) -> Dict[str, object]:
    """Compare with the expansion of 1/(1/y0 + log(1 - x))."""
    y0 = sol.problem.initial[0]
    order = sol.order
    if y0 == 0:
        expected = MultiSeries.zero(("x",), order)
    else:
        x = MultiSeries.variable("x", ("x",), order)
        expected = (compose(log1p_series(order, "x"), [-x]) + 1 / y0).inverse()
    mismatches = [j for j in range(order + 1) if sol.coefficient(0, j) != expected.coefficient((j,))]
    return {
        "name": "closed-form",
        "checked_through": order,
        "matches": not mismatches,
        "mismatches": mismatches,
    }


@app.command("solve-ivp")
def solve_ivp(
    input_path: Optional[Path] = typer.Option(None, "--in", help="IVPProblemDocument JSON"),
    example: Optional[Example] = typer.Option(None, "--example", help="Built-in problem"),
    initial: Optional[str] = typer.Option(None, "--initial", help="Initial value for --example (rational or 'symbolic'); default p"),
    prime: Optional[int] = typer.Option(None, "--prime", "-p", help="Prime p"),
    order: Optional[int] = typer.Option(None, "--order", help="Number of coefficients"),
    radius: Optional[int] = typer.Option(None, "--radius", help="Radius exponent e for the bound check (r = p^e)"),
    oracle: Optional[Oracle] = typer.Option(None, "--oracle", help="Closed-form comparison (worked example only)"),
    max_order: Optional[int] = typer.Option(None, "--max-order", help="Order guard"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output path (stdout when omitted)"),
):
    """Solve an analytic IVP as power series and certify the coefficient bound."""
    certificates: List[Certificate] = []
    comparison = None
    radius_used = None
    try:
        if input_path is not None:
            doc = read_document(input_path, IVPProblemDocument)
            ctx = _context(prime, order, None, max_order, default_prime=doc.p)
            prob = ivp_problem(doc)
        elif example is not None:
            ctx = _context(prime, order, None, max_order)
            text = initial if initial is not None else str(ctx.p)
            prob = worked_example(ctx, "symbolic" if text == "symbolic" else [parse_rational(text)])
        else:
            raise ContextError("give --in or --example")
        if oracle is not None and (example is None or prob.symbolic):
            raise ContextError("--oracle needs --example worked with a concrete initial value")

        sol = ivp_solve(prob, ctx.D)
        if not prob.symbolic:
            if radius is not None:
                radius_used = radius
            else:
                admissible = admissible_radius(prob, ctx)
                dist = distance_valuation(prob.initial, prob.v, ctx)
                radius_used = admissible if dist == INFINITY else min(-dist, admissible)
                if -dist > admissible:
                    raise HypothesisError(
                        f"initial value at distance p^{-dist} exceeds the admissible radius p^{admissible}"
                    )
            sol.radius_exponent = radius_used
            certificates.append(check_bound(sol, radius_used, ctx))
        if oracle is not None:
            comparison = worked_oracle(sol)
    except (PadicError, ValueError, ValidationError, FileNotFoundError) as e:
        _abort(e)

    _emit(SolutionDocument(
        p=ctx.p,
        order=sol.order,
        radius_exponent=radius_used,
        series=[series_to_document(s, ctx.p) for s in sol.series],
        oracle=comparison,
        certificates=certificates,
    ), out)
    if certificates:
        console.print(_certificate_table(certificates))
    if comparison is not None:
        table = Table(title="Closed-form oracle", show_header=True, header_style="bold magenta")
        table.add_column("j")
        table.add_column("a_j")
        table.add_column("match")
        for j in range(sol.order + 1):
            ok = j not in comparison["mismatches"]
            table.add_row(str(j), str(sol.coefficient(0, j)), "[green]yes[/green]" if ok else "[red]no[/red]")
        console.print(table)

    ok = all(c.passed for c in certificates) and (comparison is None or comparison["matches"])
    raise typer.Exit(EXIT_OK if ok else EXIT_CERTIFICATE)


# ----------------------------------------------------------------------
# primitive
# ----------------------------------------------------------------------


@app.command("primitive")
def primitive(
    input_path: Path = typer.Option(..., "--in", help="FormDocument JSON of a closed form"),
    prime: Optional[int] = typer.Option(None, "--prime", "-p", help="Prime p"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output path (stdout when omitted)"),
):
    """Radial primitive beta of a closed form alpha, with d(beta) - alpha checked."""
    try:
        doc = read_document(input_path, FormDocument)
        ctx = Context.from_settings(prime if prime is not None else doc.p)
        alpha = document_to_form(doc)
        beta = poincare_primitive(alpha, ctx)
        defect = (exterior_d(beta) - alpha).min_valuation(ctx)
    except (PadicError, ValueError, ValidationError, FileNotFoundError) as e:
        _abort(e)

    _emit(PrimitiveDocument(
        p=ctx.p,
        alpha=form_to_document(alpha, ctx.p),
        beta=form_to_document(beta, ctx.p),
        residual=format_valuation(defect),
    ), out)
    console.print(_residual_table({"primitive": defect}))
    raise typer.Exit(EXIT_OK if defect == INFINITY else EXIT_CERTIFICATE)


# ----------------------------------------------------------------------
# darboux / salerno
# ----------------------------------------------------------------------


def example_form(name: FormExample, ctx: Context) -> KForm:
    coords = ("x1", "y1")
    omega0 = standard_symplectic(coords, ctx.D)
    if name is FormExample.standard:
        return omega0
    # (1 + x1) dx1 ^ dy1
    x = MultiSeries.variable("x1", coords, ctx.D)
    return KForm(2, coords, {(0, 1): x + 1}, order=ctx.D)


def _report(report: DarbouxReport, out: Optional[Path]) -> None:
    _emit(report_to_document(report), out)
    console.print(_residual_table(report.residuals))
    console.print(_certificate_table(list(report.certificates.values())))
    raise typer.Exit(EXIT_OK if report.certified else EXIT_CERTIFICATE)


@app.command("darboux")
def darboux(
    input_path: Optional[Path] = typer.Option(None, "--in", help="FormDocument JSON of omega1"),
    example: Optional[FormExample] = typer.Option(None, "--example", help="Built-in form"),
    profile: Optional[str] = typer.Option(None, "--profile", help="Named run profile"),
    prime: Optional[int] = typer.Option(None, "--prime", "-p", help="Prime p"),
    order: Optional[int] = typer.Option(None, "--order", help="Series order D"),
    t_order: Optional[int] = typer.Option(None, "--t-order", help="Flow order Dt"),
    max_order: Optional[int] = typer.Option(None, "--max-order", help="Order guard"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output path (stdout when omitted)"),
):
    """Darboux coordinates for a closed nondegenerate 2-form."""
    try:
        run = _profile(profile)
        if input_path is not None:
            doc = read_document(input_path, FormDocument)
            omega1 = document_to_form(doc)
            ctx = _context(prime, order, t_order, max_order, run, default_prime=doc.p, default_order=omega1.order)
            if ctx.D < omega1.order:
                omega1 = omega1.truncate(ctx.D)
        elif example is not None:
            ctx = _context(prime, order, t_order, max_order, run)
            omega1 = example_form(example, ctx)
        else:
            raise ContextError("give --in or --example")
        report = darboux_transform(omega1, ctx)
    except (PadicError, ValueError, ValidationError, FileNotFoundError) as e:
        _abort(e)
    _report(report, out)


@app.command("salerno")
def salerno(
    profile: Optional[str] = typer.Option(None, "--profile", help="Named run profile"),
    prime: Optional[int] = typer.Option(None, "--prime", "-p", help="Prime p"),
    nu: Optional[str] = typer.Option(None, "--nu", help="Coupling nu as num/den"),
    order: Optional[int] = typer.Option(None, "--order", help="Series order D"),
    t_order: Optional[int] = typer.Option(None, "--t-order", help="Flow order Dt"),
    pairs: Optional[int] = typer.Option(None, "--pairs", help="Number of (x, y) pairs"),
    variant: Optional[Variant] = typer.Option(None, "--variant", help="Closed-form factor to report"),
    max_order: Optional[int] = typer.Option(None, "--max-order", help="Order guard"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output path (stdout when omitted)"),
):
    """Darboux coordinates for the Salerno form, checked against its closed form."""
    try:
        run = _profile(profile)
        ctx = _context(prime, order, t_order, max_order, run)
        params = SalernoParams(
            nu=parse_rational(_pick(nu, run, "nu") or "0"),
            ctx=ctx,
            n=_pick(pairs, run, "pairs") or 1,
        )
        chosen = Variant(_pick(variant, run, "variant") or Variant.DERIVED)
        report = salerno_end_to_end(params)
        residuals = field_residuals(params, chosen)
        report.comparison["closed_form_variant"] = chosen.value
        report.comparison["closed_form_residuals"] = {k: format_valuation(v) for k, v in residuals.items()}
    except (PadicError, ValueError, ValidationError, FileNotFoundError) as e:
        _abort(e)
    _report(report, out)
