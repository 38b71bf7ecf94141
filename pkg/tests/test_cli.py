import json

import click
from typer.testing import CliRunner

from app.cli import EXIT_CERTIFICATE, EXIT_HYPOTHESIS, EXIT_INPUT, EXIT_OK, app, exit_code_for
from app.cli.commands import worked_example, worked_oracle
from app.exceptions import DegenerateFormError, HypothesisError, IdentityError, SeriesError, StageError
from app.exterior.forms import KForm, standard_symplectic
from app.formats import form_to_document, write_document
from app.main import main
from app.padic.context import Context
from app.series.multiseries import MultiSeries
from app.solver.ivp import ivp_solve

runner = CliRunner()
PAIR = ("x1", "y1")


def _form_file(tmp_path, form, name="form.json"):
    path = tmp_path / name
    write_document(form_to_document(form, 5), path)
    return path


def test_expand_rational():
    result = runner.invoke(app, ["expand-rational", "--denominator", "1,0,1", "--prime", "5", "--order", "20"])
    assert result.exit_code == EXIT_OK
    data = json.loads(result.stdout)
    assert data["min_root_abs_exponent"] == 0
    assert data["newton_multiplicities"] == [2]
    assert data["certificate"]["verdict"] == "PASS"
    assert data["series"]["order"] == 20


def test_expand_rational_needs_a_unit_constant_term():
    result = runner.invoke(app, ["expand-rational", "--denominator", "0,1", "--prime", "5"])
    assert result.exit_code == EXIT_INPUT


def test_expand_rational_wrong_radius_claim():
    result = runner.invoke(
        app, ["expand-rational", "--denominator", "1,-1", "--prime", "5", "--order", "10", "--radius-claim", "1"]
    )
    assert result.exit_code == EXIT_CERTIFICATE
    assert json.loads(result.stdout)["certificate"]["verdict"] == "FAIL"


def test_solve_ivp_with_oracle():
    result = runner.invoke(
        app, ["solve-ivp", "--example", "worked", "--prime", "5", "--order", "12", "--oracle", "closed-form"]
    )
    assert result.exit_code == EXIT_OK
    data = json.loads(result.stdout)
    assert data["oracle"]["matches"] is True
    assert data["radius_exponent"] == -1
    assert data["certificates"][0]["verdict"] == "PASS"


def test_solve_ivp_outside_the_ball():
    result = runner.invoke(app, ["solve-ivp", "--example", "worked", "--prime", "5", "--order", "8", "--initial", "1/5"])
    assert result.exit_code == EXIT_HYPOTHESIS


def test_darboux_examples():
    standard = runner.invoke(app, ["darboux", "--example", "standard", "--prime", "5", "--order", "4", "--t-order", "3"])
    assert standard.exit_code == EXIT_OK
    assert json.loads(standard.stdout)["certified"] is True

    smoke = runner.invoke(app, ["darboux", "--example", "smoke", "--prime", "5", "--order", "6", "--t-order", "5"])
    assert smoke.exit_code == EXIT_OK
    assert all(v == "inf" for v in json.loads(smoke.stdout)["residuals"].values())


def test_darboux_rejects_degenerate_form(tmp_path):
    x = MultiSeries.variable("x1", PAIR, 4)
    path = _form_file(tmp_path, KForm(2, PAIR, {(0, 1): x}, order=4))
    result = runner.invoke(app, ["darboux", "--in", str(path), "--t-order", "3"])
    assert result.exit_code == EXIT_HYPOTHESIS


def test_salerno_output_is_reproducible(tmp_path):
    args = ["salerno", "--prime", "5", "--nu", "5", "--order", "6", "--t-order", "5"]
    first = runner.invoke(app, args + ["--out", str(tmp_path / "a.json")])
    second = runner.invoke(app, args + ["--out", str(tmp_path / "b.json")])
    assert first.exit_code == second.exit_code == EXIT_OK
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    report = json.loads((tmp_path / "a.json").read_text())
    assert report["comparison"]["field_matches_closed_form"] is True
    assert report["comparison"]["closed_form_variant"] == "derived"


def test_salerno_profile():
    result = runner.invoke(app, ["salerno", "--profile", "dnls-limit"])
    assert result.exit_code == EXIT_OK
    assert json.loads(result.stdout)["p"] == 5


def test_salerno_unknown_profile():
    assert runner.invoke(app, ["salerno", "--profile", "missing"]).exit_code == EXIT_INPUT


def test_primitive(tmp_path):
    x = MultiSeries.variable("x1", PAIR, 5)
    closed = _form_file(tmp_path, standard_symplectic(PAIR, 5).scale(x), "closed.json")
    result = runner.invoke(app, ["primitive", "--in", str(closed)])
    assert result.exit_code == EXIT_OK
    assert json.loads(result.stdout)["residual"] == "inf"

    y = MultiSeries.variable("y1", PAIR, 5)
    open_form = _form_file(tmp_path, KForm(1, PAIR, {(0,): y}), "open.json")
    assert runner.invoke(app, ["primitive", "--in", str(open_form)]).exit_code == EXIT_HYPOTHESIS


def test_order_guard():
    result = runner.invoke(app, ["salerno", "--order", "12", "--t-order", "4", "--max-order", "10"])
    assert result.exit_code == EXIT_INPUT


def test_exit_codes_by_failure_kind():
    assert exit_code_for(click.UsageError("missing argument")) == EXIT_INPUT
    assert exit_code_for(click.BadParameter("not a prime")) == EXIT_INPUT
    assert exit_code_for(click.NoSuchOption("--no-such-flag")) == EXIT_INPUT
    assert exit_code_for(HypothesisError("beta2 is not quadratic")) == EXIT_HYPOTHESIS
    assert exit_code_for(IdentityError("d(gamma) differs from alpha")) == EXIT_CERTIFICATE
    assert exit_code_for(StageError("moser", IdentityError("defect"))) == EXIT_CERTIFICATE
    assert exit_code_for(StageError("normalize", DegenerateFormError("singular"))) == EXIT_HYPOTHESIS
    assert exit_code_for(SeriesError("bad box")) == EXIT_INPUT


def test_main_returns_the_command_exit_code():
    assert main(["salerno", "--profile", "dnls-limit"]) == EXIT_OK
    assert main(["salerno", "--order", "12", "--t-order", "4", "--max-order", "10"]) == EXIT_INPUT


def test_worked_example_keeps_every_coefficient():
    """The worked right-hand side survives re-expansion about y0 = 5 through j = 12."""
    sol = ivp_solve(worked_example(Context(p=5, D=12, Dt=8), [5]), 12)
    assert sol.order == 12
    oracle = worked_oracle(sol)
    assert oracle["matches"] is True
    assert oracle["checked_through"] == 12
