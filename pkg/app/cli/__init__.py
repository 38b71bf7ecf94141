"""Typer command surface."""

from app.cli.commands import EXIT_CERTIFICATE, EXIT_HYPOTHESIS, EXIT_INPUT, EXIT_OK, app, exit_code_for

__all__ = ["app", "exit_code_for", "EXIT_OK", "EXIT_INPUT", "EXIT_CERTIFICATE", "EXIT_HYPOTHESIS"]
