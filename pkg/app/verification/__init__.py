"""Verification certificates."""

from app.verification.certificate import Certificate, Verdict, combine_verdict

__all__ = ["Certificate", "Verdict", "combine_verdict"]
