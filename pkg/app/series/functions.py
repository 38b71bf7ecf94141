"""
Named series (exp, log1p) and convergence diagnostics over p-adic balls.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import List, Optional

from app.padic.context import Context, PrimeLike, prime_of
from app.padic.valuation import INFINITY, Valuation, format_valuation, valuation
from app.series.multiseries import MultiSeries
from app.verification.certificate import Certificate, Verdict

logger = logging.getLogger("padic_darboux")


def exp_series(order: int, var: str = "x") -> MultiSeries:
    """exp(x) = sum x^j / j! through degree `order`."""
    if order < 0:
        raise ValueError(f"order must be >= 0, got {order}")
    return MultiSeries((var,), order, {(j,): Fraction(1, factorial(j)) for j in range(order + 1)})


def log1p_series(order: int, var: str = "x") -> MultiSeries:
    """log(1 + x) = sum (-1)^(j+1) x^j / j through degree `order`."""
    if order < 0:
        raise ValueError(f"order must be >= 0, got {order}")
    return MultiSeries((var,), order, {(j,): Fraction((-1) ** (j + 1), j) for j in range(1, order + 1)})


@dataclass
class CoeffSup:
    """
    Per-degree sup of |a_I|_p, stored as valuations: C_k = p^(-values[k]),
    with math.inf marking a degree whose coefficients all vanish.
    """

    p: int
    values: List[Valuation] = field(default_factory=list)

    def abs_values(self) -> List[Fraction]:
        return [Fraction(0) if v == INFINITY else Fraction(self.p) ** (-v) for v in self.values]

    def is_zero(self, k: int) -> bool:
        return self.values[k] == INFINITY


def coeff_sup(f: MultiSeries, ctx: PrimeLike) -> CoeffSup:
    """C_k = max |a_I|_p over total degree k, for k = 0..order (or the top degree present)."""
    values: List[Valuation] = [INFINITY] * (max(f.order, f.max_degree()) + 1)
    for e, c in f.terms.items():
        k = sum(e)
        values[k] = min(values[k], valuation(c, ctx))
    return CoeffSup(p=prime_of(ctx), values=values)


def _window_max(scores: List[Valuation], lo: int, hi: int) -> Valuation:
    return max((scores[k] for k in range(lo, hi + 1)), default=-INFINITY)


def converges_on_ball(
    f: MultiSeries, radius_exponent: int, ctx: PrimeLike, polynomial: bool = False
) -> Certificate:
    """
    Convergence evidence for f on the ball of radius r = p^radius_exponent.

    A polynomial converges everywhere: f is read as one when `polynomial`
    is set or when its top degree lies strictly below the truncation
    order, and the verdict is then CONSISTENT at any radius.

    Otherwise the series converges iff C_k r^k -> 0. With s_k the exponent of
    C_k r^k (so C_k r^k = p^s_k), the truncated window [1, D] is split
    in halves. The verdict is CONSISTENT when the upper half is either
    empty of terms or strictly below the lower half's peak and its last
    value is < 1; otherwise the peak of the upper half is reported as a
    DIVERGENCE_WITNESS. Nothing is claimed about degrees beyond D.
    """
    sup = coeff_sup(f, ctx)
    D = f.order
    scores: List[Valuation] = [
        -INFINITY if v == INFINITY else radius_exponent * k - v for k, v in enumerate(sup.values)
    ]
    half = D // 2
    lower = _window_max(scores, 1, half)
    upper = _window_max(scores, half + 1, D)
    nonzero_upper = [k for k in range(half + 1, D + 1) if scores[k] != -INFINITY]

    details = {
        "radius_exponent": radius_exponent,
        "scores": [format_valuation(s) for s in scores],
        "lower_window_max": format_valuation(lower),
        "upper_window_max": format_valuation(upper),
    }
    notes = [f"verdict holds at truncation order {D}; terms beyond degree {D} are unverified"]

    top = f.max_degree()
    if polynomial or top < D:
        details["polynomial_degree"] = top
        notes = [f"read as a polynomial of degree {top}: finite tail, converges on every ball"]
        verdict, witness = Verdict.CONSISTENT, None
    elif not nonzero_upper:
        verdict, witness = Verdict.CONSISTENT, None
    else:
        last = scores[nonzero_upper[-1]]
        if upper < lower and last < 0:
            verdict, witness = Verdict.CONSISTENT, None
        else:
            witness = next(k for k in nonzero_upper if scores[k] == upper)
            verdict = Verdict.DIVERGENCE_WITNESS
            details["witness_degree"] = witness

    logger.debug(f"converges_on_ball r=p^{radius_exponent}: {verdict.value}")
    return Certificate(
        name="converges_on_ball",
        verdict=verdict,
        checked_through=D,
        first_violation=None if witness is None else f"C_k r^k does not decay at k={witness}",
        details=details,
        notes=notes,
    )


def exp_convergence(ctx: Context, order: Optional[int] = None, widen: int = 0) -> Certificate:
    """Convergence evidence for exp on the ball p^(-d + widen)."""
    series = exp_series(order if order is not None else max(ctx.D, ctx.p ** 2))
    return converges_on_ball(series, -ctx.d + widen, ctx)
