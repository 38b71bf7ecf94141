"""
Series expansion of rational functions, with Newton-polygon root norms
and the coefficient decay certificate they imply.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from app.exceptions import InversionError, SeriesError
from app.padic.context import PrimeLike
from app.padic.valuation import INFINITY, Valuation, format_valuation, valuation
from app.series.functions import coeff_sup
from app.series.multiseries import MultiSeries
from app.verification.certificate import Certificate, combine_verdict

logger = logging.getLogger("padic_darboux")

PolynomialLike = Union[MultiSeries, Sequence]


def polynomial(coefficients: Sequence, var: str = "x", order: Optional[int] = None) -> MultiSeries:
    """Univariate polynomial from coefficients b_0, b_1, ... (low to high)."""
    coefficients = [Fraction(c) for c in coefficients]
    top = order if order is not None else max(len(coefficients) - 1, 0)
    return MultiSeries((var,), top, {(i,): c for i, c in enumerate(coefficients) if c and i <= top})


def coefficient_list(poly: PolynomialLike) -> List[Fraction]:
    """b_0 .. b_n of a univariate polynomial."""
    if isinstance(poly, MultiSeries):
        if len(poly.vars) != 1:
            raise SeriesError(f"expected a univariate polynomial, got variables {poly.vars}")
        top = poly.max_degree()
        return [poly.coefficient((i,)) for i in range(top + 1)]
    return [Fraction(c) for c in poly]


def rational_expand(
    numerator: PolynomialLike,
    denominator: PolynomialLike,
    order: int,
    var: Optional[str] = None,
) -> MultiSeries:
    """
    Expand numerator / denominator as a power series in `var`.

    With b_i the coefficient of var^i in the denominator (a series in the
    remaining variables), the reciprocal satisfies a_0 = 1/b_0 and
    a_k = -(sum_{i=1..k} a_{k-i} b_i) / b_0; the numerator is multiplied
    in afterwards. Result order: min(order, denominator order, numerator order).
    When the denominator caps `var` at k on its own, the expansion runs
    through var^k and every bucket keeps the full order.

    Raises:
        InversionError: b_0 has zero constant term
    """
    name = var or "x"
    if not isinstance(denominator, MultiSeries):
        denominator = polynomial(denominator, name, order)
    if not isinstance(numerator, MultiSeries):
        numerator = polynomial(numerator, name, order)
    if var is None:
        if len(denominator.vars) != 1:
            raise SeriesError(f"choose the expansion variable among {denominator.vars}")
        name = denominator.vars[0]
    if name not in denominator.vars:
        denominator = denominator.align((name, *denominator.vars))

    result_order = min(order, denominator.order)
    b = denominator.collect(name)
    b0 = b[0]
    if not b0.constant_term():
        raise InversionError("denominator has zero constant term")
    b0_inv = b0.truncate(min(result_order, b0.order)).inverse()
    free = denominator.cap(name) is None
    top = result_order if free else len(b) - 1

    def bucket_order(k: int) -> int:
        return result_order - k if free else result_order

    a: List[MultiSeries] = [b0_inv]
    for k in range(1, top + 1):
        acc = None
        for i in range(1, k + 1):
            bi = b.get(i)
            if bi is None or bi.is_zero():
                continue
            term = a[k - i] * bi
            acc = term if acc is None else acc + term
        if acc is None:
            a.append(MultiSeries.zero(b0.vars, bucket_order(k), b0.center, b0.caps))
        else:
            a.append((-(acc * b0_inv)).truncate(bucket_order(k)))

    idx = denominator.vars.index(name)
    terms = {}
    for k, ak in enumerate(a):
        for e, c in ak.terms.items():
            terms[e[:idx] + (k,) + e[idx:]] = c
    reciprocal = MultiSeries(denominator.vars, result_order, terms, denominator.center, denominator.caps)
    logger.debug(f"rational_expand in {name}: order {result_order}")

    if numerator.terms == {(0,) * len(numerator.vars): Fraction(1)}:
        return reciprocal
    return reciprocal * numerator


@dataclass(frozen=True)
class NewtonSegment:
    """A Newton-polygon edge: `multiplicity` roots of valuation -slope."""

    slope: Union[Fraction, float]
    multiplicity: int

    @property
    def root_valuation(self) -> Union[Fraction, float]:
        return -self.slope


def _cross(o: Tuple[int, Fraction], a: Tuple[int, Fraction], b: Tuple[int, Fraction]) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def newton_polygon(poly: PolynomialLike, ctx: PrimeLike) -> List[NewtonSegment]:
    """
    Lower convex hull of the points (i, v_p(b_i)).

    Each edge of slope s and horizontal length m stands for m roots of
    valuation -s. Roots at zero (vanishing low coefficients) come first
    as an edge of slope -inf.
    """
    coefficients = coefficient_list(poly)
    points = [(i, Fraction(valuation(c, ctx))) for i, c in enumerate(coefficients) if c]
    if not points:
        raise SeriesError("Newton polygon of the zero polynomial")

    segments: List[NewtonSegment] = []
    if points[0][0] > 0:
        segments.append(NewtonSegment(slope=-INFINITY, multiplicity=points[0][0]))

    hull: List[Tuple[int, Fraction]] = []
    for point in points:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], point) <= 0:
            hull.pop()
        hull.append(point)
    for (i1, v1), (i2, v2) in zip(hull, hull[1:]):
        segments.append(NewtonSegment(slope=(v2 - v1) / (i2 - i1), multiplicity=i2 - i1))
    return segments


def min_root_abs(poly: PolynomialLike, ctx: PrimeLike) -> Union[Fraction, float]:
    """
    Exponent R with p^R the smallest absolute value of a root.

    Returns math.inf when there are no roots and -math.inf when 0 is a root.
    """
    segments = newton_polygon(poly, ctx)
    if not segments:
        return INFINITY
    if any(s.slope == -INFINITY for s in segments):
        return -INFINITY
    return min(s.slope for s in segments)


def check_decay(series: MultiSeries, radius_exponent, ctx: PrimeLike) -> Certificate:
    """
    Verify |a_k|_p <= |a_0|_p / R^k for every degree k through the order,
    R = p^radius_exponent; a_k is the largest coefficient of degree k.
    """
    sup = coeff_sup(series, ctx)
    v0 = sup.values[0]
    first: Optional[int] = None
    for k in range(1, series.order + 1):
        bound: Valuation = v0 + radius_exponent * k if v0 != INFINITY else INFINITY
        if sup.values[k] < bound:
            first = k
            break

    verdict = combine_verdict(first is None)
    logger.info(f"check_decay R=p^{format_valuation(radius_exponent)}: {verdict.value}")
    return Certificate(
        name="check_decay",
        verdict=verdict,
        checked_through=series.order,
        first_violation=None if first is None else f"k={first}",
        details={
            "radius_exponent": format_valuation(radius_exponent),
            "valuations": [format_valuation(v) for v in sup.values],
            **({"violation_index": first} if first is not None else {}),
        },
        notes=[f"coefficients beyond degree {series.order} are unverified"],
    )
