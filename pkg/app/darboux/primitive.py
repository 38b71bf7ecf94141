"""
Primitives of closed forms on a ball centered at the origin.
"""

import logging
from fractions import Fraction
from typing import Dict, Tuple

from app.exceptions import FormError, HypothesisError
from app.exterior.forms import KForm, exterior_d
from app.series.multiseries import MultiSeries

logger = logging.getLogger("padic_darboux")


def _require_origin(a: KForm) -> None:
    for name, c in zip(a.vars, a.center):
        if name in a.coords and c != 0:
            raise FormError(f"form must be centered at the origin, coordinate {name!r} has center {c}")


def poincare_primitive(alpha: KForm, ctx=None) -> KForm:
    """
    Radial homotopy primitive of a closed k-form (k >= 1).

    A term c x^I dx_S with coordinate degree m = |I| contributes
    c/(m + k) x^I sum_r (-1)^r x_{s_r} dx_{S minus s_r}. Parameters are
    held fixed. Output order = input order + 1, and d(beta) = alpha.

    Raises:
        FormError: degree 0 input, or not centered at the origin
        HypothesisError: alpha is not closed at truncation
    """
    if alpha.degree == 0:
        raise FormError("a 0-form has no primitive")
    _require_origin(alpha)
    if alpha.order >= 1:
        defect = exterior_d(alpha)
        if not defect.is_zero():
            subset, coefficient = defect.sorted_terms()[0]
            exponent, value = coefficient.sorted_terms()[0]
            raise HypothesisError(
                f"form is not closed: d(alpha) has coefficient {value} at x^{exponent} on dx{subset}"
            )

    k = alpha.degree
    coord_idx = [alpha.vars.index(name) for name in alpha.coords]
    order = alpha.order + 1
    buckets: Dict[Tuple[int, ...], Dict[Tuple[int, ...], Fraction]] = {}
    for subset, coefficient in alpha.terms.items():
        for exponent, value in coefficient.terms.items():
            m = sum(exponent[i] for i in coord_idx)
            scaled = value / (m + k)
            for r, s in enumerate(subset):
                target = subset[:r] + subset[r + 1:]
                bumped = list(exponent)
                bumped[coord_idx[s]] += 1
                bucket = buckets.setdefault(target, {})
                key = tuple(bumped)
                bucket[key] = bucket.get(key, 0) + (-scaled if r % 2 else scaled)

    terms = {s: MultiSeries(alpha.vars, order, t, alpha.center, alpha.caps) for s, t in buckets.items()}
    beta = KForm(k - 1, alpha.coords, terms, vars=alpha.vars, order=order, center=alpha.center, caps=alpha.caps)
    logger.debug(f"poincare_primitive: degree {k} -> {k - 1}, order {order}")
    return beta


def split_linear(beta: KForm) -> Tuple[KForm, KForm]:
    """
    beta = beta1 + beta2 with beta1 the coefficient terms of coordinate
    degree <= 1 and beta2 the rest.
    """
    _require_origin(beta)
    coord_idx = [beta.vars.index(name) for name in beta.coords]
    low, high = {}, {}
    for subset, coefficient in beta.terms.items():
        lo = {e: c for e, c in coefficient.terms.items() if sum(e[i] for i in coord_idx) <= 1}
        hi = {e: c for e, c in coefficient.terms.items() if e not in lo}
        if lo:
            low[subset] = MultiSeries(beta.vars, beta.order, lo, beta.center, beta.caps)
        if hi:
            high[subset] = MultiSeries(beta.vars, beta.order, hi, beta.center, beta.caps)
    ring = dict(vars=beta.vars, order=beta.order, center=beta.center, caps=beta.caps)
    return KForm(beta.degree, beta.coords, low, **ring), KForm(beta.degree, beta.coords, high, **ring)
