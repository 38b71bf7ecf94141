"""
Linear symplectic normalization by skew Gram-Schmidt.
"""

import logging
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from app.exceptions import DegenerateFormError, DimensionError, FormError
from app.exterior.matrix import RationalMatrix, fraction_rows, is_skew, rational_matrix
from app.padic.context import PrimeLike
from app.padic.valuation import valuation

logger = logging.getLogger("padic_darboux")


def standard_matrix(size: int) -> RationalMatrix:
    """J0: the matrix of sum_i dx_{2i} ^ dx_{2i+1}."""
    if size % 2:
        raise DimensionError(f"standard symplectic matrix needs even size, got {size}")
    rows = [[Fraction(0)] * size for _ in range(size)]
    for i in range(0, size, 2):
        rows[i][i + 1] = Fraction(1)
        rows[i + 1][i] = Fraction(-1)
    return rows


def _bilinear(m: Sequence[Sequence[Fraction]], u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((u[i] * m[i][j] * v[j] for i in range(len(u)) if u[i] for j in range(len(v)) if v[j]), Fraction(0))


def symplectic_normalize(m: Sequence[Sequence], ctx: PrimeLike) -> RationalMatrix:
    """
    Find P with P^T M P = J0 for a skew invertible rational matrix M.

    Pivot pairs are chosen to maximize |B(u, v)|_p (ties broken
    lexicographically); the columns of P are e_1, f_1, e_2, f_2, ...

    Raises:
        FormError: M is not square and skew
        DegenerateFormError: M is singular
    """
    rows = [[Fraction(x) for x in row] for row in m]
    n = len(rows)
    if not is_skew(rows):
        raise FormError("matrix is not skew-symmetric")
    if n % 2:
        raise DegenerateFormError(f"odd-dimensional skew matrix of size {n} is singular")
    if rational_matrix(rows).det() == 0:
        raise DegenerateFormError("matrix is singular")

    remaining: List[List[Fraction]] = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    columns: List[List[Fraction]] = []
    while remaining:
        best: Optional[Tuple[int, int, int, Fraction]] = None
        for a in range(len(remaining)):
            for b in range(a + 1, len(remaining)):
                value = _bilinear(rows, remaining[a], remaining[b])
                if not value:
                    continue
                key = valuation(value, ctx)
                if best is None or key < best[0]:
                    best = (key, a, b, value)
        if best is None:
            raise DegenerateFormError("no symplectic pivot left; matrix is singular")
        _, a, b, value = best
        e = remaining[a]
        f = [x / value for x in remaining[b]]
        columns.extend([e, f])
        rest = [w for k, w in enumerate(remaining) if k not in (a, b)]
        remaining = []
        for w in rest:
            bwf = _bilinear(rows, w, f)
            bwe = _bilinear(rows, w, e)
            remaining.append([wi - bwf * ei + bwe * fi for wi, ei, fi in zip(w, e, f)])

    # columns -> matrix with those columns
    p = [[columns[j][i] for j in range(n)] for i in range(n)]
    logger.debug(f"symplectic_normalize: size {n}")
    return p


def normalization_residual(m: Sequence[Sequence], p: Sequence[Sequence]) -> RationalMatrix:
    """P^T M P - J0, exactly."""
    product = rational_matrix(p).T * rational_matrix(m) * rational_matrix(p)
    target = rational_matrix(standard_matrix(len(p)))
    return fraction_rows(product - target)
