"""
Matrix view of 2-forms.

Convention (i < j): the form sum_{i<j} a_ij dx_i ^ dx_j maps to the skew
matrix with M_ij = a_ij and M_ji = -a_ij. Under it the contraction
i_X a has coefficient vector -M X.
"""

import logging
from fractions import Fraction
from typing import List, Sequence

import sympy

from app.exceptions import DegenerateFormError, DimensionError, FormError
from app.exterior.forms import KForm, _union_vars
from app.padic.rational import from_sympy, to_sympy
from app.series.multiseries import MultiSeries, merge_caps

logger = logging.getLogger("padic_darboux")

RationalMatrix = List[List[Fraction]]


def rational_matrix(rows: Sequence[Sequence]) -> sympy.Matrix:
    return sympy.Matrix([[to_sympy(Fraction(x)) for x in row] for row in rows])


def fraction_rows(matrix: sympy.Matrix) -> RationalMatrix:
    return [[from_sympy(matrix[i, j]) for j in range(matrix.cols)] for i in range(matrix.rows)]


def is_skew(rows: Sequence[Sequence]) -> bool:
    n = len(rows)
    return all(len(r) == n for r in rows) and all(
        rows[i][j] + rows[j][i] == 0 for i in range(n) for j in range(i, n)
    )


class FormMatrix:
    """Square matrix of MultiSeries entries over a list of coordinates."""

    def __init__(self, coords: Sequence[str], entries: Sequence[Sequence[MultiSeries]], skew: bool = False):
        coords = tuple(coords)
        n = len(coords)
        if len(entries) != n or any(len(row) != n for row in entries):
            raise DimensionError(f"expected a {n}x{n} matrix")
        flat = [e for row in entries for e in row]
        names = _union_vars(*(e.vars for e in flat), coords)
        center = {}
        for e in flat:
            center.update(zip(e.vars, e.center))
        self.coords = coords
        self.entries: List[List[MultiSeries]] = [[e.align(names, center) for e in row] for row in entries]
        self.vars = names
        self.order = min((e.order for e in flat), default=0)
        self.caps = merge_caps(names, *(e.caps for row in self.entries for e in row))
        self.center = self.entries[0][0].center if n else ()
        self.skew = skew
        if skew and not self._check_skew():
            raise FormError("matrix flagged skew is not skew-symmetric")

    @property
    def size(self) -> int:
        return len(self.coords)

    def _check_skew(self) -> bool:
        n = self.size
        return all((self.entries[i][j] + self.entries[j][i]).is_zero() for i in range(n) for j in range(i, n))

    def __repr__(self) -> str:
        return f"FormMatrix(size={self.size}, vars={self.vars}, order={self.order}, skew={self.skew})"

    def __add__(self, other: "FormMatrix") -> "FormMatrix":
        n = self.size
        return FormMatrix(self.coords, [[self.entries[i][j] + other.entries[i][j] for j in range(n)]
                                        for i in range(n)], skew=self.skew and other.skew)

    def __sub__(self, other: "FormMatrix") -> "FormMatrix":
        return self + other.scale(-1)

    def scale(self, factor) -> "FormMatrix":
        """Multiply every entry by a rational or a series."""
        return FormMatrix(self.coords, [[e * factor for e in row] for row in self.entries], skew=self.skew)

    def __matmul__(self, other: "FormMatrix") -> "FormMatrix":
        n = self.size
        entries = []
        for i in range(n):
            row = []
            for j in range(n):
                total = self.entries[i][0] * other.entries[0][j]
                for k in range(1, n):
                    total = total + self.entries[i][k] * other.entries[k][j]
                row.append(total)
            entries.append(row)
        return FormMatrix(self.coords, entries)

    def apply(self, vector: Sequence[MultiSeries]) -> List[MultiSeries]:
        """Matrix-vector product M v."""
        if len(vector) != self.size:
            raise DimensionError(f"vector of length {len(vector)} for a {self.size}x{self.size} matrix")
        out = []
        for row in self.entries:
            total = row[0] * vector[0]
            for e, v in zip(row[1:], vector[1:]):
                total = total + e * v
            out.append(total)
        return out

    def box_depth(self) -> int:
        return MultiSeries.zero(self.vars, self.order, self.center, self.caps).box_depth()

    def constant_matrix(self) -> sympy.Matrix:
        """Value at the center, as an exact sympy matrix."""
        return rational_matrix([[e.constant_term() for e in row] for row in self.entries])

    def _neumann_parts(self):
        m0 = self.constant_matrix()
        if m0.det() == 0:
            raise DegenerateFormError("matrix is singular at the center")
        m0_inv = fraction_rows(m0.inv())
        constant = FormMatrix(self.coords, [
            [MultiSeries.constant(x, self.vars, self.order, self.center, self.caps) for x in row] for row in m0_inv
        ])
        nilpotent = FormMatrix(self.coords, [
            [e - e.constant_term() for e in row] for row in self.entries
        ])
        return constant, constant @ nilpotent

    def solve(self, rhs: Sequence[MultiSeries]) -> List[MultiSeries]:
        """
        Solve M x = rhs over the truncated series ring.

        With M = M0 + N (N vanishing at the center) iterate
        x <- M0^{-1} rhs - M0^{-1} N x, which is exact once it stops moving
        and at the latest after as many steps as the box is deep.
        """
        m0_inv, k = self._neumann_parts()
        base = m0_inv.apply(rhs)
        x = base
        for _ in range(self.box_depth()):
            step = [b - kx for b, kx in zip(base, k.apply(x))]
            if step == x:
                break
            x = step
        return x

    def inverse(self) -> "FormMatrix":
        """Series-matrix inverse via the same Neumann recursion."""
        m0_inv, k = self._neumann_parts()
        result = m0_inv
        for _ in range(self.box_depth()):
            step = m0_inv - k @ result
            if step.entries == result.entries:
                break
            result = step
        return result


def two_form_matrix(a: KForm) -> FormMatrix:
    """Skew matrix of a 2-form under the i < j convention."""
    if a.degree != 2:
        raise FormError(f"expected a 2-form, got degree {a.degree}")
    n = len(a.coords)
    zero = a.box()
    entries = [[zero] * n for _ in range(n)]
    for (i, j), c in a.terms.items():
        entries[i][j] = c
        entries[j][i] = -c
    return FormMatrix(a.coords, entries, skew=True)


def matrix_two_form(m: FormMatrix) -> KForm:
    """Inverse of two_form_matrix; rejects non-skew input."""
    if not m._check_skew():
        raise FormError("matrix is not skew-symmetric")
    n = m.size
    terms = {(i, j): m.entries[i][j] for i in range(n) for j in range(i + 1, n)}
    return KForm(2, m.coords, terms, vars=m.vars, order=m.order, center=m.center, caps=m.caps)


def form_value_matrix(a: KForm) -> RationalMatrix:
    """Constant skew matrix of a 2-form at the center of its chart."""
    return fraction_rows(two_form_matrix(a).constant_matrix())
