"""
Truncated sparse multivariate power series over the rationals.

A MultiSeries is a finite map from exponent vectors to nonzero Fraction
coefficients, expanded in powers of (x_i - center_i), together with a
truncation box. The box is an inclusive total-degree order over the free
variables plus, per variable, an optional separate degree cap:

- None: the variable is free and counts toward `order`;
- an int k: the series is known through degree k in that variable;
- math.inf: the series is exact and does not depend on the variable.

Terms outside the box are absent by contract: every operation states the
box of its result.
"""

import logging
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import sympy

from app.exceptions import CompositionError, DimensionError, InversionError, SeriesError
from app.padic.rational import from_sympy, to_sympy
from app.padic.valuation import INFINITY, Valuation, valuation

logger = logging.getLogger("padic_darboux")

Exponent = Tuple[int, ...]
Terms = Dict[Exponent, Fraction]
Cap = Union[None, int, float]
Caps = Tuple[Cap, ...]
CapsLike = Union[None, Mapping[str, Cap], Sequence[Cap]]


def _degree(exponent: Exponent) -> int:
    return sum(exponent)


def _free_degree(exponent: Exponent, caps: Caps) -> int:
    return sum(k for k, cap in zip(exponent, caps) if cap is None)


def _inside(exponent: Exponent, order: int, caps: Caps) -> bool:
    free = 0
    for k, cap in zip(exponent, caps):
        if cap is None:
            free += k
        elif k > cap:
            return False
    return free <= order


def _uncapped(caps: Optional[Caps]) -> bool:
    return caps is None or all(cap is None for cap in caps)


def _cap_text(cap: Cap) -> str:
    if cap is None:
        return "the total degree"
    if cap == INFINITY:
        return "independent"
    return f"cap {cap}"


def _check_cap(name: str, cap: Cap) -> Cap:
    if cap is None or cap == INFINITY:
        return cap
    if isinstance(cap, bool) or int(cap) != cap or cap < 0:
        raise SeriesError(f"degree cap of {name!r} must be an integer >= 0, got {cap}")
    return int(cap)


def cap_tuple(vars: Sequence[str], caps: CapsLike) -> Caps:
    """Caps aligned with `vars`, from a tuple or a {name: cap} mapping."""
    names = tuple(vars)
    if caps is None:
        return (None,) * len(names)
    if isinstance(caps, Mapping):
        unknown = [v for v in caps if v not in names]
        if unknown:
            raise SeriesError(f"degree caps for unknown variables {unknown}, expected some of {names}")
        values = tuple(caps.get(v) for v in names)
    else:
        values = tuple(caps)
        if len(values) != len(names):
            raise DimensionError(f"{len(values)} degree caps for {len(names)} variables")
    return tuple(_check_cap(v, cap) for v, cap in zip(names, values))


def merge_cap(a: Cap, b: Cap, name: str) -> Cap:
    """Box of a result built from operands truncated at caps a and b."""
    if a == INFINITY:
        return b
    if b == INFINITY:
        return a
    if a is None and b is None:
        return None
    if a is None or b is None:
        raise SeriesError(
            f"variable {name!r} is capped in one operand and counted in the total degree of the other"
        )
    return min(a, b)


def merge_caps(vars: Sequence[str], *caps: Caps) -> Caps:
    merged = tuple(INFINITY for _ in vars)
    for other in caps:
        merged = tuple(merge_cap(a, b, v) for v, a, b in zip(vars, merged, other))
    return merged


def _narrow(vars: Tuple[str, ...], old: Caps, requested: CapsLike) -> Caps:
    if isinstance(requested, Mapping):
        unknown = [v for v in requested if v not in vars]
        if unknown:
            raise SeriesError(f"degree caps for unknown variables {unknown}, expected some of {vars}")
        wanted = tuple(_check_cap(v, requested.get(v, cap)) for v, cap in zip(vars, old))
    else:
        wanted = cap_tuple(vars, requested)
    out = []
    for v, was, cap in zip(vars, old, wanted):
        if cap == was or was == INFINITY:
            out.append(cap)
        elif was is None or cap is None or cap == INFINITY or cap > was:
            raise SeriesError(f"cannot widen the truncation of {v!r} from {_cap_text(was)} to {_cap_text(cap)}")
        else:
            out.append(cap)
    return tuple(out)


def _mul_terms(a: Terms, b: Terms, order: int, caps: Optional[Caps] = None) -> Terms:
    """Sparse product keeping the terms inside the box (order, caps)."""
    if not a or not b:
        return {}
    if _uncapped(caps):
        b_items = sorted(((e, c, sum(e)) for e, c in b.items()), key=lambda item: item[2])
        out: Dict[Exponent, Fraction] = {}
        for ea, ca in a.items():
            room = order - sum(ea)
            if room < 0:
                continue
            for eb, cb, db in b_items:
                if db > room:
                    break
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = out.get(e, 0) + ca * cb
        return {e: c for e, c in out.items() if c}

    bounded = [(i, cap) for i, cap in enumerate(caps) if cap is not None and cap != INFINITY]
    b_items = sorted(((e, c, _free_degree(e, caps)) for e, c in b.items()), key=lambda item: item[2])
    out = {}
    for ea, ca in a.items():
        room = order - _free_degree(ea, caps)
        if room < 0:
            continue
        for eb, cb, db in b_items:
            if db > room:
                break
            e = tuple(x + y for x, y in zip(ea, eb))
            if any(e[i] > cap for i, cap in bounded):
                continue
            out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


def _add_into(target: Dict[Exponent, Fraction], source: Terms, scale: Fraction = Fraction(1)) -> None:
    for e, c in source.items():
        target[e] = target.get(e, 0) + scale * c


class MultiSeries:
    """Truncated multivariate power series with exact rational coefficients."""

    __slots__ = ("vars", "order", "terms", "center", "caps")

    def __init__(
        self,
        vars: Sequence[str],
        order: int,
        terms: Optional[Mapping[Sequence[int], object]] = None,
        center: Optional[Sequence] = None,
        caps: CapsLike = None,
    ):
        names = tuple(vars)
        if len(set(names)) != len(names):
            raise SeriesError(f"variables must be distinct: {names}")
        if order < 0:
            raise SeriesError(f"truncation order must be >= 0, got {order}")
        n = len(names)
        center_values = tuple(Fraction(c) for c in center) if center is not None else (Fraction(0),) * n
        if len(center_values) != n:
            raise DimensionError(f"center has {len(center_values)} entries for {n} variables")
        cap_values = cap_tuple(names, caps)

        clean: Terms = {}
        for exponent, coefficient in (terms or {}).items():
            e = tuple(int(k) for k in exponent)
            if len(e) != n or any(k < 0 for k in e):
                raise DimensionError(f"bad exponent vector {exponent} for variables {names}")
            if not _inside(e, order, cap_values):
                continue
            c = Fraction(coefficient)
            if c:
                clean[e] = clean.get(e, 0) + c
        independent = [v for v, cap in zip(names, cap_values) if cap == INFINITY]
        for e, c in clean.items():
            if c and any(k and cap == INFINITY for k, cap in zip(e, cap_values)):
                raise SeriesError(f"term {e} depends on a variable marked independent: {independent}")
        self.vars: Tuple[str, ...] = names
        self.order: int = int(order)
        self.terms: Terms = {e: c for e, c in clean.items() if c}
        self.center: Tuple[Fraction, ...] = center_values
        self.caps: Caps = cap_values

    @classmethod
    def _raw(
        cls,
        vars: Tuple[str, ...],
        order: int,
        terms: Terms,
        center: Tuple[Fraction, ...],
        caps: Optional[Caps] = None,
    ) -> "MultiSeries":
        """Trusted constructor: terms already clean and inside the box."""
        obj = object.__new__(cls)
        obj.vars = vars
        obj.order = order
        obj.terms = terms
        obj.center = center
        obj.caps = caps if caps is not None else (None,) * len(vars)
        return obj

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def zero(
        cls, vars: Sequence[str], order: int, center: Optional[Sequence] = None, caps: CapsLike = None
    ) -> "MultiSeries":
        return cls(vars, order, {}, center, caps)

    @classmethod
    def constant(
        cls, value, vars: Sequence[str], order: int, center: Optional[Sequence] = None, caps: CapsLike = None
    ) -> "MultiSeries":
        n = len(tuple(vars))
        return cls(vars, order, {(0,) * n: value}, center, caps)

    @classmethod
    def variable(
        cls,
        name: str,
        vars: Sequence[str],
        order: int,
        center: Optional[Sequence] = None,
        caps: CapsLike = None,
    ) -> "MultiSeries":
        """The coordinate function `name`, i.e. center_i + (x_i - center_i)."""
        names = tuple(vars)
        if name not in names:
            raise SeriesError(f"unknown variable {name!r}, expected one of {names}")
        series = cls.zero(names, order, center, caps)
        i = names.index(name)
        if series.caps[i] == INFINITY:
            raise SeriesError(f"the coordinate {name!r} cannot be independent of itself")
        terms: Terms = {}
        if series.center[i]:
            terms[(0,) * len(names)] = series.center[i]
        e = [0] * len(names)
        e[i] = 1
        if _inside(tuple(e), order, series.caps):
            terms[tuple(e)] = Fraction(1)
        return cls._raw(names, series.order, terms, series.center, series.caps)

    @classmethod
    def from_expr(
        cls,
        expr,
        vars: Sequence[str],
        order: int,
        center: Optional[Sequence] = None,
        caps: CapsLike = None,
    ) -> "MultiSeries":
        """
        Build a series from a sympy polynomial expression (or its string form).

        The polynomial is re-expanded about `center` and truncated to the box.
        """
        names = tuple(vars)
        series = cls.zero(names, order, center, caps)
        expr = sympy.sympify(expr)
        symbols = [sympy.Symbol(v) for v in names]
        if any(series.center):
            expr = expr.subs({s: s + to_sympy(c) for s, c in zip(symbols, series.center)}, simultaneous=True)
        expr = sympy.expand(expr)
        if not names:
            return cls.constant(from_sympy(expr), names, order)
        try:
            poly = sympy.Poly(expr, *symbols)
        except sympy.PolynomialError as e:
            raise SeriesError(f"not a polynomial in {names}: {expr}") from e
        terms = {}
        for monomial, coefficient in poly.terms():
            try:
                terms[monomial] = from_sympy(coefficient)
            except ValueError as e:
                raise SeriesError(f"non-rational coefficient {coefficient}") from e
        return cls(names, order, terms, series.center, series.caps)

    # ------------------------------------------------------------------
    # Inspection
    # ------------------------------------------------------------------

    def __repr__(self) -> str:
        capped = self.degree_caps()
        box = f", caps={capped}" if capped else ""
        return f"MultiSeries(vars={self.vars}, order={self.order}{box}, terms={len(self.terms)})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiSeries):
            return NotImplemented
        return (
            self.vars == other.vars
            and self.order == other.order
            and self.caps == other.caps
            and self.center == other.center
            and self.terms == other.terms
        )

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, exponent: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(exponent), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def contains(self, exponent: Sequence[int]) -> bool:
        """Whether the exponent lies inside the truncation box."""
        return _inside(tuple(exponent), self.order, self.caps)

    def cap(self, name: str) -> Cap:
        return self.caps[self._index(name)]

    def degree_caps(self) -> Dict[str, int]:
        """The finite per-variable caps, by name."""
        return {v: cap for v, cap in zip(self.vars, self.caps) if cap is not None and cap != INFINITY}

    def min_degree(self) -> Valuation:
        """Lowest total degree present; math.inf for the zero series."""
        return min((_degree(e) for e in self.terms), default=INFINITY)

    def max_degree(self) -> int:
        return max((_degree(e) for e in self.terms), default=-1)

    def degree_in(self, name: str) -> int:
        i = self._index(name)
        return max((e[i] for e in self.terms), default=-1)

    def min_valuation(self, ctx) -> Valuation:
        """Valuation of the largest coefficient (max |a_I|_p)."""
        return min((valuation(c, ctx) for c in self.terms.values()), default=INFINITY)

    def sorted_terms(self) -> List[Tuple[Exponent, Fraction]]:
        """Terms in canonical order: by total degree, then exponent vector."""
        return sorted(self.terms.items(), key=lambda item: (_degree(item[0]), item[0]))

    def to_expr(self) -> sympy.Expr:
        symbols = [sympy.Symbol(v) for v in self.vars]
        expr = sympy.Integer(0)
        for e, c in self.sorted_terms():
            term = to_sympy(c)
            for s, k, c0 in zip(symbols, e, self.center):
                if k:
                    term *= (s - to_sympy(c0)) ** k
            expr += term
        return expr

    def _index(self, name: str) -> int:
        try:
            return self.vars.index(name)
        except ValueError:
            raise SeriesError(f"unknown variable {name!r}, expected one of {self.vars}") from None

    # ------------------------------------------------------------------
    # Variable bookkeeping
    # ------------------------------------------------------------------

    def align(self, vars: Sequence[str], center: Optional[Mapping[str, object]] = None) -> "MultiSeries":
        """
        Re-express over a superset (or permutation) of the current variables.

        New variables get center 0 unless `center` supplies a value, and
        are marked independent.
        """
        names = tuple(vars)
        if names == self.vars:
            return self
        missing = [v for v in self.vars if v not in names]
        if missing:
            raise SeriesError(f"cannot drop variables {missing} when aligning to {names}")
        extra = center or {}
        positions = [self.vars.index(v) if v in self.vars else None for v in names]
        new_center = tuple(
            self.center[pos] if pos is not None else Fraction(extra.get(v, 0))
            for v, pos in zip(names, positions)
        )
        new_caps = tuple(self.caps[pos] if pos is not None else INFINITY for pos in positions)
        terms = {
            tuple(e[pos] if pos is not None else 0 for pos in positions): c
            for e, c in self.terms.items()
        }
        return MultiSeries._raw(names, self.order, terms, new_center, new_caps)

    def rename(self, mapping: Mapping[str, str]) -> "MultiSeries":
        names = tuple(mapping.get(v, v) for v in self.vars)
        if len(set(names)) != len(names):
            raise SeriesError(f"renaming produces duplicate variables: {names}")
        return MultiSeries._raw(names, self.order, dict(self.terms), self.center, self.caps)

    def truncate(self, order: Optional[int] = None, caps: CapsLike = None) -> "MultiSeries":
        """
        Shrink the truncation box. Raising the order or a cap, or capping a
        free variable, would invent precision and raises SeriesError.
        """
        order = self.order if order is None else order
        if order > self.order:
            raise SeriesError(f"cannot raise truncation order {self.order} to {order}")
        if order < 0:
            raise SeriesError(f"truncation order must be >= 0, got {order}")
        new_caps = self.caps if caps is None else _narrow(self.vars, self.caps, caps)
        if order == self.order and new_caps == self.caps:
            return self
        terms = {e: c for e, c in self.terms.items() if _inside(e, order, new_caps)}
        return MultiSeries._raw(self.vars, order, terms, self.center, new_caps)

    def collect(self, name: str) -> Dict[int, "MultiSeries"]:
        """
        Split by powers of (name - center): k -> coefficient series in the
        remaining variables. For a free variable bucket k is known through
        order - k; for a capped one every bucket up to the cap keeps the
        full order.
        """
        i = self._index(name)
        rest = self.vars[:i] + self.vars[i + 1:]
        rest_center = self.center[:i] + self.center[i + 1:]
        rest_caps = self.caps[:i] + self.caps[i + 1:]
        buckets: Dict[int, Terms] = {}
        for e, c in self.terms.items():
            buckets.setdefault(e[i], {})[e[:i] + e[i + 1:]] = c
        cap = self.caps[i]
        if cap is None:
            return {
                k: MultiSeries._raw(rest, self.order - k, buckets.get(k, {}), rest_center, rest_caps)
                for k in range(self.order + 1)
            }
        top = 0 if cap == INFINITY else cap
        return {
            k: MultiSeries._raw(rest, self.order, buckets.get(k, {}), rest_center, rest_caps)
            for k in range(top + 1)
        }

    def agrees_with(self, other: "MultiSeries") -> bool:
        """Equal coefficient-wise inside the smaller of the two boxes."""
        a, b = self._coerce(other)
        return (a - b).is_zero()

    # ------------------------------------------------------------------
    # Ring arithmetic
    # ------------------------------------------------------------------

    def _coerce(self, other) -> Tuple["MultiSeries", "MultiSeries"]:
        if isinstance(other, MultiSeries):
            a, b = self, other
            if a.vars != b.vars:
                union = a.vars + tuple(v for v in b.vars if v not in a.vars)
                a, b = a.align(union), b.align(union)
            if a.center != b.center:
                raise SeriesError(f"center mismatch: {a.center} vs {b.center}")
            return a, b
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self, MultiSeries.constant(other, self.vars, self.order, self.center, self.caps)
        raise SeriesError(f"cannot combine MultiSeries with {type(other).__name__}")

    def __add__(self, other) -> "MultiSeries":
        if isinstance(other, bool) or not isinstance(other, (MultiSeries, int, Fraction)):
            return NotImplemented
        a, b = self._coerce(other)
        order = min(a.order, b.order)
        caps = merge_caps(a.vars, a.caps, b.caps)
        out = {e: c for e, c in a.terms.items() if _inside(e, order, caps)}
        _add_into(out, {e: c for e, c in b.terms.items() if _inside(e, order, caps)})
        return MultiSeries._raw(a.vars, order, {e: c for e, c in out.items() if c}, a.center, caps)

    __radd__ = __add__

    def __neg__(self) -> "MultiSeries":
        return MultiSeries._raw(
            self.vars, self.order, {e: -c for e, c in self.terms.items()}, self.center, self.caps
        )

    def __sub__(self, other) -> "MultiSeries":
        if isinstance(other, MultiSeries):
            return self + (-other)
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self + (-Fraction(other))
        return NotImplemented

    def __rsub__(self, other) -> "MultiSeries":
        return (-self) + other

    def __mul__(self, other) -> "MultiSeries":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        if not isinstance(other, MultiSeries):
            return NotImplemented
        a, b = self._coerce(other)
        order = min(a.order, b.order)
        caps = merge_caps(a.vars, a.caps, b.caps)
        return MultiSeries._raw(a.vars, order, _mul_terms(a.terms, b.terms, order, caps), a.center, caps)

    def __rmul__(self, other) -> "MultiSeries":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other) -> "MultiSeries":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if other == 0:
                raise ZeroDivisionError("division of a series by zero")
            return self.scale(1 / Fraction(other))
        if isinstance(other, MultiSeries):
            return self * other.inverse()
        return NotImplemented

    def __pow__(self, n: int) -> "MultiSeries":
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = MultiSeries.constant(1, self.vars, self.order, self.center, self.caps)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, factor) -> "MultiSeries":
        factor = Fraction(factor)
        if not factor:
            return MultiSeries._raw(self.vars, self.order, {}, self.center, self.caps)
        return MultiSeries._raw(
            self.vars, self.order, {e: factor * c for e, c in self.terms.items()}, self.center, self.caps
        )

    def box_depth(self) -> int:
        """Largest total degree a term inside the box can have."""
        return self.order + sum(cap for cap in self.caps if cap is not None and cap != INFINITY)

    def inverse(self) -> "MultiSeries":
        """
        Multiplicative inverse inside the truncation box.

        Writes a = a0 (1 + u) with u(center) = 0 and sums the geometric
        series in Horner form.

        Raises:
            InversionError: if the constant term is zero
        """
        a0 = self.constant_term()
        if not a0:
            raise InversionError("cannot invert a series with zero constant term")
        u = (self - a0).scale(1 / a0)
        one = MultiSeries.constant(1, self.vars, self.order, self.center, self.caps)
        result = one
        for _ in range(self.box_depth()):
            step = one - u * result
            if step == result:
                break
            result = step
        return result.scale(1 / a0)

    # ------------------------------------------------------------------
    # Calculus and substitution
    # ------------------------------------------------------------------

    def partial_derivative(self, name: str, polynomial: bool = False) -> "MultiSeries":
        """
        Formal partial derivative. Differentiating in a free variable loses
        one order, in a capped one lowers its cap by one; an exact
        polynomial (`polynomial=True`) keeps its box.
        """
        i = self._index(name)
        order, caps = self.order, self.caps
        cap = caps[i]
        if not polynomial and cap != INFINITY:
            if cap is None:
                if self.order == 0:
                    raise SeriesError("derivative of an order-0 series carries no information")
                order = self.order - 1
            else:
                if cap == 0:
                    raise SeriesError(f"derivative in {name!r} capped at degree 0 carries no information")
                caps = caps[:i] + (cap - 1,) + caps[i + 1:]
        terms: Terms = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                terms[e[:i] + (k - 1,) + e[i + 1:]] = c * k
        return MultiSeries._raw(self.vars, order, terms, self.center, caps)

    def evaluate(self, point: Sequence) -> Fraction:
        """Value of the truncated representative at a rational point."""
        if len(point) != len(self.vars):
            raise DimensionError(f"point has {len(point)} entries for {len(self.vars)} variables")
        shifts = [Fraction(x) - c for x, c in zip(point, self.center)]
        total = Fraction(0)
        for e, c in self.terms.items():
            value = c
            for s, k in zip(shifts, e):
                if k:
                    value *= s ** k
            total += value
        return total

    def substitute(self, values: Mapping[str, object]) -> "MultiSeries":
        """
        Partially evaluate the truncated representative at fixed values of
        some variables, giving a series in the remaining ones.
        """
        fixed = {self._index(name): Fraction(v) - self.center[self._index(name)] for name, v in values.items()}
        keep = [i for i in range(len(self.vars)) if i not in fixed]
        out: Dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            value = c
            for i, shift in fixed.items():
                if e[i]:
                    value *= shift ** e[i]
            if value:
                key = tuple(e[i] for i in keep)
                out[key] = out.get(key, 0) + value
        return MultiSeries._raw(
            tuple(self.vars[i] for i in keep),
            self.order,
            {e: c for e, c in out.items() if c},
            tuple(self.center[i] for i in keep),
            tuple(self.caps[i] for i in keep),
        )

    def compose(self, substitutions: Sequence["MultiSeries"], polynomial: bool = False) -> "MultiSeries":
        return compose(self, substitutions, polynomial=polynomial)

    def recenter(self, new_center: Sequence) -> "MultiSeries":
        return recenter(self, new_center)


# ----------------------------------------------------------------------
# Module-level operations
# ----------------------------------------------------------------------


def add(a: MultiSeries, b: MultiSeries) -> MultiSeries:
    return a + b


def sub(a: MultiSeries, b: MultiSeries) -> MultiSeries:
    return a - b


def mul(a: MultiSeries, b: MultiSeries) -> MultiSeries:
    return a * b


def scalar_mul(c, a: MultiSeries) -> MultiSeries:
    return a.scale(c)


def inverse(a: MultiSeries) -> MultiSeries:
    return a.inverse()


def partial_derivative(f: MultiSeries, name: str) -> MultiSeries:
    return f.partial_derivative(name)


def _common_ring(series: Sequence[MultiSeries]) -> Tuple[List[MultiSeries], Caps]:
    names: Tuple[str, ...] = ()
    for s in series:
        names += tuple(v for v in s.vars if v not in names)
    aligned = [s.align(names) for s in series]
    centers = {s.center for s in aligned}
    if len(centers) > 1:
        raise SeriesError(f"substituted series have different centers: {sorted(centers)}")
    return aligned, merge_caps(names, *(s.caps for s in aligned))


def _check_substitution(
    f: MultiSeries, i: int, terms: Terms, vars: Tuple[str, ...], caps: List[Cap], c0: Fraction
) -> None:
    """
    The i-th image must vanish at the center to the degree the i-th
    variable's truncation needs; lowers the result cap where required.
    """
    name, cap = f.vars[i], f.caps[i]
    if cap == INFINITY:
        return
    zero_exponent = (0,) * len(vars)
    if cap is None:
        if zero_exponent in terms:
            raise CompositionError(
                f"substitution for {name!r} has constant term {terms[zero_exponent] + c0}, expected {c0}"
            )
        flat = sorted(e for e in terms if _free_degree(e, tuple(caps)) == 0)
        if flat:
            raise CompositionError(
                f"substitution for {name!r} has term {flat[0]} of degree 0 in the free variables"
            )
        return
    j = vars.index(name) if name in vars else None
    if j is None or caps[j] is None or caps[j] == INFINITY:
        raise CompositionError(f"capped variable {name!r} must be substituted by a series capped in {name!r}")
    flat = sorted(e for e in terms if e[j] == 0)
    if flat:
        raise CompositionError(f"substitution for {name!r} has term {flat[0]} of degree 0 in {name!r}")
    caps[j] = min(caps[j], cap)


def compose(f: MultiSeries, g: Sequence[MultiSeries], polynomial: bool = False) -> MultiSeries:
    """
    Substitute g_i for the i-th variable of f.

    Each g_i must take the value f.center_i at the common center of the g's,
    so that g_i - f.center_i has no constant term. A free variable of f
    needs images of positive degree in the free variables of the target; a
    variable capped at k needs images divisible by that same variable,
    whose cap in the result drops to at most k. Independent variables of f
    impose nothing. With `polynomial=True` f is treated as an exact
    polynomial and all of that is dropped.

    Result order: min(g orders), further capped by f.order unless
    polynomial or f has no free variables.
    """
    if len(g) != len(f.vars):
        raise DimensionError(f"{len(g)} substitutions for {len(f.vars)} variables")
    if not g:
        return f
    targets, merged = _common_ring(g)
    vars, center = targets[0].vars, targets[0].center
    order = min(s.order for s in targets)
    if not polynomial and any(cap is None for cap in f.caps):
        order = min(order, f.order)
    caps = list(merged)

    zero_exponent = (0,) * len(vars)
    shifted: List[Terms] = []
    for i, (s, c0) in enumerate(zip(targets, f.center)):
        terms = {e: c for e, c in s.terms.items() if _inside(e, order, merged)}
        constant = terms.get(zero_exponent, Fraction(0)) - c0
        if constant:
            terms[zero_exponent] = constant
        else:
            terms.pop(zero_exponent, None)
        if not polynomial:
            _check_substitution(f, i, terms, vars, caps, c0)
        shifted.append(terms)
    box = tuple(caps)

    cache: Dict[Exponent, Terms] = {(0,) * len(f.vars): {zero_exponent: Fraction(1)}}

    def monomial(e: Exponent) -> Terms:
        found = cache.get(e)
        if found is None:
            j = next(i for i, k in enumerate(e) if k)
            parent = e[:j] + (e[j] - 1,) + e[j + 1:]
            found = _mul_terms(monomial(parent), shifted[j], order, box)
            cache[e] = found
        return found

    out: Dict[Exponent, Fraction] = {}
    for e, c in f.sorted_terms():
        if not polynomial and _free_degree(e, f.caps) > order:
            continue
        _add_into(out, monomial(e), c)
    return MultiSeries._raw(vars, order, {e: c for e, c in out.items() if c}, center, box)


def recenter(f: MultiSeries, new_center: Sequence) -> MultiSeries:
    """
    Taylor re-expansion about `new_center`, treating the truncated
    representative as an exact polynomial. Output box = f's box.
    """
    if len(new_center) != len(f.vars):
        raise DimensionError(f"center has {len(new_center)} entries for {len(f.vars)} variables")
    target = tuple(Fraction(c) for c in new_center)
    if target == f.center:
        return f
    coordinates = [
        MultiSeries.constant(c, f.vars, f.order, target, f.caps)
        if cap == INFINITY
        else MultiSeries.variable(v, f.vars, f.order, target, f.caps)
        for v, c, cap in zip(f.vars, target, f.caps)
    ]
    return compose(f, coordinates, polynomial=True)


def monomial(vars: Sequence[str], exponent: Iterable[int], order: int, coefficient=1) -> MultiSeries:
    """Single-term series c * x^exponent centered at 0."""
    return MultiSeries(vars, order, {tuple(exponent): coefficient})
