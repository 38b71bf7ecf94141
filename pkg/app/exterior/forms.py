"""
Differential forms and vector fields with MultiSeries coefficients.

A form lives in a ring of variables `vars`; the subset `coords` are the
differential directions. Any other variable (the Moser time t, say) is a
parameter: d and contraction act on coords only. Coordinates always count
toward the total-degree order; a parameter may carry its own degree cap.

Basis k-forms are indexed by strictly increasing 0-based tuples into coords.
"""

import logging
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from app.exceptions import DimensionError, FormError
from app.padic.valuation import INFINITY, Valuation
from app.series.multiseries import Caps, CapsLike, MultiSeries, cap_tuple, compose, merge_cap, merge_caps

logger = logging.getLogger("padic_darboux")

Subset = Tuple[int, ...]


def _union_vars(*groups: Iterable[str]) -> Tuple[str, ...]:
    names: Tuple[str, ...] = ()
    for group in groups:
        names += tuple(v for v in group if v not in names)
    return names


def _ring_caps(
    names: Tuple[str, ...], coords: Tuple[str, ...], requested: CapsLike, series: Iterable[MultiSeries]
) -> Caps:
    caps = merge_caps(names, *(s.caps for s in series))
    if requested is not None:
        if isinstance(requested, Mapping):
            wanted = {v: c for v, c in requested.items()}
            unknown = [v for v in wanted if v not in names]
            if unknown:
                raise FormError(f"degree caps for unknown variables {unknown}")
            caps = tuple(merge_cap(c, wanted[v], v) if v in wanted else c for v, c in zip(names, caps))
        else:
            caps = merge_caps(names, caps, cap_tuple(names, requested))
    return tuple(None if v in coords and c == INFINITY else c for v, c in zip(names, caps))


def _check_subset(subset: Subset, degree: int, size: int) -> Subset:
    subset = tuple(int(i) for i in subset)
    if len(subset) != degree:
        raise FormError(f"subset {subset} has wrong size for a {degree}-form")
    if any(b <= a for a, b in zip(subset, subset[1:])):
        raise FormError(f"subset {subset} is not strictly increasing")
    if subset and (subset[0] < 0 or subset[-1] >= size):
        raise FormError(f"subset {subset} out of range for {size} coordinates")
    return subset


def _merge_sign(s: Subset, t: Subset) -> int:
    """Sign of the permutation sorting the concatenation s + t."""
    inversions = sum(1 for a in s for b in t if a > b)
    return -1 if inversions % 2 else 1


class KForm:
    """A differential k-form sum_S a_S dx_S with series coefficients."""

    __slots__ = ("degree", "coords", "vars", "order", "center", "caps", "terms")

    def __init__(
        self,
        degree: int,
        coords: Sequence[str],
        terms: Optional[Mapping[Sequence[int], MultiSeries]] = None,
        *,
        vars: Optional[Sequence[str]] = None,
        order: Optional[int] = None,
        center: Optional[Sequence] = None,
        caps: CapsLike = None,
    ):
        if degree < 0:
            raise FormError(f"form degree must be >= 0, got {degree}")
        coords = tuple(coords)
        if len(set(coords)) != len(coords):
            raise FormError(f"coordinates must be distinct: {coords}")
        terms = dict(terms or {})
        names = _union_vars(vars or (), *(c.vars for c in terms.values()), coords)
        if order is None:
            if not terms:
                raise FormError("order is required for a form without terms")
            order = min(c.order for c in terms.values())

        if center is None:
            center_map: Dict[str, Fraction] = {}
            for c in terms.values():
                center_map.update(zip(c.vars, c.center))
            ring_center = tuple(center_map.get(v, Fraction(0)) for v in names)
        else:
            ring_center = tuple(Fraction(x) for x in center)
            if len(ring_center) != len(names):
                raise DimensionError(f"center has {len(ring_center)} entries for {len(names)} variables")

        aligned: Dict[Subset, MultiSeries] = {}
        for subset, coefficient in terms.items():
            key = _check_subset(subset, degree, len(coords))
            if not isinstance(coefficient, MultiSeries):
                raise FormError(f"coefficient for {key} is not a MultiSeries")
            c = coefficient.align(names, dict(zip(names, ring_center)))
            if c.center != ring_center:
                raise FormError(f"coefficient for {key} has center {c.center}, expected {ring_center}")
            if c.order < order:
                raise FormError(f"coefficient for {key} has order {c.order} < form order {order}")
            aligned[key] = c
        ring_caps = _ring_caps(names, coords, caps, aligned.values())
        clean = {}
        for key, c in aligned.items():
            c = c.truncate(order, ring_caps)
            if not c.is_zero():
                clean[key] = c

        self.degree = degree
        self.coords = coords
        self.vars = names
        self.order = order
        self.center = ring_center
        self.caps: Caps = ring_caps
        self.terms = clean

    @classmethod
    def _raw(cls, degree, coords, vars, order, center, terms, caps=None) -> "KForm":
        obj = object.__new__(cls)
        obj.degree = degree
        obj.coords = coords
        obj.vars = vars
        obj.order = order
        obj.center = center
        obj.caps = caps if caps is not None else (None,) * len(vars)
        obj.terms = {s: c for s, c in terms.items() if not c.is_zero()}
        return obj

    @classmethod
    def zero(cls, degree: int, coords: Sequence[str], order: int,
             vars: Optional[Sequence[str]] = None, center: Optional[Sequence] = None,
             caps: CapsLike = None) -> "KForm":
        return cls(degree, coords, {}, vars=_union_vars(vars or (), coords), order=order, center=center, caps=caps)

    def __repr__(self) -> str:
        return f"KForm(degree={self.degree}, coords={self.coords}, order={self.order}, terms={len(self.terms)})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, KForm):
            return NotImplemented
        return (
            self.degree == other.degree
            and self.coords == other.coords
            and self.vars == other.vars
            and self.order == other.order
            and self.caps == other.caps
            and self.center == other.center
            and self.terms == other.terms
        )

    __hash__ = None

    @property
    def parameters(self) -> Tuple[str, ...]:
        return tuple(v for v in self.vars if v not in self.coords)

    def coefficient(self, subset: Sequence[int]) -> MultiSeries:
        found = self.terms.get(tuple(subset))
        if found is None:
            return self.box()
        return found

    def box(self) -> MultiSeries:
        """The zero series of the coefficient ring, carrying its truncation box."""
        return MultiSeries.zero(self.vars, self.order, self.center, self.caps)

    def sorted_terms(self) -> List[Tuple[Subset, MultiSeries]]:
        return sorted(self.terms.items())

    def is_zero(self) -> bool:
        return not self.terms

    def min_valuation(self, ctx) -> Valuation:
        """Valuation of the largest coefficient over all terms."""
        return min((c.min_valuation(ctx) for c in self.terms.values()), default=INFINITY)

    def min_coords_degree(self) -> Valuation:
        """Lowest degree, in the coordinates only, of any coefficient term."""
        idx = [self.vars.index(v) for v in self.coords]
        return min(
            (sum(e[i] for i in idx) for c in self.terms.values() for e in c.terms),
            default=INFINITY,
        )

    # ring bookkeeping -------------------------------------------------

    def align(self, vars: Sequence[str], center: Optional[Mapping[str, object]] = None) -> "KForm":
        names = tuple(vars)
        if names == self.vars:
            return self
        extra = dict(center or {})
        extra.update(zip(self.vars, self.center))
        ring_center = tuple(Fraction(extra.get(v, 0)) for v in names)
        terms = {s: c.align(names, extra) for s, c in self.terms.items()}
        caps = self.box().align(names, extra).caps
        return KForm._raw(self.degree, self.coords, names, self.order, ring_center, terms, caps)

    def rename(self, mapping: Mapping[str, str]) -> "KForm":
        coords = tuple(mapping.get(v, v) for v in self.coords)
        names = tuple(mapping.get(v, v) for v in self.vars)
        terms = {s: c.rename(mapping) for s, c in self.terms.items()}
        return KForm._raw(self.degree, coords, names, self.order, self.center, terms, self.caps)

    def truncate(self, order: Optional[int] = None, caps: CapsLike = None) -> "KForm":
        """Shrink the truncation box of every coefficient."""
        order = self.order if order is None else order
        if order > self.order:
            raise FormError(f"cannot raise form order {self.order} to {order}")
        box = self.box().truncate(order, caps)
        terms = {s: c.truncate(order, box.caps) for s, c in self.terms.items()}
        return KForm._raw(self.degree, self.coords, self.vars, order, self.center, terms, box.caps)

    def agrees_with(self, other: "KForm") -> bool:
        a, b = _unify(self, other)
        if a.degree != b.degree:
            return False
        return (a - b).is_zero()

    # arithmetic -------------------------------------------------------

    def __add__(self, other: "KForm") -> "KForm":
        if not isinstance(other, KForm):
            return NotImplemented
        a, b = _unify(self, other)
        if a.degree != b.degree:
            raise FormError(f"cannot add a {a.degree}-form and a {b.degree}-form")
        order = min(a.order, b.order)
        caps = merge_caps(a.vars, a.caps, b.caps)
        terms = {s: c.truncate(order, caps) for s, c in a.terms.items()}
        for s, c in b.terms.items():
            c = c.truncate(order, caps)
            terms[s] = terms[s] + c if s in terms else c
        return KForm._raw(a.degree, a.coords, a.vars, order, a.center, terms, caps)

    def __neg__(self) -> "KForm":
        return KForm._raw(self.degree, self.coords, self.vars, self.order, self.center,
                          {s: -c for s, c in self.terms.items()}, self.caps)

    def __sub__(self, other: "KForm") -> "KForm":
        if not isinstance(other, KForm):
            return NotImplemented
        return self + (-other)

    def scale(self, factor) -> "KForm":
        """Multiply by a rational constant or by a function (MultiSeries)."""
        if isinstance(factor, MultiSeries):
            names = _union_vars(self.vars, factor.vars)
            form = self.align(names, dict(zip(factor.vars, factor.center)))
            f = factor.align(names, dict(zip(form.vars, form.center)))
            if f.center != form.center:
                raise FormError("function and form have different centers")
            order = min(form.order, f.order)
            caps = merge_caps(names, form.caps, f.caps)
            terms = {s: c * f for s, c in form.terms.items()}
            return KForm._raw(form.degree, form.coords, names, order, form.center, terms, caps)
        factor = Fraction(factor)
        return KForm._raw(self.degree, self.coords, self.vars, self.order, self.center,
                          {s: c.scale(factor) for s, c in self.terms.items()}, self.caps)

    def __mul__(self, other) -> "KForm":
        if isinstance(other, (MultiSeries, int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__


class VectorField:
    """A vector field sum_i X_i d/dx_i over coords, components in the ring `vars`."""

    __slots__ = ("coords", "vars", "order", "center", "caps", "components")

    def __init__(
        self,
        coords: Sequence[str],
        components: Sequence[MultiSeries],
        *,
        vars: Optional[Sequence[str]] = None,
        order: Optional[int] = None,
        center: Optional[Sequence] = None,
        caps: CapsLike = None,
    ):
        coords = tuple(coords)
        if len(components) != len(coords):
            raise DimensionError(f"{len(components)} components for {len(coords)} coordinates")
        names = _union_vars(vars or (), *(c.vars for c in components), coords)
        if order is None:
            order = min(c.order for c in components) if components else 0
        if center is None:
            center_map: Dict[str, Fraction] = {}
            for c in components:
                center_map.update(zip(c.vars, c.center))
            ring_center = tuple(center_map.get(v, Fraction(0)) for v in names)
        else:
            ring_center = tuple(Fraction(x) for x in center)
        aligned = []
        for c in components:
            c = c.align(names, dict(zip(names, ring_center)))
            if c.center != ring_center:
                raise FormError(f"component center {c.center} differs from {ring_center}")
            if c.order < order:
                raise FormError(f"component order {c.order} < field order {order}")
            aligned.append(c)
        ring_caps = _ring_caps(names, coords, caps, aligned)
        self.coords = coords
        self.vars = names
        self.order = order
        self.center = ring_center
        self.caps: Caps = ring_caps
        self.components: Tuple[MultiSeries, ...] = tuple(c.truncate(order, ring_caps) for c in aligned)

    @classmethod
    def zero(cls, coords: Sequence[str], order: int, vars: Optional[Sequence[str]] = None,
             center: Optional[Sequence] = None, caps: CapsLike = None) -> "VectorField":
        names = _union_vars(vars or (), coords)
        zero = MultiSeries.zero(names, order, center, caps)
        return cls(coords, [zero] * len(tuple(coords)), vars=names, order=order, center=zero.center, caps=caps)

    def __repr__(self) -> str:
        return f"VectorField(coords={self.coords}, vars={self.vars}, order={self.order})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, VectorField):
            return NotImplemented
        return (self.coords, self.vars, self.order, self.caps, self.center, self.components) == (
            other.coords, other.vars, other.order, other.caps, other.center, other.components)

    __hash__ = None

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def min_valuation(self, ctx) -> Valuation:
        return min((c.min_valuation(ctx) for c in self.components), default=INFINITY)

    def box(self) -> MultiSeries:
        """The zero series of the component ring, carrying its truncation box."""
        return MultiSeries.zero(self.vars, self.order, self.center, self.caps)

    def degree_in(self, name: str) -> int:
        """Highest power of a variable over all components; -1 for the zero field."""
        return max((c.degree_in(name) for c in self.components), default=-1)

    def align(self, vars: Sequence[str], center: Optional[Mapping[str, object]] = None) -> "VectorField":
        names = tuple(vars)
        if names == self.vars:
            return self
        extra = dict(center or {})
        extra.update(zip(self.vars, self.center))
        caps = self.box().align(names, extra).caps
        return VectorField(self.coords, [c.align(names, extra) for c in self.components],
                           vars=names, order=self.order, caps=caps)

    def rename(self, mapping: Mapping[str, str]) -> "VectorField":
        return VectorField(tuple(mapping.get(v, v) for v in self.coords),
                           [c.rename(mapping) for c in self.components], order=self.order, caps=self.caps)

    def truncate(self, order: Optional[int] = None, caps: CapsLike = None) -> "VectorField":
        order = self.order if order is None else order
        box = self.box().truncate(order, caps)
        return VectorField(self.coords, [c.truncate(order, box.caps) for c in self.components],
                           vars=self.vars, order=order, center=self.center, caps=box.caps)

    def agrees_with(self, other: "VectorField") -> bool:
        if self.coords != other.coords:
            return False
        return all(a.agrees_with(b) for a, b in zip(self.components, other.components))

    def __add__(self, other: "VectorField") -> "VectorField":
        if self.coords != other.coords:
            raise FormError(f"vector fields over different coordinates: {self.coords} vs {other.coords}")
        return VectorField(self.coords, [a + b for a, b in zip(self.components, other.components)])

    def __neg__(self) -> "VectorField":
        return VectorField(self.coords, [-c for c in self.components], vars=self.vars, order=self.order,
                           caps=self.caps)

    def __sub__(self, other: "VectorField") -> "VectorField":
        return self + (-other)

    def scale(self, factor) -> "VectorField":
        if isinstance(factor, MultiSeries):
            return VectorField(self.coords, [c * factor for c in self.components])
        return VectorField(self.coords, [c.scale(factor) for c in self.components],
                           vars=self.vars, order=self.order, center=self.center, caps=self.caps)

    def apply(self, f: MultiSeries) -> MultiSeries:
        """Directional derivative X(f) = sum X_i df/dx_i."""
        total = None
        for name, component in zip(self.coords, self.components):
            term = component * f.partial_derivative(name)
            total = term if total is None else total + term
        if total is None:
            return MultiSeries.zero(f.vars, max(f.order - 1, 0), f.center, f.caps)
        return total


# ----------------------------------------------------------------------
# Ring unification
# ----------------------------------------------------------------------


def _unify(a, b):
    """Align two forms/fields to a common ring; coords must agree."""
    if a.coords != b.coords:
        raise FormError(f"operands over different coordinates: {a.coords} vs {b.coords}")
    names = _union_vars(a.vars, b.vars)
    a2 = a.align(names, dict(zip(b.vars, b.center)))
    b2 = b.align(names, dict(zip(a.vars, a.center)))
    if a2.center != b2.center:
        raise FormError(f"center mismatch: {a2.center} vs {b2.center}")
    return a2, b2


# ----------------------------------------------------------------------
# Constructors
# ----------------------------------------------------------------------


def function_form(f: MultiSeries, coords: Sequence[str]) -> KForm:
    """A function viewed as a 0-form."""
    return KForm(0, coords, {(): f}, vars=_union_vars(f.vars, coords), order=f.order)


def coordinate_differential(name: str, coords: Sequence[str], order: int,
                            vars: Optional[Sequence[str]] = None) -> KForm:
    """The basis 1-form dx for the coordinate `name`; parameters are independent."""
    coords = tuple(coords)
    names = _union_vars(vars or (), coords)
    if name not in coords:
        raise FormError(f"unknown coordinate {name!r}")
    one = MultiSeries.constant(1, coords, order)
    return KForm(1, coords, {(coords.index(name),): one}, vars=names, order=order)


def covector(a: KForm) -> List[MultiSeries]:
    """Coefficient list of a 1-form."""
    if a.degree != 1:
        raise FormError(f"expected a 1-form, got degree {a.degree}")
    return [a.coefficient((i,)) for i in range(len(a.coords))]


def standard_symplectic(coords: Sequence[str], order: int, vars: Optional[Sequence[str]] = None) -> KForm:
    """sum_i dx_{2i} ^ dx_{2i+1} with constant coefficients; parameters are independent."""
    coords = tuple(coords)
    if len(coords) % 2:
        raise FormError(f"symplectic form needs an even number of coordinates, got {len(coords)}")
    names = _union_vars(vars or (), coords)
    one = MultiSeries.constant(1, coords, order)
    return KForm(2, coords, {(2 * i, 2 * i + 1): one for i in range(len(coords) // 2)},
                 vars=names, order=order)


# ----------------------------------------------------------------------
# Operations
# ----------------------------------------------------------------------


def _accumulate(target: Dict[Subset, MultiSeries], key: Subset, value: MultiSeries) -> None:
    if key in target:
        target[key] = target[key] + value
    else:
        target[key] = value


def wedge(a: KForm, b: KForm) -> KForm:
    """Alternating product a ^ b in canonical orientation."""
    a, b = _unify(a, b)
    order = min(a.order, b.order)
    caps = merge_caps(a.vars, a.caps, b.caps)
    terms: Dict[Subset, MultiSeries] = {}
    for s, ca in a.terms.items():
        for t, cb in b.terms.items():
            if set(s) & set(t):
                continue
            product = ca * cb
            if _merge_sign(s, t) < 0:
                product = -product
            _accumulate(terms, tuple(sorted(s + t)), product)
    return KForm._raw(a.degree + b.degree, a.coords, a.vars, order, a.center, terms, caps)


def exterior_d(a: KForm) -> KForm:
    """Exterior derivative in the coordinates; output order = input order - 1."""
    if a.order == 0:
        raise FormError("exterior derivative of an order-0 form carries no information")
    terms: Dict[Subset, MultiSeries] = {}
    for s, c in a.terms.items():
        for i, name in enumerate(a.coords):
            if i in s:
                continue
            dc = c.partial_derivative(name)
            if dc.is_zero():
                continue
            if sum(1 for j in s if j < i) % 2:
                dc = -dc
            _accumulate(terms, tuple(sorted(s + (i,))), dc)
    return KForm._raw(a.degree + 1, a.coords, a.vars, a.order - 1, a.center, terms, a.caps)


def contract(X: VectorField, a: KForm) -> KForm:
    """Interior product: (i_X a)(Y2, ..., Yk) = a(X, Y2, ..., Yk)."""
    if a.degree == 0:
        raise FormError("cannot contract a vector field into a 0-form")
    X, a = _unify(X, a)
    order = min(X.order, a.order)
    caps = merge_caps(a.vars, X.caps, a.caps)
    terms: Dict[Subset, MultiSeries] = {}
    for s, c in a.terms.items():
        for r, i in enumerate(s):
            value = X.components[i] * c
            if r % 2:
                value = -value
            _accumulate(terms, s[:r] + s[r + 1:], value)
    return KForm._raw(a.degree - 1, a.coords, a.vars, order, a.center, terms, caps)


def lie_derivative(X: VectorField, a: KForm) -> KForm:
    """Cartan's formula: L_X a = i_X da + d i_X a."""
    first = contract(X, exterior_d(a))
    if a.degree == 0:
        return first
    return first + exterior_d(contract(X, a))


def time_derivative(a: KForm, name: str) -> KForm:
    """
    Coefficient-wise derivative in a parameter variable. A capped
    parameter loses one degree of its cap; a free one lowers the order.
    """
    if name in a.coords:
        raise FormError(f"{name!r} is a coordinate, not a parameter")
    if name not in a.vars:
        return KForm.zero(a.degree, a.coords, max(a.order - 1, 0), a.vars, a.center)
    box = a.box().partial_derivative(name)
    terms = {s: c.partial_derivative(name) for s, c in a.terms.items()}
    return KForm._raw(a.degree, a.coords, a.vars, box.order, a.center, terms, box.caps)


def pullback(
    mapping: Sequence[MultiSeries],
    a: KForm,
    source_coords: Optional[Sequence[str]] = None,
    exact_map: bool = False,
) -> KForm:
    """
    F^*(a) for F given by one series per target coordinate.

    The series live in the source ring; parameters of `a` are carried to
    the same-named source variables, keeping the degree cap of `a` where
    the map does not cap them itself. With `exact_map=True` the map is an
    exact polynomial and its Jacobian keeps the full order.
    """
    if len(mapping) != len(a.coords):
        raise DimensionError(f"{len(mapping)} map components for {len(a.coords)} target coordinates")
    params = a.parameters
    source_coords = tuple(source_coords) if source_coords is not None else a.coords
    names = _union_vars(source_coords, *(m.vars for m in mapping), params)
    param_center = {v: c for v, c in zip(a.vars, a.center) if v in params}
    components = [m.align(names, param_center) for m in mapping]
    centers = {m.center for m in components}
    if len(centers) > 1:
        raise FormError("map components have different centers")
    center = components[0].center
    map_order = min(m.order for m in components)
    map_caps = list(merge_caps(names, *(m.caps for m in components)))
    for v in params:
        i = names.index(v)
        if map_caps[i] == INFINITY:
            map_caps[i] = a.caps[a.vars.index(v)]
    map_caps = tuple(map_caps)

    substitutions = []
    for v in a.vars:
        if v in a.coords:
            substitutions.append(components[a.coords.index(v)])
        elif map_caps[names.index(v)] == INFINITY:
            substitutions.append(MultiSeries.constant(center[names.index(v)], names, map_order, center, map_caps))
        else:
            substitutions.append(MultiSeries.variable(v, names, map_order, center, map_caps))

    differentials = []
    for m in components:
        partials = [m.partial_derivative(name, polynomial=exact_map) for name in source_coords]
        differentials.append(KForm(1, source_coords, {(j,): p for j, p in enumerate(partials)},
                                   vars=names, order=partials[0].order if partials else map_order,
                                   center=center))

    jacobian_cache: Dict[Subset, KForm] = {}

    def jacobian_wedge(s: Subset) -> KForm:
        found = jacobian_cache.get(s)
        if found is None:
            if len(s) == 1:
                found = differentials[s[0]]
            else:
                found = wedge(jacobian_wedge(s[:-1]), differentials[s[-1]])
            jacobian_cache[s] = found
        return found

    result: Optional[KForm] = None
    for s, c in a.sorted_terms():
        pulled = compose(c, substitutions)
        piece = function_form(pulled, source_coords).align(names) if not s else jacobian_wedge(s).scale(pulled)
        result = piece if result is None else result + piece
    if result is None:
        order = min(a.order, map_order if exact_map else map_order - 1)
        return KForm.zero(a.degree, source_coords, order, names, center, map_caps)
    return result
