"""
Power-series solutions of analytic initial value problems

    dy_i/dx = f_i(x, y_1, ..., y_l),   y(x0) = y0,

with the radius and coefficient-bound certificates that make the
solution a convergent p-adic series.
"""

import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from app.exceptions import DimensionError, HypothesisError, SeriesError
from app.padic.context import PrimeLike, prime_of
from app.padic.valuation import (
    INFINITY,
    Valuation,
    distance_valuation,
    factorial_valuation,
    format_valuation,
    valuation,
)
from app.series.multiseries import MultiSeries, compose, recenter
from app.verification.certificate import Certificate, combine_verdict

logger = logging.getLogger("padic_darboux")

SYMBOLIC = "symbolic"


def initial_variable(name: str) -> str:
    """Name of the formal initial value of the unknown `name`."""
    return f"{name}_0"


@dataclass
class IVPProblem:
    """
    Right-hand sides f_i in the variables (x_var, *y_vars).

    `initial` is either a concrete vector or SYMBOLIC, in which case the
    initial values become formal variables y_0 centered at `v`.
    """

    rhs: List[MultiSeries]
    x_var: str
    y_vars: List[str]
    initial: Union[Sequence, str] = SYMBOLIC
    x0: Fraction = Fraction(0)
    v: Optional[Sequence] = None
    certified: bool = False

    def __post_init__(self):
        self.y_vars = list(self.y_vars)
        if len(self.rhs) != len(self.y_vars):
            raise DimensionError(f"{len(self.rhs)} right-hand sides for {len(self.y_vars)} unknowns")
        ring = (self.x_var, *self.y_vars)
        aligned = []
        for f in self.rhs:
            extra = [name for name in f.vars if name not in ring]
            if extra:
                raise DimensionError(f"right-hand side uses unknown variables {extra}")
            aligned.append(f.align(ring))
        self.rhs = aligned
        self.x0 = Fraction(self.x0)
        self.v = tuple(Fraction(c) for c in self.v) if self.v is not None else (Fraction(0),) * len(self.y_vars)
        if len(self.v) != len(self.y_vars):
            raise DimensionError(f"ball center has {len(self.v)} entries for {len(self.y_vars)} unknowns")
        if not self.symbolic:
            self.initial = tuple(Fraction(c) for c in self.initial)
            if len(self.initial) != len(self.y_vars):
                raise DimensionError(f"{len(self.initial)} initial values for {len(self.y_vars)} unknowns")

    @property
    def dimension(self) -> int:
        return len(self.y_vars)

    @property
    def symbolic(self) -> bool:
        return isinstance(self.initial, str)

    @property
    def initial_names(self) -> List[str]:
        return [initial_variable(y) for y in self.y_vars]

    def rhs_at(self, base: Sequence) -> List[MultiSeries]:
        """Right-hand sides re-expanded about (x0, base)."""
        return [recenter(f, (self.x0, *base)) for f in self.rhs]


@dataclass
class CsTable:
    """C_s = max |c|_p over rhs terms of total y-degree s, as valuations."""

    p: int
    values: List[Valuation] = field(default_factory=list)

    def is_zero(self, s: int) -> bool:
        return s >= len(self.values) or self.values[s] == INFINITY


@dataclass
class IVPSolution:
    problem: IVPProblem
    series: List[MultiSeries]
    order: int
    space_order: Optional[int] = None
    radius_exponent: Optional[int] = None
    certificates: List[Certificate] = field(default_factory=list)

    @property
    def symbolic(self) -> bool:
        return self.problem.symbolic

    def coefficient(self, i: int, j: int) -> Union[Fraction, MultiSeries]:
        """a_ij: the coefficient of (x - x0)^j in y_i."""
        y = self.series[i]
        if not self.symbolic:
            return y.coefficient((j,))
        terms = {e[1:]: c for e, c in y.terms.items() if e[0] == j}
        order = max(self.order - j, 0) if self.space_order is None else self.space_order
        return MultiSeries(y.vars[1:], order, terms, y.center[1:], caps=y.caps[1:])

    def coefficients(self, i: int) -> List[Union[Fraction, MultiSeries]]:
        return [self.coefficient(i, j) for j in range(self.order + 1)]

    def with_scaled_coefficient(self, i: int, j: int, factor) -> "IVPSolution":
        """Copy with a_ij multiplied by `factor` (used for negative controls)."""
        factor = Fraction(factor)
        y = self.series[i]
        terms = {e: (c * factor if e[0] == j else c) for e, c in y.terms.items()}
        series = list(self.series)
        series[i] = MultiSeries(y.vars, y.order, terms, y.center, y.caps)
        return replace(self, series=series, certificates=[])

    def ode_residual(self) -> List[MultiSeries]:
        """dy_i/dx - f_i(x, y(x)); zero through order - 1 for a correct solution."""
        prob = self.problem
        base = prob.v if self.symbolic else prob.initial
        y0 = self.series[0]
        x = MultiSeries.variable(prob.x_var, y0.vars, y0.order, y0.center, y0.caps)
        residuals = []
        for f, y in zip(prob.rhs_at(base), self.series):
            rhs = compose(f, [x, *self.series])
            lhs = y.partial_derivative(prob.x_var)
            residuals.append(lhs - rhs)
        return residuals


def _y_degree(exponent: Tuple[int, ...]) -> int:
    return sum(exponent[1:])


def _check_certified(prob: IVPProblem) -> None:
    for i, f in enumerate(prob.rhs_at(prob.v)):
        low = [e for e in f.terms if _y_degree(e) <= 1]
        if low:
            raise HypothesisError(
                f"f_{i} has terms of y-degree <= 1 about (x0, v), e.g. exponent {sorted(low)[0]}"
            )


def _x_cap(prob: IVPProblem) -> Optional[int]:
    """Degree cap the right-hand sides put on the independent variable, or None when it is free."""
    caps = {f.caps[0] for f in prob.rhs} - {INFINITY}
    if not caps or caps == {None}:
        return None
    if None in caps:
        raise SeriesError(f"right-hand sides disagree on truncating {prob.x_var!r} separately")
    return min(caps)


def _recentering_loss(f: MultiSeries, target: Sequence) -> int:
    """
    Degrees of f lost by re-expanding it about `target`: a term of degree m
    in the moved variables feeds every lower degree, so only degrees up to
    order - m stay exact.

    Raises:
        SeriesError: a moved variable carries its own degree cap
    """
    moved = [i for i, (a, b) in enumerate(zip(f.center, target)) if a != b and f.caps[i] != INFINITY]
    capped = [f.vars[i] for i in moved if f.caps[i] is not None]
    if capped:
        raise SeriesError(f"cannot re-expand about a new point in the separately truncated variables {capped}")
    return max((sum(e[i] for i in moved) for e in f.terms), default=0)


def ivp_solve(prob: IVPProblem, order: int) -> IVPSolution:
    """
    Solve the IVP degree by degree.

    a_{i,k+1} = [coefficient of (x - x0)^k in f_i(x, y(x))] / (k + 1),
    computed by substituting the partial solution into f. Symbolic mode
    produces a_ij as polynomials in the initial-value variables.

    Re-expanding f about (x0, base) costs the largest degree its terms
    reach in the moved variables (the loss). With x free the result
    order is min(order, min f order - loss + 1) in total degree. When the
    right-hand sides cap x at k (symbolic mode only) the solution is
    carried to x-degree min(order, k + 1) and keeps min f order - loss as
    its order in the initial values.

    Raises:
        HypothesisError: certified mode and some f_i has y-degree 0 or 1 terms
        SeriesError: x capped with concrete initial values, or a capped
            variable would have to be re-expanded
    """
    if prob.certified:
        _check_certified(prob)

    if prob.symbolic:
        names = (prob.x_var, *prob.initial_names)
        center = (prob.x0, *prob.v)
        base = prob.v
    else:
        names = (prob.x_var,)
        center = (prob.x0,)
        base = prob.initial
    loss = max(_recentering_loss(f, (prob.x0, *base)) for f in prob.rhs)
    space = min(f.order for f in prob.rhs) - loss
    rhs = prob.rhs_at(base)

    x_cap = _x_cap(prob)
    if x_cap is None:
        n_steps = min(order, space + 1)
        ring_order, caps = n_steps, None
    else:
        if not prob.symbolic:
            raise SeriesError(f"a right-hand side capped in {prob.x_var!r} needs symbolic initial values")
        n_steps = min(order, x_cap + 1)
        ring_order, caps = space, {prob.x_var: n_steps}

    x = MultiSeries.variable(prob.x_var, names, ring_order, center, caps)
    if prob.symbolic:
        ys = [MultiSeries.variable(name, names, ring_order, center, caps) for name in prob.initial_names]
    else:
        ys = [MultiSeries.constant(c, names, ring_order, center, caps) for c in prob.initial]

    logger.debug(
        f"ivp_solve: {prob.dimension} unknowns, {n_steps} steps, loss {loss}, "
        f"symbolic={prob.symbolic}, x capped={x_cap is not None}"
    )
    for k in range(n_steps):
        substitution = [x, *ys]
        updates: List[Dict[Tuple[int, ...], Fraction]] = []
        for f in rhs:
            value = compose(f, substitution)
            step: Dict[Tuple[int, ...], Fraction] = {}
            for e, c in value.terms.items():
                stepped = (k + 1,) + e[1:]
                if e[0] == k and x.contains(stepped):
                    step[stepped] = c / (k + 1)
            updates.append(step)
        ys = [
            MultiSeries._raw(y.vars, y.order, {**y.terms, **step}, y.center, y.caps) if step else y
            for y, step in zip(ys, updates)
        ]

    return IVPSolution(
        problem=prob, series=ys, order=n_steps, space_order=None if x_cap is None else space
    )


def cs_table(prob: IVPProblem, ctx: PrimeLike) -> CsTable:
    """C_s over all f_i re-expanded about (x0, v), for s = 0..order."""
    rhs = prob.rhs_at(prob.v)
    top = max(f.order for f in rhs)
    values: List[Valuation] = [INFINITY] * (top + 1)
    for f in rhs:
        for e, c in f.terms.items():
            s = _y_degree(e)
            values[s] = min(values[s], valuation(c, ctx))
    return CsTable(p=prime_of(ctx), values=values)


def admissible_radius(prob: IVPProblem, ctx: PrimeLike) -> int:
    """
    Largest radius exponent e with r^(s-1) C_s <= 1 for 2 <= s <= order,
    where r = p^e. Degrees beyond the truncation are not constrained; with
    no constraint at all (a zero right-hand side) r = 1 is returned.

    Raises:
        HypothesisError: C_0 or C_1 is nonzero
    """
    table = cs_table(prob, ctx)
    if not table.is_zero(0) or not table.is_zero(1):
        raise HypothesisError("right-hand side has terms of y-degree 0 or 1 about (x0, v)")
    constraints = [v // (s - 1) for s, v in enumerate(table.values) if s >= 2 and v != INFINITY]
    return min(constraints, default=0)


def check_bound(sol: IVPSolution, radius_exponent: int, ctx: PrimeLike) -> Certificate:
    """
    Verify |a_ij|_p <= r / |j!|_p for every computed coefficient, r = p^radius_exponent.

    The j = 0 coefficient is measured from the ball center v.

    Raises:
        HypothesisError: symbolic solution, or |y0 - v|_p > r
    """
    prob = sol.problem
    if sol.symbolic:
        raise HypothesisError("coefficient bounds need a concrete initial value")
    if distance_valuation(prob.initial, prob.v, ctx) < -radius_exponent:
        raise HypothesisError(f"initial value lies outside the ball of radius p^{radius_exponent}")

    first: Optional[Dict[str, object]] = None
    for i in range(prob.dimension):
        for j in range(sol.order + 1):
            a = sol.coefficient(i, j)
            if j == 0:
                a -= prob.v[i]
            v = valuation(a, ctx)
            required = -(radius_exponent + factorial_valuation(j, ctx))
            if v < required and first is None:
                first = {"component": i, "index": j, "valuation": format_valuation(v), "required": required}

    verdict = combine_verdict(first is None)
    logger.info(f"check_bound r=p^{radius_exponent}: {verdict.value}")
    details = {"radius_exponent": radius_exponent, "components": prob.dimension}
    if first is not None:
        details["violation"] = first
    return Certificate(
        name="check_bound",
        verdict=verdict,
        checked_through=sol.order,
        first_violation=None if first is None else f"y_{first['component']} coefficient j={first['index']}",
        details=details,
        notes=[
            f"coefficients beyond j={sol.order} are unverified",
            "the bound gives convergence of y on |x - x0|_p <= p^(-d)",
        ],
    )
