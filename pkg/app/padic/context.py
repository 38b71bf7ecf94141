"""
Run context: the prime and the truncation orders every computation uses.
"""

from dataclasses import dataclass
from typing import Optional, Union

from sympy import isprime

from app.config import settings
from app.exceptions import ContextError


@dataclass(frozen=True)
class Context:
    """
    Prime p together with the series truncation orders.

    D is the inclusive total-degree bound for every series and form;
    Dt bounds the time integration (flow) depth.
    """

    p: int
    D: int = 10
    Dt: int = 8

    def __post_init__(self):
        if not isinstance(self.p, int) or self.p < 2 or not isprime(self.p):
            raise ContextError(f"p must be a prime >= 2, got {self.p!r}")
        if self.D < 2:
            raise ContextError(f"series order D must be >= 2, got {self.D}")
        if self.Dt < 1:
            raise ContextError(f"time order Dt must be >= 1, got {self.Dt}")

    @property
    def d(self) -> int:
        """2 when p = 2, otherwise 1."""
        return 2 if self.p == 2 else 1

    @classmethod
    def from_settings(
        cls,
        prime: Optional[int] = None,
        order: Optional[int] = None,
        t_order: Optional[int] = None,
    ) -> "Context":
        return cls(
            p=prime if prime is not None else settings.default_prime,
            D=order if order is not None else settings.default_order,
            Dt=t_order if t_order is not None else settings.default_t_order,
        )


PrimeLike = Union[Context, int]


def prime_of(ctx: PrimeLike) -> int:
    """Accept either a Context or a bare prime."""
    if isinstance(ctx, Context):
        return ctx.p
    if isinstance(ctx, int) and ctx >= 2:
        return ctx
    raise ContextError(f"expected a Context or a prime, got {ctx!r}")
