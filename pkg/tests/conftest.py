import random
from fractions import Fraction
from itertools import combinations

import pytest

from app.exterior.forms import KForm, VectorField
from app.padic.context import Context
from app.series.multiseries import MultiSeries

SEED = 20240611


def _exponent(rng, n, lo, hi):
    e = [0] * n
    for _ in range(rng.randint(lo, hi)):
        e[rng.randrange(n)] += 1
    return tuple(e)


def _coefficient(rng):
    return Fraction(rng.randint(-9, 9), rng.choice([1, 2, 3, 5, 7, 25]))


@pytest.fixture
def rng():
    return random.Random(SEED)


@pytest.fixture
def ctx5():
    return Context(p=5, D=6, Dt=5)


@pytest.fixture
def random_series(rng):
    """Factory for sparse random series; `min_degree` keeps low terms out."""

    def make(vars, order, terms=4, min_degree=0):
        n = len(vars)
        raw = {_exponent(rng, n, min_degree, order): _coefficient(rng) for _ in range(terms)}
        return MultiSeries(vars, order, raw)

    return make


@pytest.fixture
def random_form(rng, random_series):
    def make(degree, coords, order, terms=3, min_degree=0):
        subsets = list(combinations(range(len(coords)), degree))
        chosen = {rng.choice(subsets) for _ in range(terms)}
        return KForm(
            degree,
            coords,
            {s: random_series(coords, order, min_degree=min_degree) for s in chosen},
            vars=coords,
            order=order,
        )

    return make


@pytest.fixture
def random_field(random_series):
    def make(coords, order, min_degree=0):
        return VectorField(coords, [random_series(coords, order, min_degree=min_degree) for _ in coords])

    return make


@pytest.fixture
def random_map(random_series):
    """Map fixing the origin: x_i + (random terms of degree >= 1)."""

    def make(coords, order):
        return [
            MultiSeries.variable(name, coords, order) + random_series(coords, order, terms=3, min_degree=1)
            for name in coords
        ]

    return make
