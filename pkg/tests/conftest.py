from fractions import Fraction

import hypothesis.strategies as st
import numpy as np
from hypothesis import HealthCheck, settings

from medimax.grid import Universe
from medimax.stepfn import StepFunction, Weight

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

CELLS = [Fraction(1), Fraction(1, 2), Fraction(1, 3), Fraction(1, 8), Fraction(1, 10)]


def rationals(q_choices=(8, 64), nonneg=False):
    return st.sampled_from(q_choices).flatmap(
        lambda q: st.integers(0 if nonneg else -q, q).map(lambda k: Fraction(k, q))
    )


@st.composite
def universes(draw, dims=(1, 2), max_1d=12, max_2d=5):
    n = draw(st.sampled_from(dims))
    h = draw(st.sampled_from(CELLS))
    top = max_1d if n == 1 else max_2d
    extent = tuple(draw(st.integers(1, top)) for _ in range(n))
    origin = tuple(draw(st.integers(-3, 3)) * h for _ in range(n))
    return Universe(origin, h, extent)


@st.composite
def step_functions(draw, universe=None, nonneg=False, **kw):
    u = universe if universe is not None else draw(universes(**kw))
    vals = draw(st.lists(rationals(nonneg=nonneg), min_size=u.n_cells, max_size=u.n_cells))
    return StepFunction(u, vals)


@st.composite
def weights(draw, universe=None, positive=True, **kw):
    u = universe if universe is not None else draw(universes(**kw))
    lo = -3 if positive else -4
    js = draw(st.lists(st.integers(lo, 3), min_size=u.n_cells, max_size=u.n_cells))
    return Weight(u, [Fraction(0) if j == -4 else Fraction(2) ** j for j in js])


def line(n, cell=1, origin=0):
    return Universe.interval(origin, origin + n * Fraction(cell), cell)


def fn(values, cell=1, origin=0):
    vals = [Fraction(v) for v in values]
    return StepFunction(line(len(vals), cell, origin), vals)


def grid2(values, cell=1):
    arr = np.array([[Fraction(v) for v in row] for row in values], dtype=object)
    u = Universe((0, 0), cell, arr.shape)
    return StepFunction(u, arr)
