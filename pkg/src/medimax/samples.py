"""Named input generators: indicators, ramps, steps, the w_t weights and random instances."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .grid import Universe, as_fraction
from .stepfn import IndicatorSet, StepFunction, Weight

DENOMINATORS = (8, 64)
WEIGHT_EXPONENTS = range(-3, 4)


def box_mask(universe: Universe, bounds) -> np.ndarray:
    """Cells lying inside the box ``prod [lo_i, hi_i)``."""
    axes = []
    for ax, (lo, hi) in enumerate(bounds):
        lo, hi = as_fraction(lo), as_fraction(hi)
        o, h = universe.origin[ax], universe.cell
        i = np.arange(universe.extent[ax])
        left = np.array([o + k * h for k in i], dtype=object)
        axes.append(((left >= lo) & (left + h <= hi)).astype(bool))
    mask = axes[0]
    for a in axes[1:]:
        mask = np.multiply.outer(mask, a)
    return mask.astype(bool)


def indicator(universe: Universe, lo, hi) -> StepFunction:
    """``chi_[lo, hi)`` in 1-D, or of the cube ``[lo, hi)^n``."""
    return IndicatorSet(universe, box_mask(universe, [(lo, hi)] * universe.dim)).indicator()


def ramp(universe: Universe) -> StepFunction:
    """``f(x) = x_1`` sampled at cell centres."""
    centers = universe.centers(0)
    return StepFunction.from_cells(universe, lambda idx: centers[idx[0]])


def step(universe: Universe, at, left=0, right=1) -> StepFunction:
    """``left`` on cells left of ``at`` (first axis), ``right`` from ``at`` on."""
    at = as_fraction(at)
    o, h = universe.origin[0], universe.cell
    return StepFunction.from_cells(universe, lambda idx: left if o + idx[0] * h < at else right)


def w_t(t, radius=10, cell=Fraction(1, 10)) -> Weight:
    """``t`` on ``[-1, 1)``, 1 elsewhere, on the universe ``[-radius, radius)``."""
    return w_t_on(Universe.interval(-as_fraction(radius), as_fraction(radius), cell), t)


def w_t_on(universe: Universe, t, lo=-1, hi=1) -> Weight:
    """``t`` on the cube ``[lo, hi)^n`` and 1 elsewhere, on a given universe."""
    t = as_fraction(t)
    mask = box_mask(universe, [(lo, hi)] * universe.dim)
    vals = np.where(mask, t, Fraction(1)).astype(object)
    return Weight(universe, vals)


def random_function(universe: Universe, rng: np.random.Generator, nonneg: bool = False) -> StepFunction:
    """Values ``k/q`` with ``q`` in {8, 64} and ``k`` uniform in ``[-q, q]`` (``[0, q]`` when ``nonneg``)."""
    q = int(rng.choice(DENOMINATORS))
    ks = rng.integers(0 if nonneg else -q, q + 1, size=universe.n_cells)
    return StepFunction(universe, [Fraction(int(k), q) for k in ks])


def random_sparse_function(universe: Universe, rng: np.random.Generator, density: float = 0.4) -> StepFunction:
    """Random function with roughly ``density`` of its cells non-zero (exercises zero medians)."""
    f = random_function(universe, rng)
    keep = rng.random(universe.n_cells) < density
    vals = f.values.ravel().copy()
    vals[~keep] = Fraction(0)
    return StepFunction(universe, vals)


def random_weight(universe: Universe, rng: np.random.Generator) -> Weight:
    """Cell values ``2^j`` with ``j`` uniform in ``[-3, 3]``."""
    js = rng.integers(WEIGHT_EXPONENTS.start, WEIGHT_EXPONENTS.stop, size=universe.n_cells)
    return Weight(universe, [Fraction(2) ** int(j) for j in js])


def random_compact(universe: Universe, rng: np.random.Generator, core) -> StepFunction:
    """Random function vanishing outside the cell box ``core`` (a tuple of slices)."""
    f = random_sparse_function(universe, rng, density=0.6)
    vals = np.empty(universe.extent, dtype=object)
    vals.fill(Fraction(0))
    vals[core] = f.values[core]
    return StepFunction(universe, vals)


def random_subset(universe: Universe, rng: np.random.Generator, p: float = 0.5) -> IndicatorSet:
    return IndicatorSet(universe, rng.random(universe.extent) < p)
