"""Medians and tau-quantile statistics of a step function on a cube.

All cells of a universe have equal measure, so every set-measure
comparison reduces to counting cells.  Functions ending in ``_of`` take
the raw sequence of cell values (any box of cells, not only cubes); the
others take ``(f, Q)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .grid import DomainError, GridCube, as_fraction
from .stepfn import StepFunction


@dataclass(frozen=True)
class MedianInterval:
    """The closed interval ``[lo, hi]`` of all medians."""

    lo: Fraction
    hi: Fraction

    def __contains__(self, alpha) -> bool:
        return self.lo <= alpha <= self.hi

    def max_abs(self) -> Fraction:
        # tie |lo| == |hi| resolves to the upper endpoint
        return self.hi if abs(self.hi) >= abs(self.lo) else self.lo


def is_median_of(values: Sequence, alpha) -> bool:
    """Direct check of ``|{f < a}| <= N/2`` and ``|{f > a}| <= N/2``."""
    n = len(values)
    below = sum(1 for v in values if v < alpha)
    above = sum(1 for v in values if v > alpha)
    return 2 * below <= n and 2 * above <= n


def median_interval_of(values: Sequence) -> MedianInterval:
    vals = sorted(values)
    n = len(vals)
    if n == 0:
        raise DomainError("median of an empty cube")
    # lo: least v with #{f <= v} >= n/2; hi: greatest v with #{f >= v} >= n/2
    j = (n + 1) // 2
    return MedianInterval(vals[j - 1], vals[n - j])


def tau_median_of(values: Sequence, tau) -> Fraction:
    """Largest ``a >= 0`` with ``#{|f| >= a} >= tau * N``."""
    tau = as_fraction(tau)
    if not 0 < tau < 1:
        raise DomainError(f"tau must lie in (0, 1), got {tau}")
    mags = sorted((abs(v) for v in values), reverse=True)
    if not mags:
        raise DomainError("tau-median of an empty cube")
    return mags[math.ceil(tau * len(mags)) - 1]


def median_interval(f: StepFunction, q: GridCube) -> MedianInterval:
    return median_interval_of(f.cube_values(q).tolist())


def median_max_abs(f: StepFunction, q: GridCube) -> Fraction:
    """``m_f(Q)``, the median of largest absolute value."""
    return median_interval(f, q).max_abs()


def tau_median(f: StepFunction, q: GridCube, tau) -> Fraction:
    """``m^tau_f(Q)``; the supremum is attained, so ``|Q ∩ {|f| >= m}| >= tau |Q|``."""
    return tau_median_of(f.cube_values(q).tolist(), tau)
