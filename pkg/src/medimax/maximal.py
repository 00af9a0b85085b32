"""Maximal operators over finite cube families.

``brute_maximal`` evaluates a cube statistic on every cube of a family and
takes the cell-wise supremum.  ``dyadic_maximal`` computes the same thing
for one dyadic grid with a bottom-up merge of sorted (value, count)
summaries.  The remaining functions build on these two: the shifted-grid
domination bound, the set operator ``E -> {M^eta chi_E = 1}`` and its
iterates, the expansion inequality, stopping cubes, truncation radii and
median mollification.

For the median and tau kinds the statistic only depends on the order of
the values, so cells are replaced by integer ranks into the sorted table
of distinct ``|f|`` values before any vectorised work.
"""

from __future__ import annotations

import heapq
import itertools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _cubes
from .grid import (
    CubeFamily,
    DomainError,
    DyadicGridSpec,
    GridCube,
    Universe,
    as_fraction,
    covering_scale,
    dyadic_corners,
    frac_str,
    shifted_grids,
)
from .median import median_interval_of
from .stepfn import IndicatorSet, StepFunction, scaled_ints


@dataclass(frozen=True)
class MaximalKind:
    """Which cube statistic the operator maximises: ``median``, ``tau`` or ``hl``."""

    name: str
    tau: Fraction | None = None

    def __post_init__(self):
        if self.name not in ("median", "tau", "hl"):
            raise DomainError(f"unknown maximal kind {self.name!r}")
        if self.name == "tau":
            t = as_fraction(self.tau)
            if not 0 < t < 1:
                raise DomainError(f"tau must lie in (0, 1), got {t}")
            object.__setattr__(self, "tau", t)

    @classmethod
    def median(cls) -> "MaximalKind":
        return cls("median")

    @classmethod
    def tau_(cls, tau) -> "MaximalKind":
        return cls("tau", as_fraction(tau))

    @classmethod
    def hl(cls) -> "MaximalKind":
        return cls("hl")

    def to_json(self) -> dict:
        obj = {"kind": self.name}
        if self.tau is not None:
            obj["tau"] = frac_str(self.tau)
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "MaximalKind":
        return cls(obj["kind"], Fraction(obj["tau"]) if "tau" in obj else None)


MEDIAN = MaximalKind.median()
HL = MaximalKind.hl()


def tau_kind(tau) -> MaximalKind:
    return MaximalKind.tau_(tau)


class _Ranks:
    """Signed and absolute ranks of a function's cell values."""

    def __init__(self, f: StepFunction):
        f.require_exact()
        flat = f.values.ravel().tolist()
        self.signed_levels = sorted(set(flat))
        self.abs_levels = sorted({abs(v) for v in flat} | {Fraction(0)})
        abs_pos = {v: i for i, v in enumerate(self.abs_levels)}
        signed_pos = {v: i for i, v in enumerate(self.signed_levels)}
        self.abs_of_signed = np.array([abs_pos[abs(v)] for v in self.signed_levels], dtype=np.int64)
        self.signed = np.array([signed_pos[v] for v in flat], dtype=np.int64).reshape(f.values.shape)
        self.abs = self.abs_of_signed[self.signed]

    def to_values(self, abs_ranks: np.ndarray) -> np.ndarray:
        table = np.empty(len(self.abs_levels), dtype=object)
        table[:] = self.abs_levels
        return table[abs_ranks]


def _median_abs_rank(sorted_signed: np.ndarray, n: int, r: _Ranks) -> np.ndarray:
    j = (n + 1) // 2
    lo, hi = sorted_signed[:, j - 1], sorted_signed[:, n - j]
    return np.maximum(r.abs_of_signed[lo], r.abs_of_signed[hi])


def _hl_scale(ints: np.ndarray, groups) -> tuple[int, np.dtype]:
    """Common multiple ``L`` of the cube volumes, so ``L * average`` is an integer for every cube."""
    lcm = 1
    for side, _ in groups:
        lcm = math.lcm(lcm, side ** ints.ndim)
    big = int(np.abs(ints).max()) if ints.size else 0
    total = big * max((s ** ints.ndim for s, _ in groups), default=1) * lcm
    return lcm, (np.int64 if total < 2 ** 62 else object)


def hl_max_scaled(ints: np.ndarray, groups) -> tuple[np.ndarray, int]:
    """Averaging maximal function of a non-negative integer array, returned as ``(L * M, L)``."""
    lcm, dtype = _hl_scale(ints, groups)
    pre = _cubes.prefix_sums(ints.astype(dtype))
    out = np.zeros(ints.shape, dtype=dtype)
    for side, corners in groups:
        stats = _cubes.box_sums(pre, corners, side) * (lcm // side ** ints.ndim)
        _cubes.scatter_max(out, corners, side, stats)
    return out, lcm


def _group_stats(f: StepFunction, kind: MaximalKind, groups, ranks: _Ranks | None):
    """Per-group integer rank statistics for the median and tau kinds."""
    out = []
    for side, corners in groups:
        n = side ** f.universe.dim
        if kind.name == "median":
            w = np.sort(_cubes.windows(ranks.signed, corners, side), axis=1)
            stats = _median_abs_rank(w, n, ranks)
        else:
            w = np.sort(_cubes.windows(ranks.abs, corners, side), axis=1)
            stats = w[:, n - math.ceil(kind.tau * n)]
        out.append((side, corners, stats))
    return out


def _zeros(universe: Universe, exact_objects: bool) -> np.ndarray:
    if exact_objects:
        z = np.empty(universe.extent, dtype=object)
        z.fill(Fraction(0))
        return z
    return np.zeros(universe.extent, dtype=np.int64)


def _meta(kind: MaximalKind, family_desc: dict, **extra) -> dict:
    meta = {"operator": kind.to_json(), "family": family_desc}
    meta.update(extra)
    return meta


def brute_maximal(f: StepFunction, family: CubeFamily, kind: MaximalKind) -> StepFunction:
    """Cell-wise max, over the family cubes containing each cell, of the cube statistic.

    Statistics are ``|m_f(Q)|`` (median), ``m^tau_f(Q)`` (tau) or the
    average of ``|f|`` over ``Q`` (hl).  Cells in no family cube get 0.
    """
    if family.universe != f.universe:
        raise DomainError("family and function live on different universes")
    groups = family.groups()
    meta = _meta(kind, family.to_json())
    if not groups:
        warnings.warn("empty cube family; maximal function is identically zero", stacklevel=2)
        meta["warning"] = "empty family"
    if kind.name == "hl":
        ints, d = scaled_ints(np.abs(f.values))
        out, lcm = hl_max_scaled(ints, groups)
        flat = [Fraction(int(v), lcm * d) for v in out.ravel().tolist()]
        values = np.empty(len(flat), dtype=object)
        values[:] = flat
        return StepFunction(f.universe, values.reshape(f.universe.extent), meta)
    ranks = _Ranks(f)
    out = np.zeros(f.universe.extent, dtype=np.int64)
    for side, corners, stats in _group_stats(f, kind, groups, ranks):
        _cubes.scatter_max(out, corners, side, stats)
    return StepFunction(f.universe, ranks.to_values(out), meta)


def hardy_littlewood(f: StepFunction, family: CubeFamily) -> StepFunction:
    return brute_maximal(f, family, HL)


# -- dyadic tree -----------------------------------------------------------------


def _merge(summaries):
    """Merge sorted ``(key, count)`` lists into one, adding counts of equal keys."""
    out = []
    for key, grp in itertools.groupby(heapq.merge(*summaries), key=lambda kc: kc[0]):
        out.append((key, sum(c for _, c in grp)))
    return out


def _leaf_summary(block: np.ndarray):
    keys, counts = np.unique(block, return_counts=True)
    return list(zip(keys.tolist(), counts.tolist()))


def _kth_smallest(summary, k: int):
    acc = 0
    for key, c in summary:
        acc += c
        if acc >= k:
            return key
    raise AssertionError("rank beyond summary size")


def _summary_stat(summary, n: int, kind: MaximalKind, ranks: _Ranks):
    if kind.name == "median":
        j = (n + 1) // 2
        lo = _kth_smallest(summary, j)
        hi = _kth_smallest(summary, n - j + 1)
        return max(ranks.abs_of_signed[lo], ranks.abs_of_signed[hi])
    return _kth_smallest(summary, n - math.ceil(kind.tau * n) + 1)


def dyadic_node_stats(f: StepFunction, grid: DyadicGridSpec, kind: MaximalKind):
    """Statistic of every grid cube inside the universe, computed bottom-up.

    Returns ``(levels, to_value)`` where ``levels`` maps each scale to
    ``(side, corners, stats)`` and ``to_value`` turns a stat into a Fraction.
    """
    u = f.universe
    if grid.dim != u.dim:
        raise DomainError("grid and universe dimensions differ")
    if grid.cell_lattice(u, grid.scale_range[1]) is None:
        raise DomainError(f"finest scale {grid.scale_range[1]} of the grid is not aligned with the cells")
    n_dim = u.dim
    if kind.name == "hl":
        ints, d = scaled_ints(np.abs(f.values))
        ranks = None
    else:
        ranks = _Ranks(f)
        keyed = ranks.signed if kind.name == "median" else ranks.abs
    levels = {}
    prev = None
    for k in reversed(grid.scales):
        side, corners = dyadic_corners(grid, u, k)
        n = side ** n_dim
        summaries, stats = [], []
        for corner in corners:
            corner = tuple(int(c) for c in corner)
            if prev is None:
                sl = tuple(slice(c, c + side) for c in corner)
                if kind.name == "hl":
                    summ = (int(ints[sl].sum()), n)
                else:
                    summ = _leaf_summary(keyed[sl])
            else:
                half = side // 2
                kids = [
                    prev[tuple(c + half * b for c, b in zip(corner, bits))]
                    for bits in itertools.product((0, 1), repeat=n_dim)
                ]
                if kind.name == "hl":
                    summ = (sum(s for s, _ in kids), n)
                else:
                    summ = _merge(kids)
            summaries.append(summ)
            stats.append(Fraction(summ[0], d * n) if kind.name == "hl" else _summary_stat(summ, n, kind, ranks))
        prev = {tuple(int(c) for c in corner): s for corner, s in zip(corners, summaries)}
        levels[k] = (side, corners, stats)
    if kind.name == "hl":
        return levels, lambda s: s
    return levels, lambda s: ranks.abs_levels[s]


def dyadic_maximal(f: StepFunction, grid: DyadicGridSpec, kind: MaximalKind) -> StepFunction:
    """Maximal function over one dyadic grid via a bottom-up summary merge and a top-down max."""
    levels, to_value = dyadic_node_stats(f, grid, kind)
    out = _zeros(f.universe, True)
    for k in sorted(levels):
        side, corners, stats = levels[k]
        for corner, s in zip(corners, stats):
            v = to_value(s)
            sl = tuple(slice(int(c), int(c) + side) for c in corner)
            block = out[sl]
            block[(block < v).astype(bool)] = v
    meta = _meta(kind, CubeFamily.dyadic(f.universe, grid).to_json())
    return StepFunction(f.universe, out, meta)


# -- shifted-grid domination ------------------------------------------------------


def domination_setup(universe: Universe) -> tuple[int, int, int]:
    """``(refine, k_fine, margin)`` making every shifted grid cell-aligned and covering all cubes.

    The universe is refined ``refine`` times so that the scale ``k_fine``
    (``3h <= 2^-k_fine < 6h``) of every shifted grid is a union of
    subcells, then padded by ``margin`` subcells so that each cube of the
    universe has its covering cube inside the padded window.
    """
    h = universe.cell
    k_fine = covering_scale(h)
    r = (Fraction(2) ** -k_fine / (3 * h)).denominator
    for o in universe.origin:
        r = math.lcm(r, (o / h).denominator)
    margin = 5 * r * max(universe.extent)
    return r, k_fine, margin


def domination_bound(f: StepFunction, tau) -> StepFunction:
    """Cell-wise max over the ``2^n`` shifted grids of ``M^{6^-n tau}_D f``.

    The computation runs on a refined, zero-padded copy of the universe;
    the returned value on each original cell is the minimum over its
    subcells, which still dominates ``M^tau f`` there.
    """
    tau = as_fraction(tau)
    n = f.universe.dim
    r, k_fine, margin = domination_setup(f.universe)
    fine = f.refine(r)
    padded_u = fine.universe.pad(margin)
    fp = fine.embed(padded_u)
    kind = tau_kind(tau / 6 ** n)
    best = None
    for g in shifted_grids(n):
        spec = DyadicGridSpec.fitting(padded_u, g.shift, k_max=k_fine)
        dm = dyadic_maximal(fp, spec, kind).values
        best = dm if best is None else np.where((dm > best).astype(bool), dm, best)
    inner = StepFunction(padded_u, best).restrict(fine.universe).values
    shape = []
    for e in f.universe.extent:
        shape += [e, r]
    blocks = inner.reshape(shape)
    coarse = np.empty(f.universe.extent, dtype=object)
    for idx in np.ndindex(*f.universe.extent):
        sl = []
        for i in idx:
            sl += [i, slice(None)]
        coarse[idx] = min(blocks[tuple(sl)].ravel().tolist())
    meta = {"operator": {"kind": "domination", "tau": frac_str(tau)}, "refine": r, "k_fine": k_fine}
    return StepFunction(f.universe, coarse, meta)


# -- set operator -----------------------------------------------------------------


def set_maximal(e: IndicatorSet, eta, family: CubeFamily) -> IndicatorSet:
    """Cells lying in some family cube ``Q`` with ``|E ∩ Q| >= eta |Q|``."""
    eta = as_fraction(eta)
    if not 0 < eta < 1:
        raise DomainError(f"eta must lie in (0, 1), got {eta}")
    if family.universe != e.universe:
        raise DomainError("family and set live on different universes")
    pre = _cubes.prefix_sums(e.mask.astype(np.int64))
    out = np.zeros(e.universe.extent, dtype=np.int64)
    for side, corners in family.groups():
        counts = _cubes.box_sums(pre, corners, side)
        hit = counts * eta.denominator >= eta.numerator * side ** e.universe.dim
        if np.any(hit):
            _cubes.scatter_max(out, corners[hit], side, np.ones(int(hit.sum()), dtype=np.int64))
    return IndicatorSet(e.universe, out.astype(bool))


def iterate_set_maximal(e: IndicatorSet, eta, family: CubeFamily, k: int) -> IndicatorSet:
    if k < 1:
        raise DomainError("iteration count must be positive")
    for _ in range(k):
        nxt = set_maximal(e, eta, family)
        if nxt == e:
            break
        e = nxt
    return e


Intervals = list[tuple[Fraction, Fraction]]


def normalize_intervals(intervals) -> Intervals:
    """Sorted, disjoint, non-degenerate half-open intervals (touching ones merged)."""
    out: Intervals = []
    for a, b in sorted((as_fraction(a), as_fraction(b)) for a, b in intervals):
        if b <= a:
            continue
        if out and a <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def intervals_measure(intervals: Intervals, window: tuple | None = None) -> Fraction:
    total = Fraction(0)
    for a, b in intervals:
        if window is not None:
            a, b = max(a, window[0]), min(b, window[1])
        if b > a:
            total += b - a
    return total


def continuum_set_maximal_1d(intervals, eta) -> Intervals:
    """``{x : |E ∩ I| >= eta |I| for some interval I containing x}`` for a finite union ``E``, up to null sets.

    With ``G(x) = |E ∩ (-inf, x)| - eta x`` an interval ``[a, b)`` qualifies
    iff ``G(b) >= G(a)``.  A point is covered iff the running minimum of
    ``G`` to its left is below the running maximum to its right, which is
    decided exactly between consecutive endpoints because ``G`` is linear
    there with slope ``1 - eta`` on ``E`` and ``-eta`` off it.
    """
    eta = as_fraction(eta)
    if not 0 < eta < 1:
        raise DomainError(f"eta must lie in (0, 1), got {eta}")
    e = normalize_intervals(intervals)
    if not e:
        return []
    pts = [e[0][0]]
    in_e = []
    for i, (a, b) in enumerate(e):
        if i:
            pts.append(a)
            in_e.append(False)
        pts.append(b)
        in_e.append(True)
    g = [Fraction(0)]
    for i in range(len(in_e)):
        length = pts[i + 1] - pts[i]
        g.append(g[-1] + (length if in_e[i] else 0) - eta * length)
    pre_min = list(itertools.accumulate(g, min))
    suf_max = list(itertools.accumulate(reversed(g), max))[::-1]
    out = [(pts[0] - (suf_max[0] - g[0]) / eta, pts[0])]
    for i, inside in enumerate(in_e):
        p, q = pts[i], pts[i + 1]
        if inside:
            out.append((p, q))
            continue
        u1 = p + (g[i] - pre_min[i]) / eta
        u2 = p + (g[i] - suf_max[i + 1]) / eta
        if u1 > u2:
            out.append((p, q))
        else:
            out += [(p, min(u1, q)), (max(u2, p), q)]
    out.append((pts[-1], pts[-1] + (g[-1] - pre_min[-1]) / eta))
    return normalize_intervals(out)


def iterate_continuum_1d(intervals, eta, k: int) -> Intervals:
    e = normalize_intervals(intervals)
    for _ in range(k):
        e = continuum_set_maximal_1d(e, eta)
    return e


def set_to_intervals(e: IndicatorSet) -> Intervals:
    if e.universe.dim != 1:
        raise DomainError("interval form needs a 1-D set")
    o, h = e.universe.origin[0], e.universe.cell
    return normalize_intervals((o + i * h, o + (i + 1) * h) for i in np.flatnonzero(e.mask))


def expansion_factor(eta, n: int) -> Fraction:
    """``1 + (1/eta - 1) / 2^n``."""
    eta = as_fraction(eta)
    return 1 + (1 / eta - 1) / Fraction(2) ** n


@dataclass(frozen=True)
class ExpansionResult:
    lhs: Fraction
    rhs: Fraction
    passed: bool
    method: str


def expansion_check(e: IndicatorSet, q: GridCube, eta, method: str = "auto", refine: int = 3) -> ExpansionResult:
    """Evaluate ``|M^eta(E) ∩ Q|`` against ``(1 + (1/eta - 1)/2^n) |E|`` for ``E ⊆ Q``, ``|E| <= eta |Q|``.

    ``method="continuum"`` (1-D only) uses every real interval and is exact.
    ``method="grid"`` uses all cubes aligned to the cell lattice refined
    ``refine`` times; those are genuine cubes, so the left side is a lower
    bound for the all-cubes value and a pass is conclusive.  ``"auto"``
    picks continuum in 1-D and grid otherwise.
    """
    eta = as_fraction(eta)
    u = e.universe
    u.check(q)
    inside = np.zeros(u.extent, dtype=bool)
    inside[q.slices()] = True
    if np.any(e.mask & ~inside):
        raise DomainError("E is not contained in Q")
    if e.count * eta.denominator > eta.numerator * q.n_cells:
        raise DomainError("|E| > eta |Q|: the expansion inequality does not apply")
    rhs = expansion_factor(eta, u.dim) * e.measure
    if method == "auto":
        method = "continuum" if u.dim == 1 else "grid"
    if method == "continuum":
        qc = u.to_cube(q)
        m = continuum_set_maximal_1d(set_to_intervals(e), eta)
        lhs = intervals_measure(m, (qc.corner[0], qc.corner[0] + qc.side))
    elif method == "grid":
        # cubes with density >= eta have |P| <= |E|/eta <= |Q|, so side(Q)-1 cells of margin suffice
        local = Universe(u.to_cube(q).corner, u.cell, (q.side,) * u.dim)
        sub = IndicatorSet(local, e.mask[q.slices()])
        big = sub.refine(refine)
        pad = big.universe.pad(q.side * refine - 1)
        mask = np.zeros(pad.extent, dtype=bool)
        k = q.side * refine - 1
        mask[tuple(slice(k, k + q.side * refine) for _ in range(u.dim))] = big.mask
        hit = set_maximal(IndicatorSet(pad, mask), eta, CubeFamily.all_cubes(pad, q.side * refine))
        cnt = int(hit.mask[tuple(slice(k, k + q.side * refine) for _ in range(u.dim))].sum())
        lhs = cnt * pad.cell_measure
        method = f"grid/{refine}"
    else:
        raise DomainError(f"unknown method {method!r}")
    return ExpansionResult(lhs, rhs, lhs >= rhs, method)


def iteration_bound(eta, n: int, e_measure, q_measure) -> int:
    """``ceil(log(eta |Q| / |E|) / log(1 + (1/eta - 1)/2^n))``: iterations needed for density ``eta`` in ``Q``."""
    ratio = as_fraction(eta) * as_fraction(q_measure) / as_fraction(e_measure)
    if ratio <= 1:
        return 0
    c = expansion_factor(eta, n)
    # exact search for the least k with c^k >= ratio
    k = max(0, math.floor(math.log(ratio) / math.log(c)) - 1)
    while c ** k < ratio:
        k += 1
    return k


# -- stopping cubes ---------------------------------------------------------------


@dataclass(frozen=True)
class StoppingDecomposition:
    level: Fraction
    cubes: tuple[GridCube, ...]
    grid: DyadicGridSpec

    def union(self, universe: Universe) -> IndicatorSet:
        mask = np.zeros(universe.extent, dtype=bool)
        for q in self.cubes:
            mask[q.slices()] = True
        return IndicatorSet(universe, mask)


def stopping_cubes(f: StepFunction, grid: DyadicGridSpec, tau, lam) -> StoppingDecomposition:
    """Maximal cubes of ``grid`` (inside the universe) with ``m^tau_f(Q) > lam``."""
    lam = as_fraction(lam)
    if lam < 0:
        raise DomainError("level must be non-negative")
    levels, to_value = dyadic_node_stats(f, grid, tau_kind(tau))
    covered = np.zeros(f.universe.extent, dtype=bool)
    chosen = []
    for k in sorted(levels):
        side, corners, stats = levels[k]
        for corner, s in zip(corners, stats):
            q = GridCube(tuple(int(c) for c in corner), side)
            if to_value(s) > lam and not covered[q.corner]:
                covered[q.slices()] = True
                chosen.append(q)
    return StoppingDecomposition(lam, tuple(sorted(chosen, key=lambda q: (q.side, q.corner))), grid)


# -- truncation and mollification -------------------------------------------------


def _int_root_floor(x: Fraction, n: int) -> int:
    """Largest integer ``s >= 0`` with ``s**n <= x``."""
    s = int(math.floor(float(x) ** (1.0 / n))) + 1
    while s > 0 and s ** n > x:
        s -= 1
    while (s + 1) ** n <= x:
        s += 1
    return s


def truncation_cells(f: StepFunction, kind: MaximalKind) -> int:
    """Largest cube side (in cells) that can carry a non-zero statistic."""
    if kind.name == "hl":
        raise DomainError("averages never vanish on large cubes; the hl operator has no truncation radius")
    u = f.universe
    support = f.support_measure()
    if support == 0:
        return 1
    bound = support / kind.tau if kind.name == "tau" else 2 * support
    return max(1, _int_root_floor(bound / u.cell_measure, u.dim))


def truncation_radius(f: StepFunction, kind: MaximalKind) -> Fraction:
    """Side length beyond which every cube has statistic 0 (``(S/tau)^(1/n)`` or ``(2S)^(1/n)``, snapped to cells)."""
    return truncation_cells(f, kind) * f.universe.cell


def exact_family(f: StepFunction, kind: MaximalKind) -> CubeFamily:
    return CubeFamily.all_cubes(f.universe, truncation_cells(f, kind))


def support_margin(f: StepFunction) -> tuple[int, ...]:
    """Number of zero cells between the support and the universe boundary, per axis (min of both sides)."""
    nz = np.argwhere(f.values != 0)
    if len(nz) == 0:
        return tuple(f.universe.extent)
    lo, hi = nz.min(axis=0), nz.max(axis=0)
    return tuple(int(min(l, e - 1 - h)) for l, h, e in zip(lo, hi, f.universe.extent))


def rn_maximal(f: StepFunction, kind: MaximalKind) -> StepFunction:
    """Maximal function over all grid-aligned cubes of R^n, restricted to the universe.

    Requires the support to sit at least ``truncation_cells - 1`` cells away
    from the boundary, so that every cube able to carry a non-zero
    statistic lies inside the universe.
    """
    s = truncation_cells(f, kind)
    if min(support_margin(f)) < s - 1:
        raise DomainError(f"universe margin {support_margin(f)} smaller than truncation radius {s - 1} cells")
    out = brute_maximal(f, exact_family(f, kind), kind)
    out.meta["truncation_radius"] = frac_str(truncation_radius(f, kind))
    return out


def median_mollify(f: StepFunction, r) -> StepFunction:
    """``x -> m_f(Q(x, r))`` with ``Q(x, r)`` snapped outward to cells and clipped to the universe."""
    r = as_fraction(r)
    u = f.universe
    if r < u.cell / 2:
        raise DomainError(f"radius {r} is smaller than half a cell ({u.cell / 2})")
    rc = r / u.cell
    out = np.empty(u.extent, dtype=object)
    half = Fraction(1, 2)
    for idx in np.ndindex(*u.extent):
        sl = tuple(
            slice(max(0, math.floor(i + half - rc)), min(e, math.ceil(i + half + rc)))
            for i, e in zip(idx, u.extent)
        )
        out[idx] = median_interval_of(f.values[sl].ravel().tolist()).max_abs()
    return StepFunction(u, out, {"operator": {"kind": "median_mollify", "r": frac_str(r)}})


def grid_family_for(f: StepFunction, family: str, max_side: int | None = None, shift: Sequence | None = None) -> CubeFamily:
    if family == "all":
        return CubeFamily.all_cubes(f.universe, max_side)
    if family == "dyadic":
        return CubeFamily.dyadic(f.universe, DyadicGridSpec.fitting(f.universe, shift))
    raise DomainError(f"unknown family {family!r}")
