import math
from fractions import Fraction

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings

from medimax import samples
from medimax.grid import THIRD, CubeFamily, DomainError, DyadicGridSpec, GridCube, Universe, enumerate_cubes
from medimax.maximal import (
    HL,
    MEDIAN,
    MaximalKind,
    brute_maximal,
    continuum_set_maximal_1d,
    domination_bound,
    dyadic_maximal,
    expansion_check,
    expansion_factor,
    intervals_measure,
    iterate_continuum_1d,
    iterate_set_maximal,
    iteration_bound,
    median_mollify,
    normalize_intervals,
    rn_maximal,
    set_maximal,
    set_to_intervals,
    stopping_cubes,
    tau_kind,
    truncation_cells,
    truncation_radius,
)
from medimax.median import median_interval_of, tau_median_of
from medimax.stepfn import IndicatorSet, StepFunction, level_set

from conftest import fn, rationals, step_functions

HALF = Fraction(1, 2)
kinds = st.one_of(
    st.just(MEDIAN),
    st.just(HL),
    st.integers(1, 7).map(lambda k: tau_kind(Fraction(k, 8))),
)


def statistic(vals, kind):
    if kind.name == "median":
        return abs(median_interval_of(vals).max_abs())
    if kind.name == "tau":
        return tau_median_of(vals, kind.tau)
    return sum((abs(v) for v in vals), Fraction(0)) / len(vals)


def oracle_maximal(f, family, kind):
    """Independent double loop: for every cell, every cube containing it."""
    out = np.empty(f.universe.extent, dtype=object)
    out.fill(Fraction(0))
    cubes = enumerate_cubes(family)
    for idx in np.ndindex(*f.universe.extent):
        for q in cubes:
            if q.contains_cell(idx):
                out[idx] = max(out[idx], statistic(f.cube_values(q).tolist(), kind))
    return out


def dyadic_case(draw):
    choice = draw(st.integers(0, 3))
    if choice == 0:
        u, shift = Universe.interval(0, 1, Fraction(1, 16)), (0,)
    elif choice == 1:
        u, shift = Universe.interval(0, 1, Fraction(1, 24)), (THIRD,)
    elif choice == 2:
        u, shift = Universe.box([(0, 1)] * 2, Fraction(1, 4)), (0, 0)
    else:
        u, shift = Universe.box([(0, 1)] * 2, Fraction(1, 6)), (0, THIRD)
    f = draw(step_functions(universe=u))
    return f, DyadicGridSpec.fitting(u, shift)


dyadic_cases = st.composite(dyadic_case)()


# -- brute force ----------------------------------------------------------------


def test_sharpness_indicator():
    u = Universe.interval(-10, 10, Fraction(1, 10))
    chi = samples.indicator(u, -1, 1)
    out = rn_maximal(chi, tau_kind(HALF))
    assert out == samples.indicator(u, -3, 3)
    assert out.meta["truncation_radius"] == "4/1"
    assert truncation_radius(chi, tau_kind(HALF)) == 4


@given(rationals(), kinds)
def test_constant_input(c, kind):
    u = Universe.interval(0, 6, 1)
    out = brute_maximal(StepFunction.constant(u, c), CubeFamily.all_cubes(u), kind)
    assert np.all(out.values == abs(c))


@given(step_functions(dims=(1,), max_1d=8), kinds)
def test_brute_matches_double_loop_1d(f, kind):
    fam = CubeFamily.all_cubes(f.universe)
    assert np.all(brute_maximal(f, fam, kind).values == oracle_maximal(f, fam, kind))


@given(step_functions(dims=(2,), max_2d=4), kinds, st.integers(1, 4))
def test_brute_matches_double_loop_2d(f, kind, max_side):
    fam = CubeFamily.all_cubes(f.universe, max_side)
    assert np.all(brute_maximal(f, fam, kind).values == oracle_maximal(f, fam, kind))


def test_eight_cells_thirty_six_intervals():
    f = fn([3, -1, 0, 2, -5, 1, 1, 4])
    fam = CubeFamily.all_cubes(f.universe)
    assert len(enumerate_cubes(fam)) == 36
    assert np.all(brute_maximal(f, fam, MEDIAN).values == oracle_maximal(f, fam, MEDIAN))


def test_empty_family_warns():
    u = Universe.interval(0, 3, 1)
    fam = CubeFamily.explicit(u, [])
    with pytest.warns(UserWarning):
        out = brute_maximal(StepFunction.constant(u, 1), fam, MEDIAN)
    assert np.all(out.values == 0)
    assert out.meta["warning"] == "empty family"


@given(step_functions(max_1d=10, max_2d=4))
def test_comparison_cellwise(f):
    fam = CubeFamily.all_cubes(f.universe)
    big = brute_maximal(f, fam, MEDIAN).values
    half = brute_maximal(f, fam, tau_kind(HALF)).values
    assert np.all(big <= half)
    g = f.abs()
    assert np.all(brute_maximal(g, fam, MEDIAN).values == brute_maximal(g, fam, tau_kind(HALF)).values)


# -- dyadic ---------------------------------------------------------------------


@given(dyadic_cases, kinds)
def test_dyadic_equals_brute(case, kind):
    f, grid = case
    fam = CubeFamily.dyadic(f.universe, grid)
    fast = dyadic_maximal(f, grid, kind)
    assert np.all(fast.values == brute_maximal(f, fam, kind).values)
    assert np.all(fast.values == oracle_maximal(f, fam, kind))


def test_dyadic_zero():
    u = Universe.interval(0, 1, Fraction(1, 8))
    out = dyadic_maximal(StepFunction.constant(u, 0), DyadicGridSpec.fitting(u), MEDIAN)
    assert np.all(out.values == 0)


def test_dyadic_single_cell_ancestors():
    u = Universe.interval(0, 1, Fraction(1, 16))
    vals = [0] * 16
    vals[5] = 1
    f = StepFunction(u, vals)
    grid = DyadicGridSpec.fitting(u)
    # ancestors of cell 5 have 2, 4, 8, 16 cells; density 1/side
    for tau, side in [(Fraction(1, 2), 2), (Fraction(1, 4), 4), (Fraction(1, 3), 2), (Fraction(1, 16), 16)]:
        out = dyadic_maximal(f, grid, tau_kind(tau)).values
        start = 5 // side * side
        want = [1 if start <= i < start + side else 0 for i in range(16)]
        assert out.tolist() == want


def test_dyadic_misaligned():
    u = Universe.interval(0, 1, Fraction(1, 10))
    with pytest.raises(DomainError):
        dyadic_maximal(StepFunction.constant(u, 1), DyadicGridSpec((0,), (0, 4)), MEDIAN)


# -- domination -----------------------------------------------------------------


def true_tau_maximal(f, tau):
    kind = tau_kind(tau)
    big = f.embed(f.universe.pad(truncation_cells(f, kind)))
    return rn_maximal(big, kind).restrict(f.universe).values


@given(step_functions(dims=(1,), max_1d=6), st.sampled_from([Fraction(1, 4), HALF, Fraction(3, 4)]))
def test_domination_1d(f, tau):
    assert np.all(domination_bound(f, tau).values >= true_tau_maximal(f, tau))


def test_domination_2d_small():
    f = StepFunction(Universe.box([(0, 2), (0, 2)], 1), [1, 0, Fraction(-1, 2), 0])
    assert np.all(domination_bound(f, HALF).values >= true_tau_maximal(f, HALF))


def test_domination_constant():
    u = Universe.interval(0, 4, 1)
    f = StepFunction.constant(u, Fraction(-3, 2))
    assert np.all(domination_bound(f, HALF).values == Fraction(3, 2))


def test_domination_sharpness_indicator():
    u = Universe.interval(-4, 4, Fraction(1, 2))
    chi = samples.indicator(u, -1, 1)
    dom = domination_bound(chi, HALF).values
    assert np.all(dom >= samples.indicator(u, -3, 3).values)


# -- set operator, expansion, iteration -------------------------------------------


def test_set_maximal_examples():
    u = Universe.interval(-10, 10, Fraction(1, 10))
    e = level_set(samples.indicator(u, -1, 1), 0)
    fam = CubeFamily.all_cubes(u)
    assert set_maximal(e, HALF, fam) == level_set(samples.indicator(u, -3, 3), 0)
    assert set_maximal(IndicatorSet.empty(u), HALF, fam) == IndicatorSet.empty(u)
    assert set_maximal(IndicatorSet.full(u), HALF, fam) == IndicatorSet.full(u)


@given(st.lists(st.booleans(), min_size=1, max_size=12), st.integers(1, 7))
def test_set_maximal_matches_tau_operator(bits, k):
    u = Universe.interval(0, len(bits), 1)
    e = IndicatorSet(u, np.array(bits))
    eta = Fraction(k, 8)
    fam = CubeFamily.all_cubes(u)
    via_tau = brute_maximal(e.indicator(), fam, tau_kind(eta)).values == 1
    assert np.array_equal(set_maximal(e, eta, fam).mask, via_tau.astype(bool))


@given(st.lists(st.booleans(), min_size=1, max_size=10), st.integers(1, 3))
def test_iteration_monotone_and_fixed_points(bits, k):
    u = Universe.interval(0, len(bits), 1)
    e = IndicatorSet(u, np.array(bits))
    fam = CubeFamily.all_cubes(u)
    assert iterate_set_maximal(e, HALF, fam, 1) == set_maximal(e, HALF, fam)
    a = iterate_set_maximal(e, HALF, fam, k)
    b = iterate_set_maximal(e, HALF, fam, k + 1)
    assert e <= a <= b
    if set_maximal(e, HALF, fam) == e:
        assert a == e


def test_expansion_factor():
    assert expansion_factor(HALF, 1) == Fraction(3, 2)
    assert expansion_factor(Fraction(1, 4), 2) == Fraction(7, 4)


def test_expansion_empty_set():
    u = Universe.interval(0, 12, 1)
    res = expansion_check(IndicatorSet.empty(u), GridCube((0,), 12), HALF)
    assert res.lhs == res.rhs == 0 and res.passed


def test_expansion_rejects_dense_set():
    u = Universe.interval(0, 4, 1)
    with pytest.raises(DomainError):
        expansion_check(IndicatorSet(u, np.array([1, 1, 1, 0], bool)), GridCube((0,), 4), HALF)


def test_expansion_saturated_set_covers_cube():
    u = Universe.interval(0, 4, 1)
    e = IndicatorSet(u, np.array([1, 0, 1, 0], bool))
    res = expansion_check(e, GridCube((0,), 4), HALF)
    assert res.lhs == 4 >= res.rhs


def test_grid_only_expansion_fails_on_single_cell():
    # only whole-cell intervals: one cell at eta = 3/4 never grows, so the lemma fails on the bare grid
    u = Universe.interval(0, 12, 1)
    e = IndicatorSet(u, np.eye(1, 12, 5, dtype=bool)[0])
    q = GridCube((0,), 12)
    bare = expansion_check(e, q, Fraction(3, 4), method="grid", refine=1)
    assert not bare.passed and bare.lhs == 1
    exact = expansion_check(e, q, Fraction(3, 4), method="continuum")
    # intervals of length up to 4/3 around the cell: 1/3 of extra reach on each side
    assert exact.passed and exact.lhs == Fraction(5, 3)


def test_grid_only_expansion_fails_in_two_dimensions():
    u = Universe.box([(0, 4), (0, 4)], 1)
    mask = np.zeros((4, 4), bool)
    mask[1, 1] = True
    q = GridCube((0, 0), 4)
    assert not expansion_check(IndicatorSet(u, mask), q, HALF, method="grid", refine=1).passed
    assert expansion_check(IndicatorSet(u, mask), q, HALF, method="grid", refine=3).passed


def test_continuum_examples():
    assert continuum_set_maximal_1d([(-1, 1)], HALF) == [(-3, 3)]
    assert continuum_set_maximal_1d([(0, 1), (3, 4)], HALF) == [(-1, 5)]
    assert continuum_set_maximal_1d([], HALF) == []


def brute_continuum_covered(e, eta, x):
    """Is x in some interval [a, b] with |E ∩ [a, b]| >= eta (b - a)?  Endpoints on a fine lattice."""
    step = Fraction(1, 6)
    lo, hi = e[0][0] - 6, e[-1][1] + 6
    pts = [lo + k * step for k in range(int((hi - lo) / step) + 1)]
    left = [a for a in pts if a <= x]
    right = [b for b in pts if b > x]
    return any(intervals_measure(e, (a, b)) >= eta * (b - a) for a in left for b in right)


@settings(max_examples=25)
@given(st.lists(st.booleans(), min_size=1, max_size=5), st.sampled_from([HALF, Fraction(2, 3)]))
def test_continuum_against_lattice_search(bits, eta):
    e = normalize_intervals((i, i + 1) for i, b in enumerate(bits) if b)
    if not e:
        return
    got = continuum_set_maximal_1d(e, eta)
    # eta in {1/2, 2/3} puts every boundary of the covered set on the 1/6 lattice
    for k in range(-18, 6 * 5 + 18, 5):
        x = Fraction(k, 6) + Fraction(1, 97)
        inside = any(a <= x < b for a, b in got)
        assert inside == brute_continuum_covered(e, eta, x)


@given(st.lists(st.booleans(), min_size=12, max_size=12), st.sampled_from([Fraction(1, 4), HALF, Fraction(3, 4)]))
def test_iteration_bound_continuum(bits, alpha):
    u = Universe.interval(0, 12, 1)
    e = IndicatorSet(u, np.array(bits))
    if e.count == 0 or e.count >= alpha * 12:
        return
    k = iteration_bound(alpha, 1, e.measure, 12)
    grown = iterate_continuum_1d(set_to_intervals(e), alpha, k)
    assert intervals_measure(grown, (0, 12)) >= alpha * 12


def test_iteration_bound_formula():
    assert iteration_bound(HALF, 1, 1, 12) == math.ceil(math.log(6) / math.log(1.5))
    assert iteration_bound(HALF, 1, 6, 12) == 0


# -- stopping cubes --------------------------------------------------------------


@given(dyadic_cases, st.integers(1, 7), st.data())
def test_stopping_properties(case, tk, data):
    f, grid = case
    tau = Fraction(tk, 8)
    m = dyadic_maximal(f, grid, tau_kind(tau))
    levels = sorted(set(m.values.ravel().tolist()) | {Fraction(0)})
    lam = data.draw(st.sampled_from(levels))
    dec = stopping_cubes(f, grid, tau, lam)
    cover = np.zeros(f.universe.extent, dtype=int)
    for q in dec.cubes:
        cover[q.slices()] += 1
        assert np.count_nonzero(np.abs(f.values[q.slices()]) > lam) >= tau * q.n_cells
    assert cover.max(initial=0) <= 1
    assert dec.union(f.universe) == level_set(m, lam, absolute=False)


def test_stopping_above_max_is_empty():
    f = fn([1, -3, 2, 0], cell=Fraction(1, 4))
    assert stopping_cubes(f, DyadicGridSpec.fitting(f.universe), HALF, 3).cubes == ()


def test_stopping_dyadic_indicator():
    u = Universe.interval(0, 1, Fraction(1, 8))
    f = StepFunction(u, [1, 1, 0, 1, 0, 0, 0, 0])
    dec = stopping_cubes(f, DyadicGridSpec.fitting(u), HALF, HALF)
    assert dec.cubes == (GridCube((0,), 4),)


# -- truncation and mollification --------------------------------------------------


def test_truncation_zero_function():
    f = StepFunction.constant(Universe.interval(0, 4, 1), 0)
    assert truncation_cells(f, MEDIAN) == 1


def test_truncation_hl_rejected():
    with pytest.raises(DomainError):
        truncation_radius(fn([1]), HL)


def test_rn_margin_too_small():
    u = Universe.interval(-2, 2, Fraction(1, 10))
    with pytest.raises(DomainError, match="truncation radius"):
        rn_maximal(samples.indicator(u, -1, 1), tau_kind(HALF))


@given(st.lists(rationals(), min_size=1, max_size=4), st.sampled_from([MEDIAN, tau_kind(Fraction(1, 4)), tau_kind(HALF)]))
def test_truncation_exact(core, kind):
    f0 = fn(core)
    if not np.any(f0.values != 0):
        return
    s = truncation_cells(f0, kind)
    f = f0.embed(f0.universe.pad(s - 1))
    small = rn_maximal(f, kind)
    wide = f.embed(f.universe.pad(max(s - 1, 1)))
    full = brute_maximal(wide, CubeFamily.all_cubes(wide.universe), kind)
    assert full.restrict(f.universe) == StepFunction(f.universe, small.values)
    assert np.count_nonzero(full.values != 0) == np.count_nonzero(small.values != 0)


def test_mollify_half_cell_identity():
    f = fn([3, -1, 2, 5], cell=Fraction(1, 4))
    assert median_mollify(f, Fraction(1, 8)) == StepFunction(f.universe, f.values)
    with pytest.raises(DomainError):
        median_mollify(f, Fraction(1, 16))


@given(st.lists(rationals(), min_size=2, max_size=10), st.integers(1, 4))
def test_mollify_monotone_bounds(vals, k):
    f = fn(sorted(vals))
    r = Fraction(k, 2)
    g = median_mollify(f, r)
    h = f.universe.cell
    for i, v in enumerate(g.values.tolist()):
        lo = max(0, math.floor(i + HALF - r / h))
        hi = min(len(vals), math.ceil(i + HALF + r / h))
        window = f.values[lo:hi].tolist()
        assert min(window) <= v <= max(window)


def test_kind_validation():
    with pytest.raises(DomainError):
        MaximalKind("tau", Fraction(1))
    with pytest.raises(DomainError):
        MaximalKind("mode")
    assert MaximalKind.from_json(tau_kind(Fraction(1, 3)).to_json()) == tau_kind(Fraction(1, 3))
