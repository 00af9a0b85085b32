"""The twelve acceptance criteria at their stated sizes, tolerances and runtime budgets.

Each test prints one ``[PASS]``/``[FAIL]`` line (visible with ``pytest -s`` or in ``-v``
output, since printing bypasses capture) and then asserts.
"""

import time
from fractions import Fraction

import pytest

from medimax import samples, verify
from medimax.grid import CubeFamily
from medimax.weights import a1_characteristic

T = [Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)]


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, elapsed, budget, detail=""):
        within = elapsed < budget
        line = (f"[{'PASS' if ok and within else 'FAIL'}] criterion {number:2d} {title}: "
                f"{detail} ({elapsed:.2f}s, budget {budget}s)")
        with capsys.disabled():
            print("\n" + line)
        assert ok, line
        assert within, line

    return emit


def timed(fn, *args, **kw):
    start = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - start


def test_01_sharpness_identity(report):
    rep, dt = timed(verify.check_sharpness, T)
    ratios = [Fraction(i["ratio"]) for i in rep.details["instances"]]
    ok = rep.status == "pass" and ratios == [5, 9, 17] and all(i["cells_match"] for i in rep.details["instances"])
    report(1, "sharpness identity", ok, dt, 5, f"ratios {[str(r) for r in ratios]}")


def test_02_a1_of_wt(report):
    start = time.perf_counter()
    radius, h = 51, Fraction(1, 10)
    parts = []
    ok = True
    for t in (Fraction(1, 4), Fraction(1, 2)):
        w = samples.w_t(t, radius, h)
        val = a1_characteristic(w, CubeFamily.all_cubes(w.universe)).value
        closed = (1 / t) * (radius - 1 + t * h) / (radius - 1 + h)
        ok &= val == closed and abs(val - 1 / t) <= Fraction(1, 100) / t
        parts.append(f"t={t}: {val}")
    report(2, "A1 characteristic of w_t", ok, time.perf_counter() - start, 30, ", ".join(parts))


def test_03_weighted_l1_bound(report):
    rep, dt = timed(verify.a1_suite, seed=0, count=50)
    report(3, "weighted L1 bound", rep.status == "pass" and rep.worst <= 4, dt, 60,
           f"{rep.instances} instances, worst ratio {rep.worst}")


def test_04_weak_type(report):
    rep, dt = timed(verify.weak_type_suite, seed=0, count=50)
    # zero tolerance: a flagged level counts as a miss here
    report(4, "weak type at every level", rep.status == "pass", dt, 60,
           f"{rep.instances} instances, worst ratio {rep.worst}")


def test_05_expansion(report):
    start = time.perf_counter()
    one = verify.check_expansion_exhaustive(1, 12, grid_only_probe=True)
    two = verify.check_expansion_sampled(2, 4, Fraction(1, 2), 10_000, seed=0)
    ok = one.status == "pass" and two.status == "pass"
    report(5, "expansion lemma", ok, time.perf_counter() - start, 120,
           f"1D {one.instances} subsets worst {one.worst}; 2D {two.instances} samples worst {two.worst}")


def test_06_comparison(report):
    rep, dt = timed(verify.comparison_suite, seed=0, count=1000)
    report(6, "comparison and equality for f >= 0", rep.status == "pass", dt, 60, f"{rep.instances} functions")


def test_07_dyadic_oracle(report):
    rep, dt = timed(verify.dyadic_oracle_suite, seed=0, count=200)
    report(7, "dyadic operator equals brute force", rep.status == "pass", dt, 60, f"{rep.instances} inputs")


def test_08_covering_domination(report):
    rep, dt = timed(verify.covering_domination_suite, seed=0, count=100)
    d = rep.details
    ok = rep.status == "pass" and Fraction(d["covering_worst_ratio"]) <= 6
    report(8, "covering and domination", ok, dt, 60,
           f"cover ratio <= {d['covering_worst_ratio']}, {d['domination_status']} on 100 inputs")


def test_09_stopping(report):
    rep, dt = timed(verify.stopping_suite, seed=0, count=500)
    report(9, "stopping cubes", rep.status == "pass", dt, 60, f"{rep.instances} instances")


def test_10_truncation(report):
    rep, dt = timed(verify.truncation_suite, seed=0, count=50)
    report(10, "truncation exactness", rep.status == "pass", dt, 30, f"{rep.instances} inputs")


def test_11_fujii(report):
    rep, dt = timed(verify.fujii_suite)
    errs = rep.details["errors"]
    ok = rep.status == "pass" and all(Fraction(e[-1]) == 0 for e in errs)
    report(11, "median mollification", ok, dt, 10, f"errors {errs}")


def test_12_lp_lower(report):
    ts, ps = [Fraction(1, 2), Fraction(1, 8)], [1, 2, 4]
    rep, dt = timed(verify.check_lp_lower, ts, ps)
    rel = max(i["rel"] for i in rep.details["instances"])
    ok = rep.status == "pass" and rel <= 1e-9 and rep.instances == 6
    report(12, "L^p lower bound growth", ok, dt, 10, f"max relative error {rel:.1e}")

