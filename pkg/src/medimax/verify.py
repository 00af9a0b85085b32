"""Executable property suites, one per claim, with replayable witnesses.

Every suite is split in two layers.  A per-instance checker takes a
JSON-serialisable payload (functions, weights, cubes, levels as
``"p/q"`` strings) and returns an :class:`Outcome`.  A suite builds
payloads from a seed, runs the checker on each one (in worker processes
when ``MEDIMAX_THREADS`` > 1) and folds the outcomes into a
:class:`VerificationReport`.  A failing payload is stored verbatim as the
witness, so :func:`replay` just calls the checker again.

Scope note.  The qualitative statement that the median maximal operator
is bounded on ``L^p(w)`` exactly when ``w`` is in A_infinity is not a
finite inequality and is not checked as such.  The suites check its
quantitative ingredients instead: the comparison ``M <= M^{1/2}``, the
shifted-grid domination, the expansion lemma, the stopping-cube
decomposition, the weighted L^1 and weak-type bounds for A_1 weights,
and the (alpha, beta) implication (``alpha-beta`` suite).
"""

from __future__ import annotations

import json
import math
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple

import numpy as np

from . import samples
from .grid import (
    Cube,
    CubeFamily,
    DomainError,
    DyadicGridSpec,
    GridCube,
    Universe,
    as_fraction,
    covering_cube,
    enumerate_cubes,
    frac_str,
    shifted_grids,
)
from .maximal import (
    HL,
    MEDIAN,
    MaximalKind,
    brute_maximal,
    domination_bound,
    dyadic_maximal,
    expansion_check,
    expansion_factor,
    median_mollify,
    rn_maximal,
    stopping_cubes,
    tau_kind,
    truncation_cells,
)
from .median import median_interval_of, tau_median_of
from .stepfn import IndicatorSet, StepFunction, Weight, level_set, lp_norm, weighted_measure
from .weights import a1_characteristic, alpha_beta_profile

# -- report types -----------------------------------------------------------------


class Outcome(NamedTuple):
    ok: bool
    ratio: Fraction | float | None = None
    info: dict | None = None
    flagged: bool = False
    skipped: bool = False


def _num_json(x):
    if x is None:
        return None
    if isinstance(x, Fraction):
        return frac_str(x)
    return float(x)


def _num_load(x):
    if x is None or isinstance(x, float):
        return x
    return Fraction(x)


@dataclass
class VerificationReport:
    claim: str
    status: str  # "pass", "fail" or "flag"
    instances: int
    worst: Fraction | float | None
    witness: dict | None
    runtime: float
    seed: int | None
    skipped: int = 0
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status != "fail"

    def to_json(self) -> dict:
        obj = asdict(self)
        obj["worst"] = _num_json(self.worst)
        obj["runtime"] = round(self.runtime, 3)
        return obj

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, obj: dict) -> "VerificationReport":
        obj = dict(obj)
        obj["worst"] = _num_load(obj.get("worst"))
        return cls(**obj)

    def summary(self) -> str:
        worst = "-" if self.worst is None else _num_json(self.worst)
        return f"{self.claim}: {self.status.upper()} ({self.instances} instances, worst {worst}, {self.runtime:.2f}s)"


def threads() -> int:
    try:
        return max(1, int(os.environ.get("MEDIMAX_THREADS", "1")))
    except ValueError:
        return 1


def _run(claim: str, checker: Callable[[dict], Outcome], payloads: list[dict], seed, details=None,
         parallel: bool = True, keep_info: bool = False) -> VerificationReport:
    start = time.perf_counter()
    n = threads() if parallel else 1
    if n > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=n) as ex:
            outcomes = list(ex.map(checker, payloads, chunksize=max(1, len(payloads) // (4 * n))))
    else:
        outcomes = [checker(p) for p in payloads]
    # aggregation looks only at the index-ordered outcome list, so worker order is irrelevant
    worst, witness, status, skipped = None, None, "pass", 0
    for p, o in zip(payloads, outcomes):
        if o.skipped:
            skipped += 1
            continue
        if o.ratio is not None and (worst is None or o.ratio > worst):
            worst = o.ratio
        if not o.ok and status != "fail":
            status, witness = "fail", {"claim": claim, "payload": p, "info": o.info}
        elif o.flagged and status == "pass":
            status, witness = "flag", {"claim": claim, "payload": p, "info": o.info}
    details = dict(details or {})
    if keep_info:
        details["instances"] = [o.info for o in outcomes]
    return VerificationReport(claim, status, len(payloads), worst, witness, time.perf_counter() - start, seed,
                              skipped, details)


def replay(report: VerificationReport | dict) -> VerificationReport:
    """Re-run the stored witness of a report single-threaded."""
    if isinstance(report, dict):
        report = VerificationReport.from_json(report)
    if report.witness is None:
        raise DomainError("report has no witness to replay")
    claim = report.witness.get("claim", report.claim)
    return _run(claim, CHECKERS[claim], [report.witness["payload"]], report.seed, parallel=False)


# -- serialisation helpers --------------------------------------------------------


def _f(obj) -> StepFunction:
    return StepFunction.from_json(obj)


def _w(obj) -> Weight:
    f = StepFunction.from_json(obj)
    return Weight(f.universe, f.values)


def _kind(obj) -> MaximalKind:
    return MaximalKind.from_json(obj)


def _cube_info(q: GridCube) -> dict:
    return q.to_json()


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


# -- comparison, with equality for non-negative f ---------------------------------


def _check_comparison(p: dict) -> Outcome:
    f = _f(p["f"])
    fam = CubeFamily.from_json(p["family"]) if "family" in p else CubeFamily.all_cubes(f.universe)
    nonneg = bool(np.all(f.values >= 0))
    worst = None
    for q in enumerate_cubes(fam):
        vals = f.cube_values(q).tolist()
        m = abs(median_interval_of(vals).max_abs())
        m_half = tau_median_of(vals, Fraction(1, 2))
        if m > m_half or (nonneg and m != m_half):
            return Outcome(False, None, {"cube": _cube_info(q), "m": frac_str(m), "m_half": frac_str(m_half)})
        if m_half:
            r = m / m_half
            worst = r if worst is None or r > worst else worst
    big = brute_maximal(f, fam, MEDIAN).values
    half = brute_maximal(f, fam, tau_kind(Fraction(1, 2))).values
    bad = np.argwhere((big > half).astype(bool))
    if len(bad):
        return Outcome(False, worst, {"cell": bad[0].tolist()})
    if nonneg and not np.all(big == half):
        return Outcome(False, worst, {"cell": np.argwhere((big != half).astype(bool))[0].tolist()})
    return Outcome(True, worst)


def check_comparison(fs: list[StepFunction], family: CubeFamily | None = None, seed=None) -> VerificationReport:
    """``|m_f(Q)| <= m^{1/2}_f(Q)`` on every family cube, equality for ``f >= 0``, and ``Mf <= M^{1/2} f``."""
    payloads = []
    for f in fs:
        p = {"f": f.to_json()}
        if family is not None:
            p["family"] = family.to_json()
        payloads.append(p)
    return _run("comparison", _check_comparison, payloads, seed)


def comparison_suite(seed: int = 0, count: int = 1000, cells: int = 16) -> VerificationReport:
    rng = _rng(seed)
    u = Universe.interval(0, 1, Fraction(1, cells))
    fs = []
    for i in range(count):
        kind = i % 4
        if kind == 0:
            f = samples.random_function(u, rng, nonneg=True)
        elif kind == 1:
            f = samples.random_sparse_function(u, rng)
        else:
            f = samples.random_function(u, rng)
        fs.append(f)
    return check_comparison(fs, seed=seed)


# -- weighted L^1 bound and weak type ---------------------------------------------


def _a1_setup(p: dict):
    f, w = _f(p["f"]), _w(p["w"])
    tau = Fraction(p["tau"])
    grid = DyadicGridSpec.from_json(p["grid"])
    a1 = a1_characteristic(w, CubeFamily.dyadic(f.universe, grid))
    return f, w, tau, grid, a1


def _check_a1(p: dict) -> Outcome:
    f, w, tau, grid, a1 = _a1_setup(p)
    norm = lp_norm(f, w, 1)
    if norm == 0 or a1.infinite:
        return Outcome(True, skipped=True)
    m = dyadic_maximal(f, grid, tau_kind(tau))
    ratio = lp_norm(m, w, 1) / (a1.value / tau * norm)
    return Outcome(ratio <= 4, ratio, {"A1": frac_str(a1.value), "ratio": frac_str(ratio)})


def _check_weak(p: dict) -> Outcome:
    f, w, tau, grid, a1 = _a1_setup(p)
    if a1.infinite:
        return Outcome(True, skipped=True)
    m = dyadic_maximal(f, grid, tau_kind(tau))
    worst = None
    for lam in sorted(set(m.values.ravel().tolist())):
        dec = stopping_cubes(f, grid, tau, lam)
        above = dec.union(f.universe)
        if above != level_set(m, lam, absolute=False):
            return Outcome(False, worst, {"lambda": frac_str(lam), "reason": "stopping union differs from level set"})
        lhs = weighted_measure(w, above)
        rhs = a1.value / tau * weighted_measure(w, level_set(f, lam))
        if lhs > rhs:
            info = {"lambda": frac_str(lam), "lhs": frac_str(lhs), "rhs": frac_str(rhs)}
            # only the integrated L^1 bound is normative; the level-wise constant is flagged
            return Outcome(True, lhs / rhs, info, flagged=True)
        if rhs:
            r = lhs / rhs
            worst = r if worst is None or r > worst else worst
    return Outcome(True, worst)


def _pair_payloads(pairs, tau, grid) -> list[dict]:
    out = []
    for f, w in pairs:
        g = grid or DyadicGridSpec.fitting(f.universe)
        out.append({"f": f.to_json(), "w": w.to_json(), "tau": frac_str(as_fraction(tau)), "grid": g.to_json()})
    return out


def check_a1_bound(pairs, tau, grid: DyadicGridSpec | None = None, seed=None) -> VerificationReport:
    """``||M^tau_D f||_{L^1(w)} <= 4 tau^{-1} [w]_{A1} ||f||_{L^1(w)}`` with the A_1 constant over the dyadic family."""
    return _run("a1-bound", _check_a1, _pair_payloads(pairs, tau, grid), seed)


def check_weak_type(pairs, tau, grid: DyadicGridSpec | None = None, seed=None) -> VerificationReport:
    """``w({M^tau_D f > lam}) <= tau^{-1} [w]_{A1} w({|f| > lam})`` at every distinct output value."""
    return _run("weak-type", _check_weak, _pair_payloads(pairs, tau, grid), seed)


def _weighted_pairs(seed: int, count: int, n: int):
    rng = _rng(seed)
    u = Universe.interval(0, 1, Fraction(1, 16)) if n == 1 else Universe.box([(0, 1)] * n, Fraction(1, 8))
    pairs = []
    for i in range(count):
        f = samples.random_sparse_function(u, rng) if i % 3 == 0 else samples.random_function(u, rng)
        w = Weight.lebesgue(u) if i % 10 == 0 else samples.random_weight(u, rng)
        pairs.append((f, w))
    return pairs


def a1_suite(seed: int = 0, count: int = 50, dims=(1, 2), taus=(Fraction(1, 4), Fraction(1, 2))) -> VerificationReport:
    return _weighted_suite("a1-bound", _check_a1, seed, count, dims, taus)


def weak_type_suite(seed: int = 0, count: int = 50, dims=(1, 2), taus=(Fraction(1, 4), Fraction(1, 2))) -> VerificationReport:
    return _weighted_suite("weak-type", _check_weak, seed, count, dims, taus)


def _weighted_suite(claim, checker, seed, count, dims, taus) -> VerificationReport:
    payloads = []
    for n in dims:
        pairs = _weighted_pairs(seed + n, count, n)
        for tau in taus:
            payloads += _pair_payloads(pairs, tau, None)
    return _run(claim, checker, payloads, seed, {"dims": list(dims), "taus": [frac_str(t) for t in taus]})


# -- sharpness family -------------------------------------------------------------


def sharpness_universe(radius=10, cell=Fraction(1, 10)) -> Universe:
    return Universe.interval(-as_fraction(radius), as_fraction(radius), as_fraction(cell))


def _sharpness_parts(t, universe: Universe):
    chi = samples.indicator(universe, -1, 1)
    m = rn_maximal(chi, tau_kind(Fraction(1, 2)))
    return chi, m, samples.w_t_on(universe, t)


def _check_sharpness(p: dict) -> Outcome:
    t = Fraction(p["t"])
    u = Universe.from_json(p["universe"])
    chi, m, w = _sharpness_parts(t, u)
    expected = samples.indicator(u, -3, 3)
    ratio = lp_norm(m, w, 1) / lp_norm(chi, w, 1)
    a1 = a1_characteristic(w, CubeFamily.all_cubes(u))
    info = {
        "t": frac_str(t),
        "ratio": frac_str(ratio),
        "expected": frac_str(2 / t + 1),
        "cells_match": bool(np.all(m.values == expected.values)),
        "A1_family": frac_str(a1.value),
        "A1_limit": frac_str(1 / t),
    }
    ok = info["cells_match"] and ratio == (4 + 2 * t) / (2 * t) == 2 / t + 1
    return Outcome(ok, ratio, info)


def check_sharpness(ts, universe: Universe | None = None, seed=None) -> VerificationReport:
    """Exact ratio ``(4 + 2t)/(2t)`` for ``chi_[-1,1]`` against ``w_t``, and ``M^{1/2} chi = chi_[-3,3]``."""
    u = universe or sharpness_universe()
    chi = samples.indicator(u, -1, 1)
    s = truncation_cells(chi, tau_kind(Fraction(1, 2)))
    # fail loudly before any work if the window cannot hold every relevant interval
    rn_maximal(chi, tau_kind(Fraction(1, 2)))
    payloads = [{"t": frac_str(as_fraction(t)), "universe": u.to_json()} for t in ts]
    return _run("sharpness", _check_sharpness, payloads, seed, {"truncation_radius": frac_str(s * u.cell)},
                parallel=False, keep_info=True)


def _check_lp(p: dict) -> Outcome:
    t, pw = Fraction(p["t"]), Fraction(p["p"])
    u = Universe.from_json(p["universe"])
    chi, m, w = _sharpness_parts(t, u)
    ratio = float(lp_norm(m, w, pw)) / float(lp_norm(chi, w, pw))
    expected = float(2 / t + 1) ** (1 / float(pw))
    rel = abs(ratio - expected) / expected
    return Outcome(rel <= 1e-9, ratio, {"t": p["t"], "p": p["p"], "ratio": ratio, "expected": expected, "rel": rel})


def check_lp_lower(ts, ps, universe: Universe | None = None, seed=None) -> VerificationReport:
    """``||M^{1/2} chi||_{L^p(w_t)} / ||chi||_{L^p(w_t)} = (2/t + 1)^{1/p}`` within 1e-9 relative."""
    u = universe or sharpness_universe()
    payloads = [{"t": frac_str(as_fraction(t)), "p": frac_str(as_fraction(p)), "universe": u.to_json()}
                for t in ts for p in ps]
    return _run("lp-lower", _check_lp, payloads, seed, parallel=False, keep_info=True)


# -- expansion lemma --------------------------------------------------------------


def _check_expansion(p: dict) -> Outcome:
    u = Universe.from_json(p["universe"])
    eta = Fraction(p["eta"])
    method = p.get("method", "auto")
    q = GridCube((0,) * u.dim, u.extent[0])
    fails, worst, grid_only_failures = None, None, 0
    for bits in p["sets"]:
        mask = np.array([c == "1" for c in bits], dtype=bool).reshape(u.extent)
        e = IndicatorSet(u, mask)
        res = expansion_check(e, q, eta, method=method, refine=p.get("refine", 3))
        if e.count:
            r = res.rhs / res.lhs
            worst = r if worst is None or r > worst else worst
        if not res.passed:
            fails = {"set": bits, "lhs": frac_str(res.lhs), "rhs": frac_str(res.rhs), "method": res.method}
            break
        if p.get("grid_only_probe") and e.count:
            if not expansion_check(e, q, eta, method="grid", refine=1).passed:
                grid_only_failures += 1
    info = fails or {"grid_only_failures": grid_only_failures}
    return Outcome(fails is None, worst, info)


def _chunk(items: list, size: int) -> list[list]:
    return [items[i:i + size] for i in range(0, len(items), size)]


def check_expansion_exhaustive(n: int = 1, cells: int = 12, etas=(Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)),
                               seed=None, grid_only_probe: bool = False) -> VerificationReport:
    """Every ``E ⊆ Q`` with ``|E| <= eta |Q|``: ``|M^eta(E) ∩ Q| >= (1 + (1/eta - 1)/2^n) |E|``.

    ``Q`` is the cube of ``cells`` cells per side.  The reported ratio is
    ``rhs / lhs`` (at most 1 on a pass).
    """
    side = cells
    u = Universe.box([(0, side)] * n, 1)
    total = side ** n
    if total > 16:
        raise DomainError(f"{2 ** total} subsets is too many for exhaustion (limit 2^16)")
    payloads, count = [], 0
    for eta in etas:
        eta = as_fraction(eta)
        sets = [format(b, f"0{total}b") for b in range(2 ** total) if bin(b).count("1") * eta.denominator
                <= eta.numerator * total]
        count += len(sets)
        for chunk in _chunk(sets, 512):
            payloads.append({"universe": u.to_json(), "eta": frac_str(eta), "sets": chunk,
                             "grid_only_probe": grid_only_probe})
    rep = _run("expansion", _check_expansion, payloads, seed,
               {"n": n, "cells": cells, "etas": [frac_str(as_fraction(e)) for e in etas], "subsets": count},
               keep_info=grid_only_probe)
    rep.instances = count
    if grid_only_probe:
        infos = rep.details.pop("instances")
        rep.details["grid_only_failures"] = sum(i.get("grid_only_failures", 0) for i in infos)
    return rep


def check_expansion_sampled(n: int = 2, side: int = 4, eta=Fraction(1, 2), count: int = 10_000, seed: int = 0,
                            refine: int = 3) -> VerificationReport:
    """Random subsets of a ``side^n`` cube; sizes uniform in ``[0, eta side^n]``."""
    eta = as_fraction(eta)
    rng = _rng(seed)
    u = Universe.box([(0, side)] * n, 1)
    total = side ** n
    top = math.floor(eta * total)
    sets = []
    for _ in range(count):
        k = int(rng.integers(0, top + 1))
        chosen = set(rng.choice(total, size=k, replace=False).tolist())
        sets.append("".join("1" if i in chosen else "0" for i in range(total)))
    payloads = [{"universe": u.to_json(), "eta": frac_str(eta), "sets": c, "method": "grid", "refine": refine}
                for c in _chunk(sets, 250)]
    rep = _run("expansion", _check_expansion, payloads, seed,
               {"n": n, "side": side, "eta": frac_str(eta), "subsets": count, "method": f"grid/{refine}"})
    rep.instances = count
    return rep


# -- Fujii mollification ----------------------------------------------------------


def _check_fujii(p: dict) -> Outcome:
    f, w = _f(p["f"]), _w(p["w"])
    pw = Fraction(p["p"])
    radii = [Fraction(r) for r in p["radii"]]
    errs = []
    for r in radii:
        g = median_mollify(f, r)
        diff = StepFunction(f.universe, f.values - g.values)
        errs.append(lp_norm(diff, w, pw))
    mono = all(a >= b for a, b in zip(errs, errs[1:]))
    info = {"errors": [_num_json(e) for e in errs]}
    return Outcome(mono and errs[-1] == 0, errs[0], info)


def check_fujii(fs, w: Weight, p, radii, seed=None) -> VerificationReport:
    """``||f - m_f(Q(., r))||_{L^p(w)}`` is non-increasing along ``radii`` and vanishes at ``r = h/2``."""
    radii = [as_fraction(r) for r in radii]
    if any(a <= b for a, b in zip(radii, radii[1:])):
        raise DomainError("radii must be strictly decreasing")
    payloads = []
    for f in fs:
        if radii[-1] != f.universe.cell / 2:
            raise DomainError("the last radius must be half a cell")
        payloads.append({"f": f.to_json(), "w": w.to_json(), "p": frac_str(as_fraction(p)),
                         "radii": [frac_str(r) for r in radii]})
    return _run("fujii", _check_fujii, payloads, seed, keep_info=True)


def fujii_suite(seed=None) -> VerificationReport:
    u = Universe.interval(0, 1, Fraction(1, 32))
    h = u.cell
    f = samples.ramp(u)
    radii = [4 * h, 2 * h, h, h / 2]
    reports = [check_fujii([f], Weight.lebesgue(u), 1, radii, seed),
               check_fujii([f], samples.w_t_on(u, Fraction(1, 4), Fraction(1, 4), Fraction(3, 4)), 1, radii, seed)]
    return _merge("fujii", reports, seed, {"weights": ["1", "1/4 on [1/4,3/4)"],
                                           "errors": [r.details["instances"][0]["errors"] for r in reports]})


def _merge(claim: str, reports: list[VerificationReport], seed, details=None) -> VerificationReport:
    status = "fail" if any(r.status == "fail" for r in reports) else (
        "flag" if any(r.status == "flag" for r in reports) else "pass")
    witness = next((r.witness for r in reports if r.status == status and r.witness), None)
    worsts = [r.worst for r in reports if r.worst is not None]
    return VerificationReport(claim, status, sum(r.instances for r in reports), max(worsts) if worsts else None,
                              witness, sum(r.runtime for r in reports), seed, sum(r.skipped for r in reports),
                              details or {})


# -- covering and domination ------------------------------------------------------


def _check_covering(p: dict) -> Outcome:
    h = Fraction(p["cell"])
    lo, hi = Fraction(p["lo"]), Fraction(p["hi"])
    grids = shifted_grids(1, tuple(p["scales"]))
    n_cells = int((hi - lo) / h)
    worst = None
    for a in range(n_cells):
        for b in range(a + 1, min(n_cells, a + p["max_cells"]) + 1):
            q = Cube((lo + a * h,), (b - a) * h)
            _, r = covering_cube(q, grids)
            ratio = r.measure / q.measure
            if ratio > 6:
                return Outcome(False, ratio, {"cube": [frac_str(q.corner[0]), frac_str(q.side)],
                                              "cover": [frac_str(r.corner[0]), frac_str(r.side)]})
            worst = ratio if worst is None or ratio > worst else worst
    return Outcome(True, worst, {"intervals": n_cells * (n_cells + 1) // 2})


def _check_domination(p: dict) -> Outcome:
    f = _f(p["f"])
    tau = Fraction(p["tau"])
    kind = tau_kind(tau)
    s = truncation_cells(f, kind)
    big = f.embed(f.universe.pad(s))
    truth = rn_maximal(big, kind).restrict(f.universe).values
    bound = domination_bound(f, tau).values
    bad = np.argwhere((bound < truth).astype(bool))
    if len(bad):
        return Outcome(False, None, {"cell": bad[0].tolist()})
    pos = truth != 0
    worst = max((Fraction(t) / Fraction(b) for t, b in zip(truth[pos.astype(bool)], bound[pos.astype(bool)])),
                default=None)
    return Outcome(True, worst)


def check_covering_and_domination(fs, tau, window=(-2, 2), cell=Fraction(1, 48), seed=None) -> VerificationReport:
    """Every grid-aligned interval of ``window`` has a shifted-dyadic cover with ``|R| <= 6|Q|``;
    ``domination_bound`` dominates ``M^tau f`` cell-wise."""
    lo, hi = as_fraction(window[0]), as_fraction(window[1])
    cell = as_fraction(cell)
    k_fine = math.ceil(-math.log2(cell)) + 1
    k_coarse = -math.ceil(math.log2(6 * (hi - lo))) - 1
    cov = _run("covering", _check_covering,
               [{"lo": frac_str(lo), "hi": frac_str(hi), "cell": frac_str(cell), "scales": [k_coarse, k_fine],
                 "max_cells": int((hi - lo) / cell)}], seed, parallel=False)
    dom = _run("domination", _check_domination,
               [{"f": f.to_json(), "tau": frac_str(as_fraction(tau))} for f in fs], seed)
    return _merge("covering-domination", [cov, dom], seed,
                  {"covering_worst_ratio": _num_json(cov.worst), "domination_worst_ratio": _num_json(dom.worst),
                   "covering_status": cov.status, "domination_status": dom.status})


def covering_domination_suite(seed: int = 0, count: int = 100, cells: int = 12) -> VerificationReport:
    rng = _rng(seed)
    u = Universe.interval(0, 1, Fraction(1, cells))
    fs = [samples.random_sparse_function(u, rng) if i % 2 else samples.random_function(u, rng) for i in range(count)]
    return check_covering_and_domination(fs, Fraction(1, 2), seed=seed)


# -- dyadic oracle, stopping cubes, truncation ------------------------------------


def _random_dyadic_case(rng: np.random.Generator, i: int):
    choice = i % 4
    if choice == 0:
        u, shift = Universe.interval(0, 1, Fraction(1, 32)), (0,)
    elif choice == 1:
        u, shift = Universe.interval(0, 1, Fraction(1, 48)), (Fraction(1, 3),)
    elif choice == 2:
        u, shift = Universe.box([(0, 1)] * 2, Fraction(1, 8)), (0, 0)
    else:
        u, shift = Universe.box([(0, 1)] * 2, Fraction(1, 12)), (Fraction(1, 3), 0)
    f = samples.random_sparse_function(u, rng) if i % 3 == 0 else samples.random_function(u, rng)
    return f, DyadicGridSpec.fitting(u, shift)


def _check_dyadic(p: dict) -> Outcome:
    f = _f(p["f"])
    grid = DyadicGridSpec.from_json(p["grid"])
    fam = CubeFamily.dyadic(f.universe, grid)
    for kobj in p["kinds"]:
        kind = _kind(kobj)
        fast = dyadic_maximal(f, grid, kind)
        slow = brute_maximal(f, fam, kind)
        if not np.all(fast.values == slow.values):
            cell = np.argwhere((fast.values != slow.values).astype(bool))[0].tolist()
            return Outcome(False, None, {"kind": kobj, "cell": cell})
    return Outcome(True)


def dyadic_oracle_suite(seed: int = 0, count: int = 200) -> VerificationReport:
    rng = _rng(seed)
    payloads = []
    for i in range(count):
        f, grid = _random_dyadic_case(rng, i)
        tau = Fraction(int(rng.integers(1, 8)), 8)
        kinds = [MEDIAN.to_json(), tau_kind(tau).to_json(), HL.to_json()]
        payloads.append({"f": f.to_json(), "grid": grid.to_json(), "kinds": kinds})
    return _run("dyadic-oracle", _check_dyadic, payloads, seed)


def _check_stopping(p: dict) -> Outcome:
    f = _f(p["f"])
    grid = DyadicGridSpec.from_json(p["grid"])
    tau, lam = Fraction(p["tau"]), Fraction(p["lambda"])
    dec = stopping_cubes(f, grid, tau, lam)
    u = f.universe
    cover = np.zeros(u.extent, dtype=np.int64)
    for q in dec.cubes:
        cover[q.slices()] += 1
    if cover.max(initial=0) > 1:
        return Outcome(False, None, {"reason": "overlapping stopping cubes"})
    m = dyadic_maximal(f, grid, tau_kind(tau))
    if not np.array_equal(cover.astype(bool), level_set(m, lam, absolute=False).mask):
        return Outcome(False, None, {"reason": "union differs from the level set"})
    big = level_set(f, lam)
    worst = None
    for q in dec.cubes:
        hit = int(big.mask[q.slices()].sum())
        if hit < tau * q.n_cells:
            return Outcome(False, None, {"reason": "density below tau", "cube": _cube_info(q)})
        r = tau * q.n_cells / hit
        worst = r if worst is None or r > worst else worst
    return Outcome(True, worst, {"cubes": len(dec.cubes)})


def stopping_suite(seed: int = 0, count: int = 500) -> VerificationReport:
    rng = _rng(seed)
    payloads = []
    for i in range(count):
        f, grid = _random_dyadic_case(rng, i)
        tau = Fraction(int(rng.integers(1, 8)), 8)
        m = dyadic_maximal(f, grid, tau_kind(tau))
        levels = sorted(set(m.values.ravel().tolist()) | {Fraction(0)})
        j = int(rng.integers(0, len(levels)))
        lam = levels[j] if i % 2 or j == len(levels) - 1 else (levels[j] + levels[j + 1]) / 2
        payloads.append({"f": f.to_json(), "grid": grid.to_json(), "tau": frac_str(tau), "lambda": frac_str(lam)})
    return _run("stopping", _check_stopping, payloads, seed)


def _check_truncation(p: dict) -> Outcome:
    f = _f(p["f"])
    kind = _kind(p["kind"])
    s = truncation_cells(f, kind)
    small = rn_maximal(f, kind)
    wide = f.embed(f.universe.pad(s - 1 if s > 1 else 1))
    big = brute_maximal(wide, CubeFamily.all_cubes(wide.universe), kind)
    inner = big.restrict(f.universe)
    outside_zero = wide.universe.n_cells == f.universe.n_cells or bool(
        np.count_nonzero(big.values != 0) == np.count_nonzero(inner.values != 0))
    same = bool(np.all(inner.values == small.values))
    return Outcome(same and outside_zero, None, {"cells": s, "same": same, "outside_zero": outside_zero})


def truncation_suite(seed: int = 0, count: int = 50) -> VerificationReport:
    """A minimal-margin window and one with the margin doubled give identical outputs."""
    rng = _rng(seed)
    payloads = []
    for i in range(count):
        n = 1 if i % 5 else 2
        kind = MEDIAN if i % 2 else tau_kind(Fraction(int(rng.integers(1, 4)), 4))
        core = 4 if n == 1 else 2
        probe_u = Universe.box([(0, core)] * n, 1)
        f0 = samples.random_compact(probe_u, rng, (slice(None),) * n)
        if not np.any(f0.values != 0):
            f0 = StepFunction(probe_u, np.full(probe_u.extent, Fraction(1), dtype=object))
        s = truncation_cells(f0, kind)
        u = probe_u.pad(s - 1)
        f = f0.embed(u)
        payloads.append({"f": f.to_json(), "kind": kind.to_json()})
    return _run("truncation", _check_truncation, payloads, seed)


# -- (alpha, beta) implication ----------------------------------------------------


def _check_alpha_beta(p: dict) -> Outcome:
    w = _w(p["w"])
    alpha = Fraction(p["alpha"])
    fam = CubeFamily.all_cubes(w.universe, p.get("max_side"))
    beta = alpha_beta_profile(w, fam, alpha).value
    if not 0 < beta <= 1:
        return Outcome(False, beta, {"beta": frac_str(beta)})
    rnd = random.Random(p["seed"])
    cubes = enumerate_cubes(fam)
    worst = None
    for _ in range(p["trials"]):
        q = rnd.choice(cubes)
        cells = [tuple(c + o for c, o in zip(q.corner, off)) for off in np.ndindex(*(q.side,) * w.universe.dim)]
        k = rnd.randint(math.ceil(alpha * len(cells)), len(cells))
        chosen = rnd.sample(cells, k)
        we = sum((w.values[c] for c in chosen), Fraction(0))
        wq = sum(w.cube_values(q).tolist(), Fraction(0))
        r = beta * wq / we
        worst = r if worst is None or r > worst else worst
        if r > 1:
            return Outcome(False, r, {"cube": _cube_info(q), "cells": [list(c) for c in chosen]})
    return Outcome(True, worst, {"beta": frac_str(beta)})


def alpha_beta_suite(seed: int = 0, count: int = 20, alpha=Fraction(1, 2)) -> VerificationReport:
    """Sampled ``|E| >= alpha |Q| => w(E) >= beta* w(Q)`` with ``beta*`` from ``alpha_beta_profile``."""
    rng = _rng(seed)
    u = Universe.interval(0, 1, Fraction(1, 12))
    payloads = [{"w": samples.random_weight(u, rng).to_json(), "alpha": frac_str(as_fraction(alpha)),
                 "seed": seed * 1000 + i, "trials": 200} for i in range(count)]
    return _run("alpha-beta", _check_alpha_beta, payloads, seed, {"ratio": "beta* w(Q) / w(E)"})


# -- registry ---------------------------------------------------------------------

CHECKERS: dict[str, Callable[[dict], Outcome]] = {
    "comparison": _check_comparison,
    "a1-bound": _check_a1,
    "weak-type": _check_weak,
    "sharpness": _check_sharpness,
    "lp-lower": _check_lp,
    "expansion": _check_expansion,
    "fujii": _check_fujii,
    "covering": _check_covering,
    "domination": _check_domination,
    "dyadic-oracle": _check_dyadic,
    "stopping": _check_stopping,
    "truncation": _check_truncation,
    "alpha-beta": _check_alpha_beta,
}
