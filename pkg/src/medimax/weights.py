"""Muckenhoupt characteristics of step weights over finite cube families.

Each characteristic is a supremum over the cubes of a family and is
reported with the first cube (in canonical ``(side, corner)`` order)
attaining it.  Values are exact :class:`Fraction` where the formula is
rational (A_1, A_2, the Fujii-Wilson form, the (alpha, beta) profile,
doubling ratios) and floats otherwise.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np

from . import _cubes
from .grid import CubeFamily, DomainError, GridCube, Universe, as_fraction, frac_str
from .maximal import hl_max_scaled
from .stepfn import StepFunction, Weight, scaled_ints

INF = math.inf
FLOAT_RTOL = 1e-10


@dataclass(frozen=True)
class Characteristic:
    name: str
    value: Fraction | float
    witness: GridCube | None
    family: dict

    @property
    def exact(self) -> bool:
        return isinstance(self.value, Fraction)

    @property
    def infinite(self) -> bool:
        return self.value == INF

    def to_json(self) -> dict:
        if self.exact:
            value = frac_str(self.value)
        elif self.infinite:
            value = "inf"
        else:
            value = float(self.value)
        return {
            "characteristic": self.name,
            "value": value,
            "witness": self.witness.to_json() if self.witness else None,
            "family": self.family,
        }


def _shrink_min(cur: np.ndarray) -> np.ndarray:
    """Minima over side-``s+1`` cubes from minima over side-``s`` cubes."""
    n = cur.ndim
    parts = []
    for bits in np.ndindex(*(2,) * n):
        parts.append(cur[tuple(slice(b, b + e - 1) for b, e in zip(bits, cur.shape))])
    return reduce(np.minimum, parts)


def _sums_and_mins(ints: np.ndarray, family: CubeFamily):
    pre = _cubes.prefix_sums(ints)
    if family.kind == "all":
        cur = ints
        for side, corners in family.groups():
            if side > 1:
                cur = _shrink_min(cur)
            yield side, corners, _cubes.box_sums(pre, corners, side), cur.ravel()
    else:
        for side, corners in family.groups():
            yield side, corners, _cubes.box_sums(pre, corners, side), _cubes.windows(ints, corners, side).min(axis=1)


def _as_float(a: np.ndarray) -> np.ndarray:
    return a.astype(float) if a.dtype == object else a.astype(float, copy=False)


class _Sup:
    """Running exact supremum with first-witness tie-breaking."""

    def __init__(self):
        self.value = None
        self.witness = None

    def offer(self, value, witness: GridCube) -> None:
        if self.value is None or value > self.value:
            self.value, self.witness = value, witness

    def offer_ratios(self, num: np.ndarray, den: np.ndarray, corners: np.ndarray, side: int) -> None:
        """Offer ``num[j] / den[j]`` (integers, ``den > 0``) for every cube in the group."""
        if len(num) == 0:
            return
        q = _as_float(num) / _as_float(den)
        top = q.max()
        for j in np.flatnonzero(q >= top * (1 - 1e-9)):
            self.offer(Fraction(int(num[j]), int(den[j])), GridCube(tuple(int(c) for c in corners[j]), side))


def _family_universe(w: StepFunction, family: CubeFamily) -> None:
    if family.universe != w.universe:
        raise DomainError("family and weight live on different universes")


def _finish(name: str, sup: _Sup, family: CubeFamily) -> Characteristic:
    if sup.value is None:
        raise DomainError(f"{name}: no admissible cube in the family")
    return Characteristic(name, sup.value, sup.witness, family.to_json())


def a1_characteristic(w: Weight, family: CubeFamily) -> Characteristic:
    """``sup_Q (w(Q)/|Q|) * max_Q (1/w)``; infinite if ``w`` vanishes on a cell of a cube with ``w(Q) > 0``."""
    _family_universe(w, family)
    w.require_exact()
    ints, _ = scaled_ints(w.values)
    sup = _Sup()
    for side, corners, sums, mins in _sums_and_mins(ints, family):
        n = side ** w.universe.dim
        zero = mins == 0
        bad = np.flatnonzero(zero & (sums > 0))
        if len(bad):
            return Characteristic("A1", INF, GridCube(tuple(int(c) for c in corners[bad[0]]), side), family.to_json())
        ok = ~zero
        sup.offer_ratios(sums[ok], mins[ok] * n, corners[ok], side)
    return _finish("A1", sup, family)


def dual_weight(w: Weight, p) -> Weight:
    """``sigma = w^(-1/(p-1))``, exact when ``1/(p-1)`` is an integer."""
    if np.any(w.values == 0):
        raise DomainError("dual weight undefined where w vanishes")
    if isinstance(p, float):
        k = None
        expo = -1.0 / (p - 1)
    else:
        p = as_fraction(p)
        if p <= 1:
            raise DomainError("p must exceed 1")
        inv = 1 / (p - 1)
        k = inv.numerator if inv.denominator == 1 else None
        expo = -float(inv)
    if k is not None and w.is_exact:
        flat = [v ** -k for v in w.values.ravel().tolist()]
        vals = np.empty(len(flat), dtype=object)
        vals[:] = flat
        return Weight(w.universe, vals.reshape(w.universe.extent))
    return Weight(w.universe, w.values.astype(float) ** expo)


def ap_characteristic(w: Weight, p, family: CubeFamily) -> Characteristic:
    """``sup_Q avg_Q(w) * avg_Q(sigma)^(p-1)``; exact rational for ``p = 2``."""
    _family_universe(w, family)
    p = p if isinstance(p, float) else as_fraction(p)
    if p <= 1:
        raise DomainError("p must exceed 1")
    name = f"A{p}"
    wf = w.values.astype(float)
    if np.any(wf == 0):
        sup = _zero_cell_sup(w, family)
        if sup is not None:
            return Characteristic(name, INF, sup, family.to_json())
    if p == 2 and w.is_exact:
        sigma = dual_weight(w, 2)
        wi, dw = scaled_ints(w.values)
        si, ds = scaled_ints(sigma.values)
        pw, ps = _cubes.prefix_sums(wi), _cubes.prefix_sums(si)
        sup = _Sup()
        for side, corners in family.groups():
            n = side ** w.universe.dim
            num = _cubes.box_sums(pw, corners, side) * _cubes.box_sums(ps, corners, side)
            den = np.full(len(corners), n * n * dw * ds, dtype=object)
            sup.offer_ratios(num, den, corners, side)
        return _finish(name, sup, family)
    sigma = wf ** (-1.0 / (float(p) - 1))
    return _float_sup(name, family, wf, sigma, lambda aw, a2, n: (aw / n) * (a2 / n) ** (float(p) - 1))


def _zero_cell_sup(w: Weight, family: CubeFamily) -> GridCube | None:
    """First family cube with a zero cell and positive mass, if any."""
    ints, _ = scaled_ints(w.values) if w.is_exact else (w.values, 1)
    for side, corners, sums, mins in _sums_and_mins(ints, family):
        bad = np.flatnonzero((mins == 0) & (sums > 0))
        if len(bad):
            return GridCube(tuple(int(c) for c in corners[bad[0]]), side)
    return None


def _float_sup(name, family, a, b, combine) -> Characteristic:
    pa, pb = _cubes.prefix_sums(a), _cubes.prefix_sums(b)
    best, wit = None, None
    for side, corners in family.groups():
        n = side ** a.ndim
        vals = combine(_cubes.box_sums(pa, corners, side), _cubes.box_sums(pb, corners, side), n)
        j = int(np.argmax(vals))
        if best is None or vals[j] > best * (1 + 1e-13):
            best, wit = float(vals[j]), GridCube(tuple(int(c) for c in corners[j]), side)
    if best is None:
        raise DomainError(f"{name}: empty family")
    return Characteristic(name, best, wit, family.to_json())


def ainf_exp_characteristic(w: Weight, family: CubeFamily) -> Characteristic:
    """``sup_Q avg_Q(w) * exp(avg_Q(log 1/w))`` in floating point."""
    _family_universe(w, family)
    wf = w.values.astype(float)
    if np.any(wf == 0):
        sup = _zero_cell_sup(w, family)
        if sup is not None:
            return Characteristic("Ainf_exp", INF, sup, family.to_json())
    return _float_sup("Ainf_exp", family, wf, np.log(wf), lambda aw, al, n: (aw / n) * np.exp(-al / n))


def _local_inner(universe: Universe, q: GridCube, inner: CubeFamily):
    """Sub-universe holding every inner cube that meets ``q`` (for ``all`` inner families)."""
    s = inner.max_side
    lo = [max(0, c - s + 1) for c in q.corner]
    hi = [min(e, c + q.side + s - 1) for c, e in zip(q.corner, universe.extent)]
    local = Universe(
        tuple(o + l * universe.cell for o, l in zip(universe.origin, lo)),
        universe.cell,
        tuple(h - l for l, h in zip(lo, hi)),
    )
    return local, tuple(lo)


def ainf_fujii_characteristic(w: Weight, family: CubeFamily, inner_family: CubeFamily) -> Characteristic:
    """``sup_Q w(Q)^-1 * integral_Q M(w chi_Q)`` with ``M`` the averaging maximal operator over ``inner_family``."""
    _family_universe(w, family)
    _family_universe(w, inner_family)
    w.require_exact()
    u = w.universe
    ints, _ = scaled_ints(w.values)
    sup = _Sup()
    skipped = 0
    for side, corners in family.groups():
        for corner in corners:
            q = GridCube(tuple(int(c) for c in corner), side)
            if not np.any(ints[q.slices()]):
                skipped += 1
                continue
            if inner_family.kind == "all":
                local, lo = _local_inner(u, q, inner_family)
                g = np.zeros(local.extent, dtype=ints.dtype)
                rel = tuple(slice(c - l, c - l + side) for c, l in zip(q.corner, lo))
                g[rel] = ints[q.slices()]
                groups = CubeFamily.all_cubes(local, inner_family.max_side).groups()
            else:
                g = np.zeros(u.extent, dtype=ints.dtype)
                rel = q.slices()
                g[rel] = ints[q.slices()]
                groups = inner_family.groups()
            scaled, lcm = hl_max_scaled(g, groups)
            # ratio of integral_Q M(w chi_Q) to w(Q); the cell measure and D cancel
            sup.offer(Fraction(int(scaled[rel].sum()), lcm * int(g[rel].sum())), q)
    if skipped:
        warnings.warn(f"Ainf_fujii: skipped {skipped} cubes with w(Q) = 0", stacklevel=2)
    ch = _finish("Ainf_fujii", sup, family)
    return Characteristic(ch.name, ch.value, ch.witness, {**ch.family, "inner": inner_family.to_json()})


def alpha_beta_profile(w: Weight, family: CubeFamily, alpha) -> Characteristic:
    """``min_Q min{w(E)/w(Q) : E ⊆ Q a union of cells, |E| >= alpha |Q|}``.

    The inner minimum takes the ``ceil(alpha N)`` lightest cells, which is
    optimal because all cells have the same measure.
    """
    _family_universe(w, family)
    alpha = as_fraction(alpha)
    if not 0 < alpha < 1:
        raise DomainError("alpha must lie in (0, 1)")
    ints, _ = scaled_ints(w.values)
    best = _Sup()
    for side, corners in family.groups():
        n = side ** w.universe.dim
        win = np.sort(_cubes.windows(ints, corners, side), axis=1)
        k = math.ceil(alpha * n)
        light = win[:, :k].sum(axis=1)
        total = win.sum(axis=1)
        ok = total > 0
        # minimise light/total == maximise total/light (light may be 0)
        zero_light = ok & (light == 0)
        if np.any(zero_light):
            j = int(np.flatnonzero(zero_light)[0])
            best.offer(INF, GridCube(tuple(int(c) for c in corners[j]), side))
            continue
        best.offer_ratios(total[ok], light[ok], corners[ok], side)
    if best.value is None:
        raise DomainError("alpha_beta_profile: every cube has zero mass")
    beta = Fraction(0) if best.value == INF else 1 / best.value
    return Characteristic(f"beta*(alpha={alpha})", beta, best.witness, family.to_json())


def doubling_ratio(w: Weight, family: CubeFamily) -> Characteristic:
    """``sup w(5Q) / w(Q)`` over family cubes whose 5-fold dilate lies in the universe."""
    _family_universe(w, family)
    ints, _ = scaled_ints(w.values)
    pre = _cubes.prefix_sums(ints)
    sup = _Sup()
    ext = np.array(w.universe.extent)
    for side, corners in family.groups():
        big = corners - 2 * side
        ok = np.all(big >= 0, axis=1) & np.all(big + 5 * side <= ext, axis=1)
        if not np.any(ok):
            continue
        small = _cubes.box_sums(pre, corners[ok], side)
        large = _cubes.box_sums(pre, big[ok], 5 * side)
        pos = small > 0
        sup.offer_ratios(large[pos], small[pos], corners[ok][pos], side)
    return _finish("doubling", sup, family)


def characteristic_report(w: Weight, family: CubeFamily, p=2, inner_family: CubeFamily | None = None,
                          fujii_family: CubeFamily | None = None) -> list[Characteristic]:
    """All four characteristics; the Fujii-Wilson one may use a smaller outer family."""
    inner = inner_family or family
    return [
        a1_characteristic(w, family),
        ap_characteristic(w, p, family),
        ainf_exp_characteristic(w, family),
        ainf_fujii_characteristic(w, fujii_family or family, inner),
    ]
