"""Step functions on a universe, weighted measures, distribution functions and L^p(w) norms.

Values are stored cell-wise in an ``object`` array of :class:`Fraction`.
A float-valued array is tolerated (dual weights with non-integer exponents
produce one) but exact operations refuse it.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .grid import DomainError, GridCube, Universe, as_fraction, frac_str, iter_cells


def fraction_array(values, shape=None) -> np.ndarray:
    flat = [as_fraction(v) for v in np.asarray(values, dtype=object).ravel()]
    arr = np.empty(len(flat), dtype=object)
    arr[:] = flat
    return arr.reshape(shape if shape is not None else np.shape(values))


def scaled_ints(values: np.ndarray) -> tuple[np.ndarray, int]:
    """Integer array ``A`` and denominator ``D`` with ``values == A / D`` exactly."""
    flat = values.ravel()
    d = 1
    for v in flat:
        d = math.lcm(d, v.denominator)
    ints = [v.numerator * (d // v.denominator) for v in flat]
    big = max((abs(i) for i in ints), default=0)
    dtype = np.int64 if big * max(len(ints), 1) < 2 ** 62 else object
    return np.array(ints, dtype=dtype).reshape(values.shape), d


@dataclass(eq=False)
class StepFunction:
    """Function constant on every cell of ``universe``."""

    universe: Universe
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.size != self.universe.n_cells:
            raise DomainError(f"{vals.size} values for extent {self.universe.extent}")
        if vals.dtype.kind == "f":
            vals = vals.astype(float)
        elif vals.dtype != object or not all(isinstance(v, Fraction) for v in vals.ravel()):
            vals = fraction_array(vals)
        self.values = vals.reshape(self.universe.extent)

    @classmethod
    def constant(cls, universe: Universe, c) -> "StepFunction":
        vals = np.empty(universe.extent, dtype=object)
        vals.fill(as_fraction(c))
        return cls(universe, vals)

    @classmethod
    def from_cells(cls, universe: Universe, fn: Callable[[tuple[int, ...]], object]) -> "StepFunction":
        vals = np.empty(universe.extent, dtype=object)
        for idx in iter_cells(universe):
            vals[idx] = as_fraction(fn(idx))
        return cls(universe, vals)

    @property
    def is_exact(self) -> bool:
        return self.values.dtype == object

    def require_exact(self) -> None:
        if not self.is_exact:
            raise DomainError("operation needs exact rational values")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, StepFunction)
            and self.universe == other.universe
            and self.values.shape == other.values.shape
            and bool(np.all(self.values == other.values))
        )

    def abs(self) -> "StepFunction":
        return StepFunction(self.universe, np.abs(self.values))

    def scale(self, c) -> "StepFunction":
        return StepFunction(self.universe, self.values * as_fraction(c))

    def cube_values(self, q: GridCube) -> np.ndarray:
        self.universe.check(q)
        return self.values[q.slices()].ravel()

    def support_measure(self) -> Fraction:
        return int(np.count_nonzero(self.values != 0)) * self.universe.cell_measure

    def refine(self, m: int) -> "StepFunction":
        """Same function on the universe refined ``m`` times per axis."""
        vals = self.values
        for ax in range(self.universe.dim):
            vals = np.repeat(vals, m, axis=ax)
        return StepFunction(self.universe.refine(m), vals, dict(self.meta))

    def embed(self, target: Universe) -> "StepFunction":
        """Zero-extension onto a larger universe on the same cell lattice."""
        off = _lattice_offset(self.universe, target)
        vals = np.zeros(target.extent, dtype=self.values.dtype)
        if self.is_exact:
            vals.fill(Fraction(0))
        vals[tuple(slice(o, o + e) for o, e in zip(off, self.universe.extent))] = self.values
        return StepFunction(target, vals)

    def restrict(self, target: Universe) -> "StepFunction":
        """Restriction onto a sub-universe on the same cell lattice."""
        off = _lattice_offset(target, self.universe)
        sl = tuple(slice(o, o + e) for o, e in zip(off, target.extent))
        return StepFunction(target, self.values[sl].copy())

    def to_json(self) -> dict:
        obj = self.universe.to_json()
        if self.is_exact:
            obj["values"] = [frac_str(v) for v in self.values.ravel()]
        else:
            obj["values"] = [float(v) for v in self.values.ravel()]
        if self.meta:
            obj["meta"] = self.meta
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "StepFunction":
        u = Universe.from_json(obj)
        raw = obj["values"]
        if len(raw) != u.n_cells:
            raise DomainError(f"{len(raw)} values for {u.n_cells} cells")
        if all(isinstance(v, str) for v in raw):
            vals = fraction_array([Fraction(v) for v in raw], u.extent)
        else:
            vals = np.array(raw, dtype=float).reshape(u.extent)
        return cls(u, vals, dict(obj.get("meta", {})))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["index", "coordinate", "value"])
        centers = [self.universe.centers(ax) for ax in range(self.universe.dim)]
        for idx in iter_cells(self.universe):
            coord = " ".join(repr(float(centers[ax][i])) for ax, i in enumerate(idx))
            v = self.values[idx]
            wr.writerow([" ".join(map(str, idx)), coord, frac_str(v) if isinstance(v, Fraction) else repr(float(v))])
        return buf.getvalue()


def _lattice_offset(inner: Universe, outer: Universe) -> tuple[int, ...]:
    if inner.cell != outer.cell or inner.dim != outer.dim:
        raise DomainError("universes are on different cell lattices")
    off = []
    for a, b, e_in, e_out in zip(inner.origin, outer.origin, inner.extent, outer.extent):
        k = (a - b) / inner.cell
        if k.denominator != 1 or k < 0 or k + e_in > e_out:
            raise DomainError("inner universe is not an aligned sub-window of the outer one")
        off.append(int(k))
    return tuple(off)


class Weight(StepFunction):
    """Non-negative step function used as a density ``w``; ``w(E) = sum over E of w h^n``."""

    def __post_init__(self):
        super().__post_init__()
        if np.any(self.values < 0):
            raise DomainError("weights must be non-negative")

    @classmethod
    def of(cls, f: StepFunction) -> "Weight":
        return cls(f.universe, f.values, dict(f.meta))

    @classmethod
    def lebesgue(cls, universe: Universe) -> "Weight":
        return cls.of(StepFunction.constant(universe, 1))

    def mass(self, q: GridCube):
        """``w(Q)``."""
        return _sum(self.cube_values(q)) * self.universe.cell_measure


@dataclass(eq=False)
class IndicatorSet:
    """Union of cells given by a boolean mask."""

    universe: Universe
    mask: np.ndarray

    def __post_init__(self):
        self.mask = np.asarray(self.mask, dtype=bool).reshape(self.universe.extent)

    @classmethod
    def empty(cls, universe: Universe) -> "IndicatorSet":
        return cls(universe, np.zeros(universe.extent, dtype=bool))

    @classmethod
    def full(cls, universe: Universe) -> "IndicatorSet":
        return cls(universe, np.ones(universe.extent, dtype=bool))

    @classmethod
    def of_cube(cls, universe: Universe, q: GridCube) -> "IndicatorSet":
        universe.check(q)
        m = np.zeros(universe.extent, dtype=bool)
        m[q.slices()] = True
        return cls(universe, m)

    def __eq__(self, other) -> bool:
        return isinstance(other, IndicatorSet) and self.universe == other.universe and bool(np.array_equal(self.mask, other.mask))

    def __or__(self, other: "IndicatorSet") -> "IndicatorSet":
        _same(self.universe, other.universe)
        return IndicatorSet(self.universe, self.mask | other.mask)

    def __and__(self, other: "IndicatorSet") -> "IndicatorSet":
        _same(self.universe, other.universe)
        return IndicatorSet(self.universe, self.mask & other.mask)

    def __le__(self, other: "IndicatorSet") -> bool:
        _same(self.universe, other.universe)
        return not np.any(self.mask & ~other.mask)

    @property
    def count(self) -> int:
        return int(self.mask.sum())

    @property
    def measure(self) -> Fraction:
        return self.count * self.universe.cell_measure

    def indicator(self) -> StepFunction:
        vals = np.where(self.mask, Fraction(1), Fraction(0)).astype(object)
        return StepFunction(self.universe, vals)

    def refine(self, m: int) -> "IndicatorSet":
        mask = self.mask
        for ax in range(self.universe.dim):
            mask = np.repeat(mask, m, axis=ax)
        return IndicatorSet(self.universe.refine(m), mask)


def _same(a: Universe, b: Universe) -> None:
    if a != b:
        raise DomainError("universe mismatch")


def _sum(values) -> Fraction | float:
    return sum(values.ravel().tolist(), Fraction(0)) if values.dtype == object else float(np.sum(values))


def _compare(values: np.ndarray, lam, strict: bool) -> np.ndarray:
    return values > lam if strict else values >= lam


def measure_above(f: StepFunction, q: GridCube, lam, strict: bool = True, absolute: bool = False) -> Fraction:
    """``|Q ∩ {g > lam}|`` (or ``>=`` when not strict) with ``g`` = ``f`` or ``|f|``."""
    vals = f.cube_values(q)
    if absolute:
        vals = np.abs(vals)
    return int(np.count_nonzero(_compare(vals, as_fraction(lam), strict))) * f.universe.cell_measure


def measure_below(f: StepFunction, q: GridCube, lam, strict: bool = True, absolute: bool = False) -> Fraction:
    """Complement companion of :func:`measure_above`: ``|Q ∩ {g < lam}|`` (``<=`` when not strict)."""
    return q.measure(f.universe) - measure_above(f, q, lam, strict=not strict, absolute=absolute)


def level_set(f: StepFunction, lam, strict: bool = True, absolute: bool = True) -> IndicatorSet:
    vals = np.abs(f.values) if absolute else f.values
    return IndicatorSet(f.universe, _compare(vals, lam, strict))


def weighted_measure(w: StepFunction, e: IndicatorSet):
    """``w(E)``, exact for rational weights."""
    _same(w.universe, e.universe)
    return _sum(w.values[e.mask]) * w.universe.cell_measure


def _int_power(p) -> int | None:
    if isinstance(p, (int, Fraction)) and as_fraction(p).denominator == 1 and p >= 1:
        return int(p)
    if isinstance(p, float) and p.is_integer() and p >= 1:
        return int(p)
    return None


def lp_power(f: StepFunction, w: StepFunction, p):
    """``sum |f|^p w h^n``; exact when ``p`` is a positive integer and both inputs are rational."""
    _same(f.universe, w.universe)
    k = _int_power(p)
    if k is not None and f.is_exact and w.is_exact:
        a = np.abs(f.values)
        return _sum(a ** k * w.values) * f.universe.cell_measure
    a = np.abs(f.values.astype(float))
    return float(np.sum(a ** float(p) * w.values.astype(float))) * float(f.universe.cell_measure)


def _root(x, p):
    if _int_power(p) == 1:
        return x
    return float(x) ** (1.0 / float(p))


def lp_norm(f: StepFunction, w: StepFunction, p=1):
    """``||f||_{L^p(w)}``: a Fraction for ``p = 1`` on rational data, a float otherwise."""
    if p <= 0:
        raise DomainError("p must be positive")
    return _root(lp_power(f, w, p), p)


def distribution_form(f: StepFunction, w: StepFunction, p=1):
    """The same norm evaluated through the layer-cake sum over the distinct values of ``|f|``."""
    if p <= 0:
        raise DomainError("p must be positive")
    _same(f.universe, w.universe)
    a = np.abs(f.values)
    k = _int_power(p)
    exact = k is not None and f.is_exact and w.is_exact
    levels = sorted(set(a.ravel().tolist()))
    total = Fraction(0) if exact else 0.0
    prev = Fraction(0) if exact else 0.0
    for v in levels:
        if v == 0:
            continue
        mass = weighted_measure(w, IndicatorSet(f.universe, a >= v))
        if exact:
            total += (v ** k - prev ** k) * mass
        else:
            total += (float(v) ** float(p) - float(prev) ** float(p)) * float(mass)
        prev = v
    return _root(total, p)
