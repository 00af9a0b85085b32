"""Cube geometry on uniform grids, dyadic grids and the shifted-grid cover.

Two coordinate systems are used throughout.  A :class:`GridCube` lives in
cell-index space of a :class:`Universe` (integer corner, integer side),
while a :class:`Cube` is an absolute half-open cube ``[a, a + l)^n`` with
rational corner and side.  All cubes are half-open so the cubes of one
dyadic scale partition space.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

THIRD = Fraction(1, 3)


class DomainError(ValueError):
    """Input outside the domain of an operation (bad cube, misaligned grid, ...)."""


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError(f"refusing to convert float {x!r} to an exact rational")
    return Fraction(x)


def frac_str(x: Fraction) -> str:
    x = as_fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _require_int(x: Fraction, what: str) -> int:
    if x.denominator != 1:
        raise DomainError(f"{what} is not an integer number of cells: {x}")
    return x.numerator


@dataclass(frozen=True)
class Universe:
    """Finite window of R^n tiled by ``prod(extent)`` congruent cells of side ``cell``."""

    origin: tuple[Fraction, ...]
    cell: Fraction
    extent: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "origin", tuple(as_fraction(o) for o in self.origin))
        object.__setattr__(self, "cell", as_fraction(self.cell))
        object.__setattr__(self, "extent", tuple(int(e) for e in self.extent))
        if len(self.origin) != len(self.extent) or not self.extent:
            raise DomainError("origin and extent must have the same positive length")
        if self.cell <= 0 or any(e <= 0 for e in self.extent):
            raise DomainError("cell side and extents must be positive")

    @classmethod
    def interval(cls, lo, hi, cell) -> "Universe":
        """1-D universe ``[lo, hi)``."""
        return cls.box([(lo, hi)], cell)

    @classmethod
    def box(cls, bounds: Sequence[tuple], cell) -> "Universe":
        cell = as_fraction(cell)
        origin, extent = [], []
        for lo, hi in bounds:
            lo, hi = as_fraction(lo), as_fraction(hi)
            origin.append(lo)
            extent.append(_require_int((hi - lo) / cell, f"width of [{lo}, {hi})"))
        return cls(tuple(origin), cell, tuple(extent))

    @property
    def dim(self) -> int:
        return len(self.extent)

    @property
    def cell_measure(self) -> Fraction:
        return self.cell ** self.dim

    @property
    def n_cells(self) -> int:
        return math.prod(self.extent)

    @property
    def measure(self) -> Fraction:
        return self.cell_measure * self.n_cells

    def contains(self, q: "GridCube") -> bool:
        return q.dim == self.dim and all(
            0 <= c and c + q.side <= e for c, e in zip(q.corner, self.extent)
        )

    def check(self, q: "GridCube") -> None:
        if not self.contains(q):
            raise DomainError(f"{q} is not inside universe with extent {self.extent}")

    def to_cube(self, q: "GridCube") -> "Cube":
        corner = tuple(o + c * self.cell for o, c in zip(self.origin, q.corner))
        return Cube(corner, q.side * self.cell)

    def cell_index(self, x: Sequence) -> tuple[int, ...]:
        """Index of the cell containing point ``x`` (floor, may be out of range)."""
        return tuple(
            math.floor((as_fraction(xi) - o) / self.cell) for xi, o in zip(x, self.origin)
        )

    def centers(self, axis: int) -> list[Fraction]:
        o, h = self.origin[axis], self.cell
        return [o + (i + Fraction(1, 2)) * h for i in range(self.extent[axis])]

    def refine(self, m: int) -> "Universe":
        """Same window with each cell split into ``m**n`` subcells."""
        return Universe(self.origin, self.cell / m, tuple(e * m for e in self.extent))

    def pad(self, margin: int | Sequence[int]) -> "Universe":
        """Universe grown by ``margin`` cells on every side (same cell lattice)."""
        if isinstance(margin, int):
            margin = (margin,) * self.dim
        origin = tuple(o - k * self.cell for o, k in zip(self.origin, margin))
        extent = tuple(e + 2 * k for e, k in zip(self.extent, margin))
        return Universe(origin, self.cell, extent)

    def to_json(self) -> dict:
        return {
            "dims": self.dim,
            "origin": [frac_str(o) for o in self.origin],
            "cell": frac_str(self.cell),
            "extent": list(self.extent),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Universe":
        u = cls(tuple(Fraction(o) for o in obj["origin"]), Fraction(obj["cell"]), tuple(obj["extent"]))
        if "dims" in obj and obj["dims"] != u.dim:
            raise DomainError(f"dims={obj['dims']} does not match origin/extent")
        return u


@dataclass(frozen=True, order=True)
class GridCube:
    """Cube of ``side**n`` cells whose lower corner is cell ``corner``."""

    corner: tuple[int, ...]
    side: int

    def __post_init__(self):
        object.__setattr__(self, "corner", tuple(int(c) for c in self.corner))
        if self.side <= 0:
            raise DomainError(f"cube side must be positive, got {self.side}")

    @property
    def dim(self) -> int:
        return len(self.corner)

    @property
    def n_cells(self) -> int:
        return self.side ** self.dim

    def measure(self, universe: Universe) -> Fraction:
        return (self.side * universe.cell) ** self.dim

    def slices(self) -> tuple[slice, ...]:
        return tuple(slice(c, c + self.side) for c in self.corner)

    def contains_cell(self, idx: Sequence[int]) -> bool:
        return all(c <= i < c + self.side for c, i in zip(self.corner, idx))

    def contains(self, other: "GridCube") -> bool:
        return all(
            c <= oc and oc + other.side <= c + self.side
            for c, oc in zip(self.corner, other.corner)
        )

    def dilate(self, factor: int) -> "GridCube":
        """Concentric cube with ``factor`` times the side (odd factors stay on the grid)."""
        if factor % 2 != 1:
            raise DomainError("only odd dilation factors keep a grid-aligned centre")
        shift = (factor - 1) // 2 * self.side
        return GridCube(tuple(c - shift for c in self.corner), factor * self.side)

    def to_json(self) -> dict:
        return {"corner": list(self.corner), "side": self.side}

    @classmethod
    def from_json(cls, obj: dict) -> "GridCube":
        return cls(tuple(obj["corner"]), int(obj["side"]))


@dataclass(frozen=True)
class Cube:
    """Absolute half-open cube ``prod [corner_i, corner_i + side)``."""

    corner: tuple[Fraction, ...]
    side: Fraction

    def __post_init__(self):
        object.__setattr__(self, "corner", tuple(as_fraction(c) for c in self.corner))
        object.__setattr__(self, "side", as_fraction(self.side))

    @property
    def dim(self) -> int:
        return len(self.corner)

    @property
    def measure(self) -> Fraction:
        return self.side ** self.dim

    def contains(self, other: "Cube") -> bool:
        return all(
            a <= b and b + other.side <= a + self.side
            for a, b in zip(self.corner, other.corner)
        )


@dataclass(frozen=True)
class DyadicGridSpec:
    """The grid ``{2^-k ([0,1)^n + m + (-1)^k shift) : k_min <= k <= k_max, m in Z^n}``."""

    shift: tuple[Fraction, ...]
    scale_range: tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, "shift", tuple(as_fraction(s) for s in self.shift))
        object.__setattr__(self, "scale_range", tuple(int(k) for k in self.scale_range))
        if any(s not in (0, THIRD) for s in self.shift):
            raise DomainError(f"shift components must be 0 or 1/3, got {self.shift}")
        if self.scale_range[0] > self.scale_range[1]:
            raise DomainError(f"empty scale range {self.scale_range}")

    @property
    def dim(self) -> int:
        return len(self.shift)

    @property
    def scales(self) -> range:
        return range(self.scale_range[0], self.scale_range[1] + 1)

    def side(self, k: int) -> Fraction:
        return Fraction(2) ** -k

    def offset(self, k: int) -> tuple[Fraction, ...]:
        """Absolute position of the corner with ``m = 0`` at scale ``k``."""
        sign = 1 if k % 2 == 0 else -1
        return tuple(self.side(k) * sign * s for s in self.shift)

    def cube_containing(self, k: int, x: Sequence[Fraction]) -> Cube:
        side = self.side(k)
        corner = tuple(
            o + side * math.floor((as_fraction(xi) - o) / side)
            for xi, o in zip(x, self.offset(k))
        )
        return Cube(corner, side)

    def cell_lattice(self, universe: Universe, k: int) -> tuple[int, tuple[int, ...]] | None:
        """(side in cells, corner offset in cells mod side) at scale ``k``, or None if misaligned."""
        side = self.side(k) / universe.cell
        if side.denominator != 1:
            return None
        offs = []
        for o, u in zip(self.offset(k), universe.origin):
            c = (o - u) / universe.cell
            if c.denominator != 1:
                return None
            offs.append(c.numerator % side.numerator)
        return side.numerator, tuple(offs)

    @classmethod
    def fitting(cls, universe: Universe, shift: Sequence = None, k_max: int | None = None) -> "DyadicGridSpec":
        """Grid with the given shift spanning every aligned scale that fits in ``universe``.

        ``k_max`` defaults to the finest scale whose cubes are unions of cells.
        """
        shift = tuple(shift) if shift is not None else (0,) * universe.dim
        probe = cls(shift, (0, 0))
        if k_max is None:
            top = math.ceil(-math.log2(universe.cell)) + 2
            k_max = next(
                (k for k in range(top, top - 64, -1) if probe.cell_lattice(universe, k)), None
            )
            if k_max is None:
                raise DomainError(f"no dyadic scale with shift {shift} aligns with cell {universe.cell}")
        elif probe.cell_lattice(universe, k_max) is None:
            raise DomainError(f"scale {k_max} does not align with the universe cells")
        k_min = k_max
        while _fits(probe, universe, k_min - 1):
            k_min -= 1
        if not _fits(probe, universe, k_max):
            raise DomainError(f"no cube of scale {k_max} fits in the universe")
        return cls(shift, (k_min, k_max))

    def to_json(self) -> dict:
        return {"shift": [frac_str(s) for s in self.shift], "scale_range": list(self.scale_range)}

    @classmethod
    def from_json(cls, obj: dict) -> "DyadicGridSpec":
        return cls(tuple(Fraction(s) for s in obj["shift"]), tuple(obj["scale_range"]))


def _fits(grid: DyadicGridSpec, universe: Universe, k: int) -> bool:
    lat = grid.cell_lattice(universe, k)
    if lat is None:
        return False
    side, offs = lat
    return all(o + side <= e for o, e in zip(offs, universe.extent))


def dyadic_corners(grid: DyadicGridSpec, universe: Universe, k: int) -> tuple[int, np.ndarray]:
    """Side (cells) and lexicographically sorted corners of scale-``k`` cubes inside ``universe``."""
    lat = grid.cell_lattice(universe, k)
    if lat is None:
        raise DomainError(f"dyadic scale {k} (side {grid.side(k)}) is not aligned with cell {universe.cell}")
    side, offs = lat
    axes = [np.arange(o, e - side + 1, side) for o, e in zip(offs, universe.extent)]
    return side, _mesh(axes)


def _mesh(axes: list[np.ndarray]) -> np.ndarray:
    if any(len(a) == 0 for a in axes):
        return np.zeros((0, len(axes)), dtype=np.int64)
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)


@dataclass(frozen=True)
class CubeFamily:
    """Finite family of grid cubes over which suprema are taken.

    ``kind`` is ``"all"`` (every grid-aligned cube with side <= ``max_side``
    cells), ``"dyadic"`` (the cubes of ``grid`` lying inside the universe)
    or ``"explicit"`` (a given list).
    """

    kind: str
    universe: Universe
    max_side: int | None = None
    grid: DyadicGridSpec | None = None
    cubes: tuple[GridCube, ...] = field(default=())

    def __post_init__(self):
        if self.kind == "all":
            if self.max_side is None:
                object.__setattr__(self, "max_side", max(self.universe.extent))
            if self.max_side <= 0:
                raise DomainError("max_side must be positive")
        elif self.kind == "dyadic":
            if self.grid is None or self.grid.dim != self.universe.dim:
                raise DomainError("dyadic family needs a grid of matching dimension")
        elif self.kind == "explicit":
            cubes = tuple(sorted(set(self.cubes), key=_canonical))
            for q in cubes:
                self.universe.check(q)
            object.__setattr__(self, "cubes", cubes)
        else:
            raise DomainError(f"unknown family kind {self.kind!r}")

    @classmethod
    def all_cubes(cls, universe: Universe, max_side: int | None = None) -> "CubeFamily":
        return cls("all", universe, max_side=max_side)

    @classmethod
    def dyadic(cls, universe: Universe, grid: DyadicGridSpec | None = None) -> "CubeFamily":
        return cls("dyadic", universe, grid=grid or DyadicGridSpec.fitting(universe))

    @classmethod
    def explicit(cls, universe: Universe, cubes) -> "CubeFamily":
        return cls("explicit", universe, cubes=tuple(cubes))

    def groups(self) -> list[tuple[int, np.ndarray]]:
        """``(side, corners)`` per side length, sides ascending, corners lexicographic."""
        u = self.universe
        out = []
        if self.kind == "all":
            for s in range(1, min(self.max_side, max(u.extent)) + 1):
                if s > min(u.extent):
                    break
                corners = _mesh([np.arange(0, e - s + 1) for e in u.extent])
                out.append((s, corners))
        elif self.kind == "dyadic":
            by_side = {}
            for k in self.grid.scales:
                side, corners = dyadic_corners(self.grid, u, k)
                if len(corners):
                    by_side[side] = corners
            out = sorted(by_side.items())
        else:
            for s, grp in itertools.groupby(self.cubes, key=lambda q: q.side):
                out.append((s, np.array([q.corner for q in grp], dtype=np.int64)))
        return out

    def to_json(self) -> dict:
        obj = {"kind": self.kind, "universe": self.universe.to_json()}
        if self.kind == "all":
            obj["max_side"] = self.max_side
        elif self.kind == "dyadic":
            obj["grid"] = self.grid.to_json()
        else:
            obj["cubes"] = [q.to_json() for q in self.cubes]
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "CubeFamily":
        u = Universe.from_json(obj["universe"])
        if obj["kind"] == "all":
            return cls.all_cubes(u, obj.get("max_side"))
        if obj["kind"] == "dyadic":
            return cls.dyadic(u, DyadicGridSpec.from_json(obj["grid"]))
        return cls.explicit(u, [GridCube.from_json(q) for q in obj["cubes"]])

    def describe(self) -> str:
        if self.kind == "all":
            return f"all grid-aligned cubes, side <= {self.max_side} cells"
        if self.kind == "dyadic":
            return f"dyadic grid shift={[str(s) for s in self.grid.shift]} scales={self.grid.scale_range}"
        return f"explicit list of {len(self.cubes)} cubes"


def _canonical(q: GridCube):
    return (q.side, q.corner)


def enumerate_cubes(family: CubeFamily) -> list[GridCube]:
    """Every cube of the family once, ordered by ``(side, corner)``."""
    return [
        GridCube(tuple(int(c) for c in corner), side)
        for side, corners in family.groups()
        for corner in corners
    ]


def shifted_grids(n: int, scale_range: tuple[int, int] = (0, 0)) -> list[DyadicGridSpec]:
    """The ``2**n`` grids with shifts in ``{0, 1/3}^n``."""
    if n < 1:
        raise DomainError("dimension must be at least 1")
    return [
        DyadicGridSpec(shift, scale_range)
        for shift in itertools.product((Fraction(0), THIRD), repeat=n)
    ]


def covering_cube(q: Cube, grids: Sequence[DyadicGridSpec]) -> tuple[int, Cube]:
    """Smallest cube of the given grids containing ``q``.

    Scales are scanned from fine to coarse; at each scale the grids are
    tried in order, so ties go to the lowest grid index.
    """
    if not grids:
        raise DomainError("no grids given")
    k_lo = min(g.scale_range[0] for g in grids)
    k_hi = max(g.scale_range[1] for g in grids)
    for k in range(k_hi, k_lo - 1, -1):
        if Fraction(2) ** -k < q.side:
            continue
        for j, g in enumerate(grids):
            if not g.scale_range[0] <= k <= g.scale_range[1]:
                continue
            r = g.cube_containing(k, q.corner)
            if r.contains(q):
                return j, r
    raise DomainError(f"scale range exhausted: no grid cube in scales [{k_lo}, {k_hi}] contains {q}")


def covering_scale(side: Fraction) -> int:
    """The scale ``k`` with ``3 side <= 2^-k < 6 side`` used by the one-third argument."""
    side = as_fraction(side)
    k = math.floor(-math.log2(3 * side))
    while Fraction(2) ** -k < 3 * side:
        k -= 1
    while Fraction(2) ** -(k + 1) >= 3 * side:
        k += 1
    return k


def iter_cells(universe: Universe) -> Iterator[tuple[int, ...]]:
    return itertools.product(*(range(e) for e in universe.extent))
