"""Vectorised per-cube reductions over groups of equal-side cubes."""

from __future__ import annotations

import itertools

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def prefix_sums(arr: np.ndarray) -> np.ndarray:
    """Zero-padded n-d cumulative sums (works for int64 and object arrays)."""
    out = np.zeros(tuple(e + 1 for e in arr.shape), dtype=arr.dtype)
    if arr.dtype == object:
        out.fill(0)
    acc = arr
    for ax in range(arr.ndim):
        acc = np.cumsum(acc, axis=ax)
    out[tuple(slice(1, None) for _ in arr.shape)] = acc
    return out


def box_sums(prefix: np.ndarray, corners: np.ndarray, side: int) -> np.ndarray:
    """Sums over the cubes ``corners[j] + [0, side)^n`` by inclusion-exclusion on ``prefix``."""
    n = corners.shape[1]
    total = None
    for bits in itertools.product((0, 1), repeat=n):
        idx = tuple(corners[:, ax] + side * b for ax, b in enumerate(bits))
        sign = -1 if (n - sum(bits)) % 2 else 1
        term = prefix[idx] * sign
        total = term if total is None else total + term
    return total


def windows(arr: np.ndarray, corners: np.ndarray, side: int) -> np.ndarray:
    """``(K, side**n)`` array of the cell values of each cube."""
    view = sliding_window_view(arr, (side,) * arr.ndim)
    return view[tuple(corners.T)].reshape(len(corners), -1)


def scatter_max(out: np.ndarray, corners: np.ndarray, side: int, stats: np.ndarray) -> None:
    """``out[c] = max(out[c], stats[j])`` for every cell ``c`` of cube ``j``."""
    if len(corners) == 0:
        return
    # for a fixed offset distinct corners hit distinct cells
    for off in itertools.product(range(side), repeat=corners.shape[1]):
        idx = tuple(corners[:, ax] + o for ax, o in enumerate(off))
        cur = out[idx]
        if out.dtype == object:
            out[idx] = np.where((stats > cur).astype(bool), stats, cur)
        else:
            out[idx] = np.maximum(cur, stats)
