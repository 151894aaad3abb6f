"""Midpoint quadrature on boxes and its certified error bound."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .jets import IndexSet, Jet


@dataclass(frozen=True)
class Grid:
    """Tensor midpoint grid. ``points`` are the cell centers in 'ij' order."""

    box: tuple
    counts: tuple
    points: np.ndarray

    @property
    def M(self) -> int:
        return math.prod(self.counts)

    @property
    def dim(self) -> int:
        return len(self.box)

    @property
    def lengths(self) -> tuple:
        return tuple(b - a for a, b in self.box)

    @property
    def cell_volume(self) -> float:
        return math.prod(L / n for L, n in zip(self.lengths, self.counts))

    @property
    def volume(self) -> float:
        return math.prod(self.lengths)


def _check_box(box):
    box = tuple((float(a), float(b)) for a, b in box)
    if not box:
        raise ValueError("box must have at least one axis")
    for a, b in box:
        if not b > a:
            raise ValueError(f"degenerate box side [{a}, {b}]")
    return box


def per_axis_count(M: int, m: int) -> int:
    """``M**(1/m)`` when it is an integer, else ValueError."""
    if M < 1 or m < 1:
        raise ValueError("M and m must be positive")
    n = round(M ** (1.0 / m))
    for c in (n - 1, n, n + 1):
        if c >= 1 and c ** m == M:
            return c
    raise ValueError(f"M={M} is not a perfect {m}-th power")


def midpoint_grid(box: Sequence, counts) -> Grid:
    """Midpoint grid with ``counts`` cells per axis (an int gives M**(1/m) per axis)."""
    box = _check_box(box)
    m = len(box)
    if isinstance(counts, (int, np.integer)):
        counts = (per_axis_count(int(counts), m),) * m
    counts = tuple(int(c) for c in counts)
    if len(counts) != m or min(counts) < 1:
        raise ValueError("need one positive count per axis")
    axes = [a + (np.arange(n) + 0.5) * (b - a) / n for (a, b), n in zip(box, counts)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=1)
    return Grid(box, counts, pts)


def node_points(box: Sequence, counts: Sequence[int]) -> np.ndarray:
    """Closed tensor grid with ``counts[j]`` intervals per axis (endpoints included)."""
    box = _check_box(box)
    axes = [np.linspace(a, b, int(n) + 1) for (a, b), n in zip(box, counts)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=1)


def lp_norm_midpoint(values: np.ndarray, p: float, grid: Grid) -> float:
    """p-powered midpoint value ``vol * sum |v|**p`` (components are summed)."""
    v = np.asarray(values, dtype=float)
    if v.shape[0] != grid.M:
        raise ValueError(f"expected {grid.M} values, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("non-finite value in quadrature input")
    return float(grid.cell_volume * np.sum(np.abs(v) ** p))


def midpoint_error_bound(box: Sequence, M: int, sups: Sequence[float]) -> float:
    """Certified bound for the midpoint rule with M points on a box.

    ``sups[j]`` bounds the sup of the second derivative along axis j.
    """
    box = _check_box(box)
    m = len(box)
    if len(sups) != m:
        raise ValueError("need one second-derivative bound per axis")
    if any(s < 0 for s in sups):
        raise ValueError("sup bounds must be non-negative")
    per_axis_count(int(M), m)
    L = [b - a for a, b in box]
    return math.prod(L) / (24.0 * M ** (2.0 / m)) * sum(l * l * s for l, s in zip(L, sups))


def grid_error_bound(grid: Grid, sups: Sequence[float]) -> float:
    """Per-axis form for a grid; equals midpoint_error_bound for equal counts."""
    if len(sups) != grid.dim:
        raise ValueError("need one second-derivative bound per axis")
    if any(s < 0 for s in sups):
        raise ValueError("sup bounds must be non-negative")
    return grid.volume / 24.0 * sum((L / n) ** 2 * s for L, n, s in zip(grid.lengths, grid.counts, sups))


def pc2_bound(p: float, c2: float) -> float:
    """Bound on a second derivative of ``|y|**p`` given ``||y||_C2 <= c2`` (p >= 2)."""
    if p < 2:
        raise ValueError(f"pc2_bound needs p >= 2, got {p}")
    if c2 < 0:
        raise ValueError("c2 must be non-negative")
    return p * p * c2 ** p


def sup_norm_surrogate(function: Callable, grid, order: int) -> float:
    """Max of ``|d^i f|`` for ``|i| <= order`` over the grid points.

    ``function(points, iset)`` returns a Jet or a list of Jets. This is a
    sampled surrogate and may under-report the true sup.
    """
    pts = grid.points if isinstance(grid, Grid) else np.asarray(grid, dtype=float)
    iset = IndexSet.total(pts.shape[1], order)
    out = function(pts, iset)
    jets = out if isinstance(out, (list, tuple)) else [out]
    best = 0.0
    for j in jets:
        if not isinstance(j, Jet):
            raise TypeError("function must return Jets")
        for idx in iset:
            best = max(best, float(np.max(np.abs(j.partial(idx)))))
    return best
