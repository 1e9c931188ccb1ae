"""Histogram smoothing of a lattice pmf and pointwise local-law statistics.

The histogram spreads the mass of each grid point over its surrounding
half-open cell ``(y - w/2, y + w/2]`` (lower edge exclusive, upper edge
inclusive, per dimension), giving a piecewise-constant density whose integral
equals the pmf's total mass.  The pointwise statistic compares rescaled point
masses against a reference density over grid points; the cell-wise statistic
bounds the relative histogram error over a box exactly, using per-piece
density extremes instead of sampling.
"""

from __future__ import annotations

import itertools
import math
from typing import NamedTuple

import numpy as np

from .densities import ContinuousDensity
from .errors import EmptyRegion, ZeroDensityOnBox
from .grids import SNAP_REL, Box, LatticePmf


class HistogramDensity:
    """Piecewise-constant density with height mass/w̄ on each grid cell."""

    def __init__(self, pmf: LatticePmf):
        self.pmf = pmf

    def cell_index(self, x) -> np.ndarray:
        """Index of the half-open cell containing x, per dimension.

        The point ``y + w/2`` belongs to the cell of ``y`` (upper edge
        inclusive); snap tolerance resolves floating-point ties at cell
        boundaries in favor of the lower cell, which is exactly the half-open
        convention.
        """
        grid = self.pmf.grid
        t = (np.atleast_1d(np.asarray(x, dtype=float)) - grid.offset) / grid.step
        shifted = t - 0.5
        nearest = np.round(shifted)
        idx = np.where(np.abs(shifted - nearest) <= SNAP_REL,
                       nearest, np.ceil(shifted))
        return idx.astype(np.int64)

    def at(self, x) -> float:
        """Histogram value h(x)."""
        return self.pmf.mass_at_index(self.cell_index(x)) / self.pmf.width_product

    def measure(self, box: Box) -> float:
        """Exact integral of the histogram over a box (no quadrature).

        The integrand is constant on cells, so the integral is the sum over
        support cells of height times overlap volume, which separates into a
        per-dimension contraction.
        """
        if box.dim != self.pmf.dim:
            raise ValueError("box dimension mismatch")
        pmf = self.pmf
        acc = pmf.masses
        for ax in range(pmf.dim):
            coords = pmf.axis_coords(ax)
            w = pmf.grid.step[ax]
            ov = (np.minimum(box.upper[ax], coords + 0.5 * w)
                  - np.maximum(box.lower[ax], coords - 0.5 * w))
            ov = np.clip(ov, 0.0, w)
            acc = np.tensordot(acc, ov, axes=([0], [0]))
        return float(acc) / pmf.width_product


def histogram_at(pmf: LatticePmf, x) -> float:
    return HistogramDensity(pmf).at(x)


def histogram_measure(pmf: LatticePmf, box: Box) -> float:
    return HistogramDensity(pmf).measure(box)


class PointwiseStat(NamedTuple):
    value: float
    argmax: np.ndarray   # grid point coordinates
    index: np.ndarray    # grid index of the argmax


def _scan_index_window(pmf: LatticePmf, density: ContinuousDensity,
                       region: Box | None):
    """Per-dimension index ranges the pointwise statistic scans."""
    if region is not None:
        ranges = pmf.box_index_ranges(region)
        if any(a > b for a, b in ranges):
            raise EmptyRegion("region contains no grid points")
        return ranges
    # Default: occupied range widened to a +/- 6 std-deviation window of
    # zero-mass grid points, where the deviation is |0 - f| = f.
    sd = density.axis_stddevs()
    ranges = []
    for ax in range(pmf.dim):
        v = pmf.grid.offset[ax]
        w = pmf.grid.step[ax]
        lo = min(int(pmf.index_lo[ax]), math.ceil((-6.0 * sd[ax] - v) / w))
        hi = max(int(pmf.index_hi[ax]), math.floor((6.0 * sd[ax] - v) / w))
        ranges.append((lo, hi))
    return ranges


def pointwise_llt_stat(pmf: LatticePmf, density: ContinuousDensity,
                       region: Box | None = None) -> PointwiseStat:
    """sup over grid points of |mass(x)/w̄ - f(x)| with its argmax.

    Without a region the scan covers the occupied support plus a 6-standard-
    deviation window of zero-mass grid points, since the limit statement takes
    the supremum over the whole grid.  Argmax ties break to the
    lexicographically smallest grid index.
    """
    ranges = _scan_index_window(pmf, density, region)
    axes_idx = [np.arange(a, b + 1, dtype=np.int64) for a, b in ranges]
    shape = tuple(len(a) for a in axes_idx)

    table = np.zeros(shape)
    ins_lo = [max(int(pmf.index_lo[k]), ranges[k][0]) for k in range(pmf.dim)]
    ins_hi = [min(int(pmf.index_hi[k]), ranges[k][1]) for k in range(pmf.dim)]
    if all(a <= b for a, b in zip(ins_lo, ins_hi)):
        dst = tuple(slice(ins_lo[k] - ranges[k][0], ins_hi[k] - ranges[k][0] + 1)
                    for k in range(pmf.dim))
        src = tuple(slice(ins_lo[k] - int(pmf.index_lo[k]),
                          ins_hi[k] - int(pmf.index_lo[k]) + 1)
                    for k in range(pmf.dim))
        table[dst] = pmf.masses[src]

    coord_axes = [pmf.grid.offset[k] + pmf.grid.step[k] * axes_idx[k]
                  for k in range(pmf.dim)]
    mesh = np.meshgrid(*coord_axes, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=1)
    f_vals = density.density_many(points).reshape(shape)

    dev = np.abs(table / pmf.width_product - f_vals)
    flat = int(np.argmax(dev))  # first occurrence == lexicographically smallest
    local = np.unravel_index(flat, shape)
    index = np.array([axes_idx[k][local[k]] for k in range(pmf.dim)])
    return PointwiseStat(value=float(dev.ravel()[flat]),
                         argmax=pmf.grid.point(index), index=index)


def _piece_list_1d(pmf: LatticePmf, axis: int, lo: float, hi: float):
    """Cells whose half-open extent meets [lo, hi], with clipped pieces.

    A cell whose upper edge coincides with ``lo`` still contributes the
    degenerate piece {lo} (the edge belongs to that cell); a cell whose lower
    edge coincides with ``hi`` contributes nothing.
    """
    v = pmf.grid.offset[axis]
    w = pmf.grid.step[axis]
    snap = SNAP_REL * w
    first = math.ceil((lo - v) / w - 0.5 - SNAP_REL)
    last = math.floor((hi - v) / w + 0.5 + SNAP_REL)
    pieces = []
    for i in range(first, last + 1):
        y = v + w * i
        c_lo, c_hi = y - w / 2.0, y + w / 2.0
        if c_hi < lo - snap:        # cell ends before the box
            continue
        if c_lo >= hi - snap:       # cell's open lower edge at/after box top
            continue
        p_lo = max(lo, c_lo)
        p_hi = max(p_lo, min(hi, c_hi))
        pieces.append((i, p_lo, p_hi))
    return pieces


class CellwiseStat(NamedTuple):
    value: float
    argmax: np.ndarray


def step1_stat(pmf: LatticePmf, density: ContinuousDensity,
               box: Box) -> CellwiseStat:
    """sup over x in the box of |h(x)/f(x) - 1|, computed exactly.

    Within each intersection of a grid cell with the box, h is a constant and
    the ratio is extremized at the density's extremes over the piece, so the
    supremum is the max over pieces of max(|h/f_min - 1|, |h/f_max - 1|).
    Requires f > 0 on the box.
    """
    if box.dim != pmf.dim:
        raise ValueError("box dimension mismatch")
    per_axis = [_piece_list_1d(pmf, ax, float(box.lower[ax]), float(box.upper[ax]))
                for ax in range(pmf.dim)]
    if any(len(p) == 0 for p in per_axis):
        raise EmptyRegion("box does not meet any grid cell")
    wbar = pmf.width_product
    best = -1.0
    best_point = None
    for combo in itertools.product(*per_axis):
        index = [c[0] for c in combo]
        piece = Box([c[1] for c in combo], [c[2] for c in combo])
        bounds = density.density_extremes(piece)
        if bounds.f_min <= 0.0:
            raise ZeroDensityOnBox("density vanishes on a piece of the box")
        h = pmf.mass_at_index(index) / wbar
        lo_dev = abs(h / bounds.f_min - 1.0)
        hi_dev = abs(h / bounds.f_max - 1.0)
        val, point = ((lo_dev, bounds.at_min) if lo_dev >= hi_dev
                      else (hi_dev, bounds.at_max))
        if val > best:
            best = val
            best_point = np.asarray(point, dtype=float)
    return CellwiseStat(value=float(best), argmax=best_point)
