"""Exact grid-supported probability measures.

A measure lives on the affine lattice ``offset + step ∘ Z^d`` (componentwise
product).  Masses are stored densely over the occupied index hyper-rectangle
together with a cumulative-sum table, so the mass of any axis-aligned box is
an O(2^d) query.  Whether a real coordinate counts as "on the grid" is decided
with a relative snap tolerance of ``SNAP_REL`` times the step of the dimension;
box endpoints that land on grid points within that tolerance honor the box's
inclusivity flags.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptySupport, NegativeMass, NonpositiveScale, NotNormalized

# Relative snap tolerance: a coordinate within SNAP_REL * step of a grid point
# is treated as that grid point.
SNAP_REL = 1e-9


def _as_vector(x, d=None, dtype=float):
    v = np.atleast_1d(np.asarray(x, dtype=dtype)).copy()
    if v.ndim != 1:
        raise ValueError("expected a scalar or 1-d vector")
    if d is not None and v.size == 1 and d > 1:
        v = np.full(d, v[0], dtype=dtype)
    if d is not None and v.size != d:
        raise ValueError(f"expected length-{d} vector, got length {v.size}")
    return v


@dataclass(frozen=True)
class GridSpec:
    """Affine lattice ``offset + step ∘ Z^d`` with strictly positive steps."""

    offset: np.ndarray
    step: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "offset", _as_vector(self.offset))
        object.__setattr__(self, "step", _as_vector(self.step))
        if self.offset.shape != self.step.shape:
            raise ValueError("offset and step must have equal length")
        if np.any(self.step <= 0):
            raise ValueError("every step component must be > 0")
        self.offset.flags.writeable = False
        self.step.flags.writeable = False

    @property
    def dim(self) -> int:
        return self.offset.size

    @property
    def width_product(self) -> float:
        """Product of the per-dimension steps (cell volume)."""
        return float(np.prod(self.step))

    def point(self, index) -> np.ndarray:
        """Coordinates of the grid point with the given integer index."""
        idx = np.atleast_1d(np.asarray(index, dtype=float))
        return self.offset + self.step * idx

    def snap_index(self, x):
        """Per-dimension nearest index and whether x snaps onto the grid."""
        t = (np.atleast_1d(np.asarray(x, dtype=float)) - self.offset) / self.step
        nearest = np.round(t)
        on_grid = np.abs(t - nearest) <= SNAP_REL
        return nearest.astype(np.int64), on_grid

    def index_interval(self, axis: int, lo: float, hi: float,
                       lo_inclusive: bool = True, hi_inclusive: bool = True):
        """Smallest/largest grid index inside ``[lo, hi]`` along one axis.

        Inclusivity only matters when an endpoint snaps onto a grid point.
        Returns (imin, imax); empty when imin > imax.
        """
        v = self.offset[axis]
        w = self.step[axis]
        tl = (lo - v) / w
        rl = round(tl)
        if abs(tl - rl) <= SNAP_REL:
            imin = int(rl) if lo_inclusive else int(rl) + 1
        else:
            imin = math.ceil(tl)
        th = (hi - v) / w
        rh = round(th)
        if abs(th - rh) <= SNAP_REL:
            imax = int(rh) if hi_inclusive else int(rh) - 1
        else:
            imax = math.floor(th)
        return imin, imax


@dataclass(frozen=True)
class Box:
    """Axis-aligned d-dimensional interval with per-endpoint inclusivity."""

    lower: np.ndarray
    upper: np.ndarray
    lower_inclusive: np.ndarray = field(default=None)
    upper_inclusive: np.ndarray = field(default=None)

    def __post_init__(self):
        lo = _as_vector(self.lower)
        hi = _as_vector(self.upper, d=lo.size)
        li = (np.ones(lo.size, dtype=bool) if self.lower_inclusive is None
              else _as_vector(self.lower_inclusive, d=lo.size, dtype=bool))
        ui = (np.ones(lo.size, dtype=bool) if self.upper_inclusive is None
              else _as_vector(self.upper_inclusive, d=lo.size, dtype=bool))
        if np.any(lo > hi):
            raise ValueError("box lower bound exceeds upper bound")
        for name, v in (("lower", lo), ("upper", hi),
                        ("lower_inclusive", li), ("upper_inclusive", ui)):
            object.__setattr__(self, name, v)
            v.flags.writeable = False

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def lengths(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))

    def is_nondegenerate(self) -> bool:
        return bool(np.all(self.lengths > 0))

    def axis(self, i: int):
        return (float(self.lower[i]), float(self.upper[i]),
                bool(self.lower_inclusive[i]), bool(self.upper_inclusive[i]))

    def intersect_lengths(self, lo, hi) -> np.ndarray:
        """Overlap length per dimension with another closed box [lo, hi]."""
        return np.maximum(
            0.0, np.minimum(self.upper, hi) - np.maximum(self.lower, lo))


def closed_box(lower, upper) -> Box:
    return Box(lower, upper)


def open_box(lower, upper) -> Box:
    d = np.atleast_1d(np.asarray(lower)).size
    return Box(lower, upper, np.zeros(d, bool), np.zeros(d, bool))


class LatticePmf:
    """Probability mass function on a grid, with prefix sums for box queries.

    Immutable after construction; all query methods are pure and safe for
    concurrent readers.  The prefix table is kept in extended precision so
    that rectangle queries reproduce direct summation to ~1e-15 even for
    supports with many points.
    """

    def __init__(self, grid: GridSpec, index_lo, masses: np.ndarray):
        masses = np.asarray(masses, dtype=float)
        if masses.ndim != grid.dim:
            raise ValueError("masses table rank must equal grid dimension")
        self.grid = grid
        self.index_lo = _as_vector(index_lo, d=grid.dim, dtype=np.int64)
        self.index_lo.flags.writeable = False
        self.masses = masses
        self.masses.flags.writeable = False
        prefix = masses.astype(np.longdouble)
        for ax in range(grid.dim):
            prefix = np.cumsum(prefix, axis=ax)
        self._prefix = np.zeros(tuple(s + 1 for s in masses.shape),
                                dtype=np.longdouble)
        self._prefix[(slice(1, None),) * grid.dim] = prefix
        self.total_mass = float(prefix[(-1,) * grid.dim])

    # -- geometry ---------------------------------------------------------
    @property
    def dim(self) -> int:
        return self.grid.dim

    @property
    def shape(self):
        return self.masses.shape

    @property
    def index_hi(self) -> np.ndarray:
        return self.index_lo + np.asarray(self.shape, dtype=np.int64) - 1

    @property
    def width_product(self) -> float:
        return self.grid.width_product

    def support_lower(self) -> np.ndarray:
        """Coordinates of the smallest occupied grid corner."""
        return self.grid.point(self.index_lo)

    def support_upper(self) -> np.ndarray:
        return self.grid.point(self.index_hi)

    def axis_coords(self, axis: int) -> np.ndarray:
        """Coordinates of all occupied grid lines along one axis."""
        idx = np.arange(self.index_lo[axis], self.index_hi[axis] + 1)
        return self.grid.offset[axis] + self.grid.step[axis] * idx

    # -- queries ----------------------------------------------------------
    def mass_at_index(self, index) -> float:
        idx = _as_vector(index, d=self.dim, dtype=np.int64) - self.index_lo
        if np.any(idx < 0) or np.any(idx >= np.asarray(self.shape)):
            return 0.0
        return float(self.masses[tuple(idx)])

    def point_mass(self, x) -> float:
        """Mass at the grid point nearest x, 0 when x is off the grid."""
        nearest, on_grid = self.grid.snap_index(x)
        if not np.all(on_grid):
            return 0.0
        return self.mass_at_index(nearest)

    def index_rect_mass(self, imin, imax) -> float:
        """Total mass over the (clipped) index rectangle [imin, imax]."""
        lo = np.maximum(_as_vector(imin, d=self.dim, dtype=np.int64),
                        self.index_lo) - self.index_lo
        hi = np.minimum(_as_vector(imax, d=self.dim, dtype=np.int64),
                        self.index_hi) - self.index_lo
        if np.any(hi < lo):
            return 0.0
        total = np.longdouble(0.0)
        for corner in range(1 << self.dim):
            pick = [(hi[k] + 1 if corner >> k & 1 else lo[k])
                    for k in range(self.dim)]
            sign = 1 if (bin(corner).count("1") - self.dim) % 2 == 0 else -1
            total += sign * self._prefix[tuple(pick)]
        return max(float(total), 0.0)

    def box_index_ranges(self, box: Box):
        """Per-dimension (imin, imax) of grid indices inside a box."""
        if box.dim != self.dim:
            raise ValueError("box dimension mismatch")
        return [self.grid.index_interval(ax, *box.axis(ax))
                for ax in range(self.dim)]

    def box_mass(self, box: Box) -> float:
        """Sum of masses at grid points inside the box (O(2^d) table reads)."""
        ranges = self.box_index_ranges(box)
        imin = [r[0] for r in ranges]
        imax = [r[1] for r in ranges]
        if any(a > b for a, b in zip(imin, imax)):
            return 0.0
        return self.index_rect_mass(imin, imax)

    def grid_points_in(self, box: Box):
        """Per-dimension count of grid coordinates inside the box.

        Returns ``(counts, ranges)`` where ranges holds the per-dimension
        (imin, imax) index intervals.  For a closed interval with
        ``|I| >= w`` the count is at least ``floor(|I| / w)``.
        """
        ranges = self.box_index_ranges(box)
        counts = np.array([max(0, b - a + 1) for a, b in ranges],
                          dtype=np.int64)
        return counts, ranges

    # -- transforms -------------------------------------------------------
    def affine_transform(self, scale, shift) -> "LatticePmf":
        """Pushforward under x -> scale ∘ x + shift (masses unchanged)."""
        scale = _as_vector(scale, d=self.dim)
        shift = _as_vector(shift, d=self.dim)
        if np.any(scale <= 0):
            raise NonpositiveScale("scale components must be > 0")
        grid = GridSpec(scale * self.grid.offset + shift,
                        scale * self.grid.step)
        return LatticePmf(grid, self.index_lo, self.masses)

    def __repr__(self):
        return (f"LatticePmf(dim={self.dim}, shape={self.shape}, "
                f"step={self.grid.step!r}, total={self.total_mass:.15g})")


def build_pmf(grid: GridSpec, index_lo, masses, mass_tol: float = 1e-9) -> LatticePmf:
    """Construct a :class:`LatticePmf`, validating and renormalizing masses.

    Raises
    ------
    EmptySupport
        masses empty or identically zero.
    NegativeMass
        any entry < 0.
    NotNormalized
        |sum - 1| > mass_tol.
    """
    masses = np.asarray(masses, dtype=float)
    if masses.size == 0 or not np.any(masses > 0):
        raise EmptySupport("mass table is empty")
    if np.any(masses < 0):
        raise NegativeMass("mass table has a negative entry")
    total = float(np.sum(masses, dtype=np.longdouble))
    if abs(total - 1.0) > mass_tol:
        raise NotNormalized(f"masses sum to {total!r}, expected 1 +/- {mass_tol}")
    return LatticePmf(grid, index_lo, masses / total)


# -- serialization -------------------------------------------------------
def metadata_path(path) -> Path:
    return Path(str(path) + ".meta.json")


def write_pmf_csv(pmf: LatticePmf, path, include_zeros: bool = False) -> None:
    """Write ``index_1,...,index_d,mass`` rows plus a JSON metadata sidecar.

    Mass values are written with shortest round-trip float representation,
    so a read-back reproduces them bit-exactly.
    """
    path = Path(path)
    d = pmf.dim
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"index_{k + 1}" for k in range(d)] + ["mass"])
        it = np.ndindex(pmf.shape)
        for local in it:
            m = pmf.masses[local]
            if m == 0.0 and not include_zeros:
                continue
            idx = [int(pmf.index_lo[k] + local[k]) for k in range(d)]
            writer.writerow(idx + [repr(float(m))])
    meta = {
        "dim": d,
        "offset": [float(v) for v in pmf.grid.offset],
        "step": [float(v) for v in pmf.grid.step],
        "index_lo": [int(v) for v in pmf.index_lo],
        "shape": [int(s) for s in pmf.shape],
    }
    metadata_path(path).write_text(json.dumps(meta, indent=1))


def read_pmf_csv(path) -> LatticePmf:
    """Inverse of :func:`write_pmf_csv` (bit-exact on the masses)."""
    path = Path(path)
    meta = json.loads(metadata_path(path).read_text())
    d = int(meta["dim"])
    index_lo = np.asarray(meta["index_lo"], dtype=np.int64)
    masses = np.zeros(tuple(meta["shape"]), dtype=float)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != [f"index_{k + 1}" for k in range(d)] + ["mass"]:
            raise ValueError(f"unexpected header in {path}: {header}")
        for row in reader:
            idx = tuple(int(row[k]) - index_lo[k] for k in range(d))
            masses[idx] = float(row[d])
    grid = GridSpec(np.asarray(meta["offset"], float),
                    np.asarray(meta["step"], float))
    return LatticePmf(grid, index_lo, masses)
