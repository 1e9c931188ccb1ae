"""Supremum of |mu_n(I)/mu(I) - 1| over sub-boxes with minimal edge lengths.

The supremum over uncountably many intervals reduces to a finite candidate
family per dimension: for a fixed contiguous set of contained grid
coordinates the numerator is constant while the denominator varies with
endpoint placement, so the deviation is extremized at extreme placements.
Per dimension the family therefore holds, for every contiguous index range,

* the minimal admissible window (the closed hull, inflated to the minimal
  length when shorter) slid to both ends of its feasible range plus K interior
  offsets,
* all four tight/extended endpoint pairings, where an extended endpoint stops
  one nudge short of the neighboring excluded grid point (this realizes
  open/half-open boundary choices without symbolic flags), and
* minimal-length windows strictly between consecutive grid points, which
  contain no grid point at all and drive the ratio to zero.

d-dimensional candidates are products of per-dimension candidates.  For
log-concave reference densities the denominator is unimodal along each slide,
so the extreme placements above contain the exact extremizers; the mesh
oracle in the test suite certifies the reduction at small scale.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .densities import ContinuousDensity, DensityBounds
from .errors import (BoundDegenerate, DensityNotBoundedBelow,
                     DimensionUnsupported, MinLengthExceedsBox,
                     NotEnoughGridPoints, SupportOverflow, ZeroDensityOnBox)
from .grids import SNAP_REL, Box, LatticePmf, closed_box

# Endpoint nudge, in units of the grid step: safely beyond the snap tolerance
# so a nudged endpoint never snaps back onto the excluded grid point.
NUDGE_REL = 4.0 * SNAP_REL


@dataclass(frozen=True)
class MinLength:
    """Minimal admissible edge lengths, strictly positive per dimension."""

    m: np.ndarray

    def __post_init__(self):
        m = np.atleast_1d(np.asarray(self.m, dtype=float))
        if np.any(m <= 0):
            raise ValueError("minimal lengths must be > 0")
        object.__setattr__(self, "m", m)
        m.flags.writeable = False


def _min_length_vector(m, d: int) -> np.ndarray:
    if isinstance(m, MinLength):
        v = m.m
    else:
        v = np.atleast_1d(np.asarray(m, dtype=float))
    if v.size == 1 and d > 1:
        v = np.full(d, v[0])
    if v.size != d:
        raise ValueError(f"minimal length must have {d} components")
    if np.any(v <= 0):
        raise ValueError("minimal lengths must be > 0")
    return v


@dataclass(frozen=True)
class SupResult:
    """Outcome of a supremum scan."""

    value: float
    witness: Box
    ratio_at_witness: float
    candidate_count: int


class _AxisCandidates:
    """Per-dimension candidate intervals with resolved grid index ranges."""

    __slots__ = ("lo", "hi", "ilo", "ihi", "length")

    def __init__(self, lo, hi, ilo, ihi):
        self.lo = lo
        self.hi = hi
        self.ilo = ilo
        self.ihi = ihi
        self.length = hi - lo


def _axis_candidates(pmf: LatticePmf, axis: int, a: float, b: float,
                     m: float, offsets: int) -> _AxisCandidates:
    grid = pmf.grid
    v = float(grid.offset[axis])
    w = float(grid.step[axis])
    snap_w = SNAP_REL * w
    nudge = NUDGE_REL * w
    i0, i1 = grid.index_interval(axis, a, b, True, True)
    coords = v + w * np.arange(i0, i1 + 1)
    P = coords.size

    raw: list[tuple[float, float]] = []

    def slide_windows(t_lo, t_hi, length):
        if t_hi < t_lo - snap_w:
            return
        t_hi = max(t_hi, t_lo)
        ts = [t_lo, t_hi]
        for k in range(1, offsets + 1):
            ts.append(t_lo + (t_hi - t_lo) * k / (offsets + 1))
        for t in ts:
            raw.append((t, t + length))

    for i in range(P):
        x_i = coords[i]
        lo_opts = [(x_i, x_i)]
        if i > 0:
            lo_opts.append((coords[i - 1] + nudge, coords[i - 1]))
        elif x_i > a + snap_w:
            lo_opts.append((a, a))
        for j in range(i, P):
            x_j = coords[j]
            hull = x_j - x_i
            length = max(m, hull)
            slide_windows(max(a, x_j - length), min(x_i, b - length), length)
            hi_opts = [(x_j, x_j)]
            if j < P - 1:
                hi_opts.append((coords[j + 1] - nudge, coords[j + 1]))
            elif x_j < b - snap_w:
                hi_opts.append((b, b))
            for lo_val, lo_ideal in lo_opts:
                for hi_val, hi_ideal in hi_opts:
                    if hi_ideal - lo_ideal >= m - snap_w and lo_val >= a - snap_w \
                            and hi_val <= b + snap_w:
                        raw.append((lo_val, hi_val))

    # windows containing no grid point (gaps between neighbors and box edges)
    if P == 0:
        gaps = [(a, b, False, False)]
    else:
        gaps = [(a, coords[0], False, True)]
        for i in range(P - 1):
            gaps.append((coords[i], coords[i + 1], True, True))
        gaps.append((coords[-1], b, True, False))
    for g_lo, g_hi, lo_is_grid, hi_is_grid in gaps:
        lo_min = g_lo + (nudge if lo_is_grid else 0.0)
        hi_max = g_hi - (nudge if hi_is_grid else 0.0)
        if hi_max - lo_min >= m - snap_w:
            slide_windows(lo_min, min(hi_max - m, hi_max), m)

    if not raw:
        raise MinLengthExceedsBox(
            f"no admissible interval of length {m} inside [{a}, {b}] "
            f"along axis {axis}")

    arr = np.asarray(raw, dtype=float)
    lo = np.clip(arr[:, 0], a, b)
    hi = np.clip(arr[:, 1], a, b)
    keys = np.round((np.stack([lo, hi], axis=1) - v) / w / SNAP_REL).astype(np.int64)
    _, keep = np.unique(keys, axis=0, return_index=True)
    keep = np.sort(keep)
    lo = lo[keep]
    hi = hi[keep]

    # resolve contained index ranges (closed endpoints + snap tolerance)
    t_lo = (lo - v) / w
    r_lo = np.round(t_lo)
    ilo = np.where(np.abs(t_lo - r_lo) <= SNAP_REL, r_lo,
                   np.ceil(t_lo)).astype(np.int64)
    t_hi = (hi - v) / w
    r_hi = np.round(t_hi)
    ihi = np.where(np.abs(t_hi - r_hi) <= SNAP_REL, r_hi,
                   np.floor(t_hi)).astype(np.int64)
    order = np.lexsort((hi, lo))
    return _AxisCandidates(lo[order], hi[order], ilo[order], ihi[order])


# Cap on the number of product candidates a single scan may materialize.
MAX_PRODUCT_CANDIDATES = 20_000_000


def _rect_masses(pmf: LatticePmf, axes: list[_AxisCandidates]) -> np.ndarray:
    """mu_n of every product candidate, via prefix-table gathers."""
    d = pmf.dim
    count = int(np.prod([float(a.lo.size) for a in axes]))
    if count > MAX_PRODUCT_CANDIDATES:
        raise SupportOverflow(
            f"candidate family has {count} product boxes (cap "
            f"{MAX_PRODUCT_CANDIDATES}); shrink the box, raise m, or lower "
            f"the offset count")
    los, his = [], []
    for ax in range(d):
        base = int(pmf.index_lo[ax])
        size = pmf.shape[ax]
        lo_loc = np.clip(axes[ax].ilo - base, 0, size)
        hi_loc = np.clip(axes[ax].ihi - base + 1, 0, size)
        hi_loc = np.maximum(hi_loc, lo_loc)
        los.append(lo_loc)
        his.append(hi_loc)
    shape = tuple(a.lo.size for a in axes)
    total = np.zeros(shape, dtype=np.longdouble)
    prefix = pmf._prefix
    for corner in range(1 << d):
        pick = [his[k] if corner >> k & 1 else los[k] for k in range(d)]
        sign = 1.0 if (bin(corner).count("1") - d) % 2 == 0 else -1.0
        total += sign * prefix[np.ix_(*pick)]
    return np.maximum(total.astype(float), 0.0)


def _require_positive_density(density: ContinuousDensity, ab: Box) -> DensityBounds:
    try:
        bounds = density.density_extremes(ab)
    except ZeroDensityOnBox as exc:
        raise DensityNotBoundedBelow(str(exc)) from exc
    if bounds.f_min <= 0.0:
        raise DensityNotBoundedBelow(
            "reference density has no positive lower bound on the box")
    return bounds


def _prepare(pmf, density, ab: Box, m, offsets):
    if ab.dim != pmf.dim or density.dim != pmf.dim:
        raise ValueError("dimension mismatch between pmf, density and box")
    if not ab.is_nondegenerate():
        raise ValueError("enclosing box must be non-degenerate")
    m_vec = _min_length_vector(m, pmf.dim)
    if np.any(m_vec > ab.lengths + SNAP_REL * pmf.grid.step):
        raise MinLengthExceedsBox("minimal length exceeds the box edge length")
    if np.any(m_vec < pmf.grid.step * (1.0 - SNAP_REL)):
        warnings.warn(
            "minimal length below the grid step: the interval statistic "
            "need not converge in this regime", RuntimeWarning, stacklevel=3)
    axes = [_axis_candidates(pmf, ax, float(ab.lower[ax]), float(ab.upper[ax]),
                             float(m_vec[ax]), offsets)
            for ax in range(pmf.dim)]
    return m_vec, axes


def sup_ratio_deviation(pmf: LatticePmf, density: ContinuousDensity, ab: Box,
                        m, offsets: int = 8,
                        box_prob_tol: float = 1e-11) -> SupResult:
    """Supremum of |mu_n(I)/mu(I) - 1| over boxes I in [a,b] with |I| >= m.

    Requires the reference density to be bounded below by a positive constant
    on ``ab``.  For d >= 2 candidates are pruned through the density bounds
    (mu is between f_min and f_max times the volume) before the exact box
    probability is computed, largest potential deviation first.
    """
    bounds = _require_positive_density(density, ab)
    m_vec, axes = _prepare(pmf, density, ab, m, offsets)
    mu_n = _rect_masses(pmf, axes)
    d = pmf.dim

    if d == 1:
        cand = axes[0]
        mu = density.interval_prob_1d(cand.lo, cand.hi)
        dev = np.abs(mu_n / mu - 1.0)
        order = np.lexsort((cand.hi, cand.lo, -dev))
        top = order[0]
        witness = closed_box([cand.lo[top]], [cand.hi[top]])
        return SupResult(value=float(dev[top]), witness=witness,
                         ratio_at_witness=float(mu_n[top] / mu[top]),
                         candidate_count=int(cand.lo.size))

    lengths = axes[0].length
    for ax in range(1, d):
        lengths = np.multiply.outer(lengths, axes[ax].length)
    mu_lb = bounds.f_min * lengths
    mu_ub = bounds.f_max * lengths
    dev_ub = np.maximum(np.abs(mu_n / mu_lb - 1.0),
                        np.abs(mu_n / mu_ub - 1.0)).ravel()
    order = np.argsort(-dev_ub, kind="stable")
    shape = mu_n.shape
    mu_n_flat = mu_n.ravel()

    best = -1.0
    best_box = None
    best_ratio = 0.0
    evaluated = 0
    for flat in order:
        if dev_ub[flat] <= best:
            break
        combo = np.unravel_index(flat, shape)
        lo = [axes[k].lo[combo[k]] for k in range(d)]
        hi = [axes[k].hi[combo[k]] for k in range(d)]
        box = closed_box(lo, hi)
        mu = density.box_prob(box, tol=box_prob_tol)
        evaluated += 1
        ratio = mu_n_flat[flat] / mu
        dev = abs(ratio - 1.0)
        if dev > best:
            best = dev
            best_box = box
            best_ratio = ratio
    return SupResult(value=float(best), witness=best_box,
                     ratio_at_witness=float(best_ratio),
                     candidate_count=evaluated)


def mu_vs_histogram_stat(pmf: LatticePmf, density: ContinuousDensity, ab: Box,
                         m, offsets: int = 8) -> float:
    """Supremum of |mu_n(I)/H(I) - 1| with H the histogram measure.

    Same candidate family as :func:`sup_ratio_deviation`; the histogram
    integral is exact and cheap, so every candidate is evaluated.  Candidates
    where both mu_n and H vanish (possible when the box reaches beyond the
    support cells) carry no information about the ratio and are skipped.
    """
    _require_positive_density(density, ab)
    _, axes = _prepare(pmf, density, ab, m, offsets)
    mu_n = _rect_masses(pmf, axes)
    d = pmf.dim

    mats = []
    for ax in range(d):
        coords = pmf.axis_coords(ax)
        w = pmf.grid.step[ax]
        lo = axes[ax].lo[:, None]
        hi = axes[ax].hi[:, None]
        ov = np.minimum(hi, coords + 0.5 * w) - np.maximum(lo, coords - 0.5 * w)
        mats.append(np.clip(ov, 0.0, w))
    # contract the mass table with one overlap matrix per axis, candidate
    # axes in order: e.g. d=2 is einsum('as,bt,st->ab', M1, M2, masses)
    cand = "abcdefgh"[:d]
    supp = "stuvwxyz"[:d]
    eq = ",".join(c + s for c, s in zip(cand, supp)) + f",{supp}->{cand}"
    h_vals = np.einsum(eq, *mats, pmf.masses) / pmf.width_product

    valid = h_vals > 0.0
    if np.any(~valid & (mu_n > 0.0)):
        raise RuntimeError("positive mass candidate with zero histogram measure")
    if not np.any(valid):
        return 0.0
    dev = np.abs(mu_n[valid] / h_vals[valid] - 1.0)
    return float(np.max(dev))


def counterexample_interval(pmf: LatticePmf, density: ContinuousDensity,
                            ab: Box, l: int, dim_star: int = 0,
                            box_prob_tol: float = 1e-11):
    """The sharpness interval: open between grid points in one dimension.

    In dimension ``dim_star`` the interval is the open span of ``l + 1``
    consecutive grid coordinates chosen nearest the density's maximum over
    the box, so exactly ``l - 1`` interior grid coordinates carry mass while
    the integral extends over ``l`` cells.  Every other dimension takes the
    largest cell-aligned (half-open) union of full cells inside the box.
    Returns the box and mu_n / mu over it.
    """
    l = int(l)
    if l < 2:
        raise ValueError("l must be >= 2")
    d = pmf.dim
    if not 0 <= dim_star < d:
        raise ValueError("dim_star out of range")
    bounds = _require_positive_density(density, ab)
    peak = np.asarray(bounds.at_max, dtype=float)

    grid = pmf.grid
    lower = np.empty(d)
    upper = np.empty(d)
    lo_inc = np.zeros(d, dtype=bool)
    hi_inc = np.zeros(d, dtype=bool)
    for ax in range(d):
        a, b = float(ab.lower[ax]), float(ab.upper[ax])
        v = float(grid.offset[ax])
        w = float(grid.step[ax])
        if ax == dim_star:
            i0, i1 = grid.index_interval(ax, a, b, True, True)
            count = i1 - i0 + 1
            if count < l + 1:
                raise NotEnoughGridPoints(
                    f"need {l + 1} grid points in [{a}, {b}] along axis {ax}, "
                    f"found {count}")
            # run start minimizing distance of the run center to the peak
            centers = v + w * (np.arange(i0, i1 - l + 1) + l / 2.0)
            s = i0 + int(np.argmin(np.abs(centers - peak[ax])))
            lower[ax] = v + w * s
            upper[ax] = v + w * (s + l)
        else:
            # largest run of cells fully inside [a, b]
            first = math.ceil((a + w / 2.0 - v) / w - SNAP_REL)
            last = math.floor((b - w / 2.0 - v) / w + SNAP_REL)
            if last < first:
                raise NotEnoughGridPoints(
                    f"no full grid cell inside [{a}, {b}] along axis {ax}")
            lower[ax] = v + w * first - w / 2.0
            upper[ax] = v + w * last + w / 2.0
            hi_inc[ax] = True
    box = Box(lower, upper, lo_inc, hi_inc)
    ratio = pmf.box_mass(box) / density.box_prob(box, tol=box_prob_tol)
    return box, float(ratio)


def theoretical_step3_bound(bounds: DensityBounds, m, w, d: int = None) -> float:
    """Closed-form upper bound on the histogram-ratio supremum.

    Evaluates ``sum_delta 4 * f_max * 4^(d-1) / (f_min * (floor(m/w) - 2))``
    exactly as printed; requires ``floor(m_delta / w_delta) >= 3``.
    """
    m = np.atleast_1d(np.asarray(m, dtype=float))
    w = np.atleast_1d(np.asarray(w, dtype=float))
    if w.size == 1 and m.size > 1:
        w = np.full(m.size, w[0])
    if d is None:
        d = m.size
    if m.size != d or w.size != d:
        raise ValueError("m and w must have d components")
    floors = np.floor(m / w + SNAP_REL)
    if np.any(floors <= 2):
        raise BoundDegenerate(
            f"floor(m/w) = {floors} has a component <= 2; bound undefined")
    terms = 4.0 * (bounds.f_max * 4.0 ** (d - 1)) / (bounds.f_min * (floors - 2.0))
    return float(np.sum(terms))


def _golden_max(fn, lo: float, hi: float, iters: int = 80) -> float:
    """Deterministic golden-section maximizer; returns the argmax abscissa."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d_ = a + inv_phi * (b - a)
    fc, fd = fn(c), fn(d_)
    for _ in range(iters):
        if fc >= fd:
            b, d_, fd = d_, c, fc
            c = b - inv_phi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d_, fd
            d_ = a + inv_phi * (b - a)
            fd = fn(d_)
        if b - a <= 1e-13 * (abs(a) + abs(b) + 1.0):
            break
    return 0.5 * (a + b)


def continuous_sup_ratio(density_n: ContinuousDensity,
                         density_limit: ContinuousDensity, ab: Box,
                         tol: float = 1e-8) -> float:
    """Supremum of |mu_n(I)/mu(I) - 1| over ALL positive-length sub-boxes.

    Both measures are absolutely continuous, so the box ratio is an
    f-weighted average of the pointwise ratio f_n/f; the supremum therefore
    equals ``max(sup f_n/f - 1, 1 - inf f_n/f)`` over the box.  The pointwise
    extremes are located on a seeded grid (including both densities'
    breakpoints) and sharpened by golden-section refinement.  Univariate only.
    """
    if density_n.dim != 1 or density_limit.dim != 1 or ab.dim != 1:
        raise DimensionUnsupported(
            "continuous_sup_ratio is implemented for dimension 1")
    _require_positive_density(density_limit, ab)
    a, b = float(ab.lower[0]), float(ab.upper[0])

    def ratio(x):
        pts = np.atleast_1d(np.asarray(x, dtype=float)).reshape(-1, 1)
        return (density_n.density_many(pts)
                / density_limit.density_many(pts))

    seeds = {a, b}
    for dens in (density_n, density_limit):
        for knot in np.atleast_1d(dens.breakpoints()):
            if a < knot < b:
                seeds.add(float(knot))
    grid = np.unique(np.concatenate([np.linspace(a, b, 513),
                                     np.fromiter(seeds, dtype=float)]))
    vals = ratio(grid)

    candidates = [grid[0], grid[-1]]
    interior = np.arange(1, grid.size - 1)
    for i in interior[(vals[1:-1] >= vals[:-2]) & (vals[1:-1] >= vals[2:])]:
        candidates.append(_golden_max(lambda x: float(ratio(x)[0]),
                                      grid[i - 1], grid[i + 1]))
    for i in interior[(vals[1:-1] <= vals[:-2]) & (vals[1:-1] <= vals[2:])]:
        candidates.append(_golden_max(lambda x: -float(ratio(x)[0]),
                                      grid[i - 1], grid[i + 1]))
    r_cand = ratio(np.asarray(candidates))
    r_max = max(float(np.max(r_cand)), float(np.max(vals)))
    r_min = min(float(np.min(r_cand)), float(np.min(vals)))
    return max(r_max - 1.0, 1.0 - r_min, 0.0)
