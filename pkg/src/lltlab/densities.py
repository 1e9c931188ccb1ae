"""Continuous reference densities: evaluation, box probabilities, extremes.

Two families are provided:

* :class:`GaussianDensity` -- centered N(0, C) for symmetric positive
  definite C.  One-dimensional box probabilities use the normal distribution
  function; d = 2, 3 use adaptive tensorized Gauss-Legendre quadrature with
  per-panel Richardson error control.  Larger d is out of scope.
* :class:`IrwinHallDensity` -- the standardized (mean 0, variance 1) law of a
  sum of n independent Uniform(0,1) variables.  Density and distribution
  function are evaluated through the all-positive B-spline recursion, which is
  numerically stable where the textbook alternating sum is not.

Box boundaries are Lebesgue-null, so inclusivity flags on boxes are ignored
by every operation here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import ndtr

from .errors import (DimensionUnsupported, SingularMatrix,
                     ToleranceUnreachable, ZeroDensityOnBox)
from .grids import Box


@dataclass(frozen=True)
class DensityBounds:
    """Extremes of a density over a closed box, with attaining points."""

    f_min: float
    f_max: float
    box: Box
    at_min: np.ndarray = None
    at_max: np.ndarray = None


class ContinuousDensity:
    """Common interface: evaluation, box probability, extremes over a box."""

    dim: int

    def density_at(self, x) -> float:
        raise NotImplementedError

    def density_many(self, points: np.ndarray) -> np.ndarray:
        """Vectorized evaluation on an (npoints, dim) array."""
        raise NotImplementedError

    def box_prob(self, box: Box, tol: float = 1e-10) -> float:
        raise NotImplementedError

    def density_extremes(self, box: Box) -> DensityBounds:
        raise NotImplementedError

    def axis_stddevs(self) -> np.ndarray:
        """Per-axis standard deviations (used to size default scan windows)."""
        raise NotImplementedError

    def breakpoints(self) -> np.ndarray:
        """Interior knots where the density is not smooth (may be empty)."""
        return np.empty(0)

    def interval_prob_1d(self, lo, hi) -> np.ndarray:
        """Vectorized probability of the 1-d intervals [lo, hi] (dim 1 only)."""
        raise DimensionUnsupported("interval_prob_1d requires dim == 1")


@lru_cache(maxsize=8)
def _leggauss(order: int):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return nodes, weights


class GaussianDensity(ContinuousDensity):
    """Centered multivariate normal with covariance ``cov``."""

    def __init__(self, cov):
        cov = np.atleast_2d(np.asarray(cov, dtype=float))
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
            raise ValueError("covariance must be a square matrix")
        if not np.allclose(cov, cov.T, atol=1e-12, rtol=1e-12):
            raise SingularMatrix("covariance must be symmetric")
        try:
            chol = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as exc:
            raise SingularMatrix("covariance is not positive definite") from exc
        self.cov = cov
        self.cov.flags.writeable = False
        self.dim = cov.shape[0]
        self._chol = chol
        self._precision = np.linalg.inv(cov)
        self._log_norm = (-0.5 * self.dim * np.log(2.0 * np.pi)
                          - np.sum(np.log(np.diag(chol))))

    # -- evaluation ---------------------------------------------------------
    def _quadform(self, points: np.ndarray) -> np.ndarray:
        z = solve_triangular(self._chol, points.T, lower=True)
        return np.sum(z * z, axis=0)

    def density_many(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return np.exp(self._log_norm - 0.5 * self._quadform(points))

    def density_at(self, x) -> float:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return float(self.density_many(x.reshape(1, -1))[0])

    def axis_stddevs(self) -> np.ndarray:
        return np.sqrt(np.diag(self.cov))

    # -- box probability ------------------------------------------------------
    def interval_prob_1d(self, lo, hi) -> np.ndarray:
        if self.dim != 1:
            raise DimensionUnsupported("interval_prob_1d requires dim == 1")
        sigma = float(np.sqrt(self.cov[0, 0]))
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        return np.maximum(ndtr(hi / sigma) - ndtr(lo / sigma), 0.0)

    def box_prob(self, box: Box, tol: float = 1e-10) -> float:
        if box.dim != self.dim:
            raise ValueError("box dimension mismatch")
        tol = max(float(tol), 1e-13)
        if self.dim == 1:
            return float(self.interval_prob_1d(box.lower[0], box.upper[0]))
        if self.dim > 3:
            raise DimensionUnsupported(
                "Gaussian box probabilities implemented for d <= 3 only")
        return _adaptive_panel_integral(self.density_many,
                                        np.asarray(box.lower, float),
                                        np.asarray(box.upper, float), tol)

    # -- extremes --------------------------------------------------------------
    def density_extremes(self, box: Box) -> DensityBounds:
        """Extremes over a closed box.

        The exponent's quadratic form is convex, so its box-constrained
        minimum (the density max) is found by projected coordinate descent
        verified against the KKT conditions, and its maximum (the density
        min) is attained at one of the 2^d vertices.
        """
        if box.dim != self.dim:
            raise ValueError("box dimension mismatch")
        lo = np.asarray(box.lower, float)
        hi = np.asarray(box.upper, float)
        x = np.clip(np.zeros(self.dim), lo, hi)
        M = self._precision
        for _ in range(500):
            delta = 0.0
            for i in range(self.dim):
                other = M[i] @ x - M[i, i] * x[i]
                xi = np.clip(-other / M[i, i], lo[i], hi[i])
                delta = max(delta, abs(xi - x[i]))
                x[i] = xi
            if delta <= 1e-15 * (1.0 + np.max(np.abs(x))):
                break
        grad = 2.0 * (M @ x)
        scale = 1.0 + float(np.max(np.abs(grad)))
        for i in range(self.dim):
            if hi[i] - lo[i] <= 1e-12:
                continue   # pinned coordinate: any gradient is consistent
            interior = lo[i] + 1e-12 < x[i] < hi[i] - 1e-12
            if interior and abs(grad[i]) > 1e-8 * scale:
                raise RuntimeError("coordinate descent failed KKT check")
            if x[i] <= lo[i] + 1e-12 and grad[i] < -1e-8 * scale:
                raise RuntimeError("coordinate descent failed KKT check")
            if x[i] >= hi[i] - 1e-12 and grad[i] > 1e-8 * scale:
                raise RuntimeError("coordinate descent failed KKT check")
        f_max = self.density_at(x)
        at_max = x.copy()

        worst_q = -np.inf
        at_min = None
        for corner in itertools.product(*zip(lo, hi)):
            v = np.asarray(corner, float)
            q = float(v @ M @ v)
            if q > worst_q:
                worst_q = q
                at_min = v
        f_min = self.density_at(at_min)
        return DensityBounds(f_min=f_min, f_max=f_max, box=box,
                             at_min=at_min, at_max=at_max)


def standard_normal() -> GaussianDensity:
    return GaussianDensity([[1.0]])


def _adaptive_panel_integral(eval_many, lo, hi, tol, order: int = 10,
                             max_depth: int = 24) -> float:
    """Adaptive tensor-product Gauss-Legendre integration over a box.

    A panel is accepted when the Richardson comparison of its value against
    the sum over its 2^d bisected children is below the panel's share of the
    tolerance (allocated by volume); otherwise the children are refined.
    """
    nodes, weights = _leggauss(order)
    d = lo.size

    def panel(plo, phi):
        half = 0.5 * (phi - plo)
        mid = 0.5 * (phi + plo)
        axes = [mid[k] + half[k] * nodes for k in range(d)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        vals = eval_many(pts).reshape([order] * d)
        wt = weights
        for _ in range(d - 1):
            vals = vals @ wt
        total = float(vals @ wt)
        return total * float(np.prod(half))

    def refine(plo, phi, coarse, budget, depth):
        mids = 0.5 * (plo + phi)
        children = []
        for corner in range(1 << d):
            clo = plo.copy()
            chi = phi.copy()
            for k in range(d):
                if corner >> k & 1:
                    clo[k] = mids[k]
                else:
                    chi[k] = mids[k]
            children.append((clo, chi, panel(clo, chi)))
        fine = sum(c[2] for c in children)
        if abs(fine - coarse) <= max(budget, 1e-16 * (abs(fine) + 1.0)):
            return fine
        if depth >= max_depth:
            raise ToleranceUnreachable(
                f"quadrature stalled at depth {depth} (budget {budget:g})")
        child_budget = budget / (1 << d)
        return sum(refine(clo, chi, cval, child_budget, depth + 1)
                   for clo, chi, cval in children)

    return max(refine(lo, hi, panel(lo, hi), tol, 0), 0.0)


class IrwinHallDensity(ContinuousDensity):
    """Standardized sum of ``n`` independent Uniform(0,1) variables.

    Support is ``[-sqrt(3 n), sqrt(3 n)]``; the density is the order-n
    cardinal B-spline rescaled to mean 0 and variance 1.
    """

    dim = 1

    def __init__(self, n: int):
        n = int(n)
        if n < 1:
            raise ValueError("n must be >= 1")
        self.n = n
        self.scale = float(np.sqrt(n / 12.0))       # raw std deviation
        self.half_width = float(np.sqrt(3.0 * n))   # standardized support edge

    # -- raw (unstandardized) pieces ---------------------------------------
    @staticmethod
    def _pdf_raw(x: np.ndarray, n: int) -> np.ndarray:
        """Density of the raw sum on [0, n], stable for moderate n."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        if n == 1:
            out[(x >= 0.0) & (x <= 1.0)] = 1.0
            return out
        inside = (x > 0.0) & (x < n)
        if not np.any(inside):
            return out
        xi = x[inside]
        j = np.floor(xi).astype(np.int64)
        B = np.zeros((xi.size, n + 1))
        B[np.arange(xi.size), j] = 1.0
        for k in range(2, n + 1):
            i = np.arange(n - k + 2)
            B[:, :n - k + 2] = ((xi[:, None] - i) * B[:, :n - k + 2]
                                + (i + k - xi[:, None]) * B[:, 1:n - k + 3]) / (k - 1)
        out[inside] = B[:, 0]
        return out

    @classmethod
    def _cdf_raw(cls, x: np.ndarray, n: int) -> np.ndarray:
        """Distribution function of the raw sum via F_n(x) = sum_j f_{n+1}(x - j)."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        out[x >= n] = 1.0
        mid = (x > 0.0) & (x < n)
        if np.any(mid):
            xm = x[mid]
            acc = np.zeros_like(xm)
            for j in range(n + 1):
                acc += cls._pdf_raw(xm - j, n + 1)
            out[mid] = np.clip(acc, 0.0, 1.0)
        return out

    # -- standardized interface ---------------------------------------------
    def _to_raw(self, y: np.ndarray) -> np.ndarray:
        return np.asarray(y, dtype=float) * self.scale + 0.5 * self.n

    def density_many(self, points: np.ndarray) -> np.ndarray:
        y = np.atleast_2d(np.asarray(points, dtype=float))[:, 0]
        return self.scale * self._pdf_raw(self._to_raw(y), self.n)

    def density_at(self, x) -> float:
        y = float(np.atleast_1d(np.asarray(x, dtype=float))[0])
        return float(self.density_many(np.array([[y]]))[0])

    def cdf(self, y) -> np.ndarray:
        return self._cdf_raw(self._to_raw(np.asarray(y, dtype=float)), self.n)

    def axis_stddevs(self) -> np.ndarray:
        return np.array([1.0])

    def breakpoints(self) -> np.ndarray:
        return (np.arange(self.n + 1) - 0.5 * self.n) / self.scale

    def interval_prob_1d(self, lo, hi) -> np.ndarray:
        return np.maximum(self.cdf(hi) - self.cdf(lo), 0.0)

    def box_prob(self, box: Box, tol: float = 1e-10) -> float:
        if box.dim != 1:
            raise ValueError("box dimension mismatch")
        return float(self.interval_prob_1d(box.lower[0], box.upper[0]))

    def density_extremes(self, box: Box) -> DensityBounds:
        """Extremes over a closed 1-d box (the density is symmetric unimodal)."""
        if box.dim != 1:
            raise ValueError("box dimension mismatch")
        lo = float(box.lower[0])
        hi = float(box.upper[0])
        at_max = np.array([min(max(0.0, lo), hi)])
        f_lo = self.density_at(lo)
        f_hi = self.density_at(hi)
        f_max = self.density_at(at_max[0])
        if f_lo <= f_hi:
            f_min, at_min = f_lo, np.array([lo])
        else:
            f_min, at_min = f_hi, np.array([hi])
        if f_min <= 0.0:
            raise ZeroDensityOnBox(
                f"box [{lo}, {hi}] leaves the support "
                f"[-{self.half_width}, {self.half_width}]")
        return DensityBounds(f_min=f_min, f_max=f_max, box=box,
                             at_min=at_min, at_max=at_max)
