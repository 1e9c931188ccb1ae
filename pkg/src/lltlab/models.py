"""Exact construction of the two lattice model families.

* Standardized i.i.d. lattice sums: the law of one summand lives on
  ``offset + span * Z``; the n-fold sum is computed by direct convolution with
  binary exponentiation (O(log n) convolution rounds, each renormalized), then
  standardized by an affine map derived from the exact moments.
* Multi-group Curie-Weiss magnetization vectors: ±1 spins in d groups with a
  quadratic interaction.  The law of the rescaled per-group magnetization is
  computed exactly by enumerating per-group up-spin counts; weights combine
  log-binomial multiplicities with the interaction energy and are normalized
  by log-sum-exp.

Everything here is deterministic and exact up to floating point; there is no
sampling anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import (EmptySupport, NegativeMass, NotNormalized,
                     RegimeViolation, SingularMatrix, SupportOverflow,
                     ZeroVariance)
from .grids import GridSpec, LatticePmf

DEFAULT_SUM_SUPPORT_CAP = 10_000_000
DEFAULT_CW_SUPPORT_CAP = 100_000_000


@dataclass(frozen=True)
class BaseLattice1D:
    """Law of a single lattice summand on ``offset + span * Z``.

    ``masses[k]`` is the probability of the point ``offset + span * (index_lo + k)``.
    The span is assumed to be the maximal one for the support; this is not
    verified here and callers of local-law statistics must supply it correctly.
    """

    offset: float
    span: float
    masses: np.ndarray
    index_lo: int = 0

    def __post_init__(self):
        if self.span <= 0:
            raise ValueError("span must be > 0")
        m = np.asarray(self.masses, dtype=float)
        if m.ndim != 1 or m.size == 0 or not np.any(m > 0):
            raise EmptySupport("base law needs a nonempty 1-d mass vector")
        if np.any(m < 0):
            raise NegativeMass("base law has a negative mass")
        total = float(np.sum(m, dtype=np.longdouble))
        if abs(total - 1.0) > 1e-9:
            raise NotNormalized(f"base masses sum to {total!r}")
        object.__setattr__(self, "masses", m / total)
        self.masses.flags.writeable = False
        object.__setattr__(self, "offset", float(self.offset))
        object.__setattr__(self, "span", float(self.span))
        object.__setattr__(self, "index_lo", int(self.index_lo))

    def support(self) -> np.ndarray:
        idx = self.index_lo + np.arange(self.masses.size)
        return self.offset + self.span * idx


def fair_coin() -> BaseLattice1D:
    """The ±1 fair coin (span 2)."""
    return BaseLattice1D(offset=-1.0, span=2.0, masses=np.array([0.5, 0.5]))


def moments(base: BaseLattice1D) -> tuple[float, float]:
    """Exact mean and variance of the base law.

    Raises ZeroVariance for a degenerate (single-point) law.
    """
    x = base.support()
    mean = float(np.dot(base.masses, x))
    var = float(np.dot(base.masses, (x - mean) ** 2))
    if var <= 0.0:
        raise ZeroVariance("base law is degenerate (variance 0)")
    return mean, var


def iid_sum_pmf(base: BaseLattice1D, n: int,
                support_cap: int = DEFAULT_SUM_SUPPORT_CAP) -> LatticePmf:
    """Exact law of the sum of n i.i.d. copies, on ``n*offset + span*Z``.

    Binary exponentiation keeps the number of direct convolutions at
    O(log n); each convolution renormalizes so that accumulated drift of the
    total mass stays far below 1e-12.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")

    def convolve(a, b):
        size = a[0].size + b[0].size - 1
        if size > support_cap:
            raise SupportOverflow(
                f"sum support would occupy {size} points (cap {support_cap})")
        c = np.convolve(a[0], b[0])
        c /= np.sum(c, dtype=np.longdouble)
        return c, a[1] + b[1]

    acc = None
    cur = (base.masses, base.index_lo)
    k = n
    while k:
        if k & 1:
            acc = cur if acc is None else convolve(acc, cur)
        k >>= 1
        if k:
            cur = convolve(cur, cur)
    coeffs, idx_lo = acc
    grid = GridSpec([n * base.offset], [base.span])
    return LatticePmf(grid, [idx_lo], coeffs)


def standardized_iid_sum(base: BaseLattice1D, n: int,
                         support_cap: int = DEFAULT_SUM_SUPPORT_CAP) -> LatticePmf:
    """Law of ``(S_n - n*mean) / (std * sqrt(n))``; grid step span/(std*sqrt(n)).

    The grid offset comes from the transformed data, not from a closed-form
    expression, so laws with nonzero mean standardize correctly.
    """
    mean, var = moments(base)
    sn = float(np.sqrt(var * n))
    raw = iid_sum_pmf(base, n, support_cap=support_cap)
    return raw.affine_transform(scale=1.0 / sn, shift=-n * mean / sn)


# ---------------------------------------------------------------------------
# Curie-Weiss
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class CwModel:
    """Multi-group Curie-Weiss specification.

    Exactly one of ``beta`` (homogeneous: every coupling equals beta) or ``J``
    (heterogeneous: symmetric positive definite matrix) must be given.
    ``alpha`` holds the asymptotic group fractions and defaults to
    ``sizes / n``.
    """

    sizes: np.ndarray
    beta: float = None
    J: np.ndarray = None
    alpha: np.ndarray = field(default=None)

    def __post_init__(self):
        sizes = np.asarray(self.sizes, dtype=np.int64)
        if sizes.ndim != 1 or sizes.size == 0 or np.any(sizes < 1):
            raise ValueError("sizes must be positive integers")
        object.__setattr__(self, "sizes", sizes)
        sizes.flags.writeable = False
        if (self.beta is None) == (self.J is None):
            raise ValueError("specify exactly one of beta or J")
        if self.beta is not None:
            if self.beta < 0:
                raise ValueError("beta must be >= 0")
            object.__setattr__(self, "beta", float(self.beta))
        else:
            J = np.atleast_2d(np.asarray(self.J, dtype=float))
            if J.shape != (sizes.size, sizes.size):
                raise ValueError("J must be d x d")
            if not np.allclose(J, J.T, atol=1e-12, rtol=1e-12):
                raise ValueError("J must be symmetric")
            object.__setattr__(self, "J", J)
            J.flags.writeable = False
        if self.alpha is None:
            alpha = sizes / sizes.sum()
        else:
            alpha = np.asarray(self.alpha, dtype=float)
            if alpha.shape != sizes.shape or np.any(alpha < 0) or np.any(alpha > 1):
                raise ValueError("alpha must lie in [0,1]^d")
            if abs(alpha.sum() - 1.0) > 1e-9:
                raise ValueError("alpha must sum to 1")
        object.__setattr__(self, "alpha", alpha)
        alpha.flags.writeable = False

    @property
    def d(self) -> int:
        return self.sizes.size

    @property
    def n(self) -> int:
        return int(self.sizes.sum())

    @property
    def homogeneous(self) -> bool:
        return self.beta is not None

    def coupling_matrix(self) -> np.ndarray:
        if self.homogeneous:
            return np.full((self.d, self.d), self.beta)
        return self.J

    def check_regime(self) -> None:
        """Raise RegimeViolation outside the high-temperature regime."""
        if self.homogeneous:
            if not 0.0 <= self.beta < 1.0:
                raise RegimeViolation(
                    f"homogeneous regime requires beta in [0,1), got {self.beta}")
            return
        try:
            np.linalg.cholesky(self.J)
        except np.linalg.LinAlgError as exc:
            raise RegimeViolation("J is not positive definite") from exc
        A = np.diag(self.alpha)
        M = np.linalg.inv(self.J) - A
        try:
            np.linalg.cholesky(M)
        except np.linalg.LinAlgError as exc:
            raise RegimeViolation(
                "inverse coupling minus alpha-diagonal is not positive definite"
            ) from exc


def cw_magnetization_pmf(model: CwModel, check_regime: bool = True,
                         support_cap: int = DEFAULT_CW_SUPPORT_CAP) -> LatticePmf:
    """Exact law of the per-group magnetization rescaled by 1/sqrt(n_group).

    Enumerates up-spin count vectors k over the product of ``0..n_group``;
    each contributes log C(n_group, k) multiplicity plus the interaction
    energy of the magnetizations ``m = 2k - n_group``, normalized by
    log-sum-exp with the maximum subtracted.  Component ``delta`` of the
    result lives on ``-sqrt(n_d) + (2 / sqrt(n_d)) * Z``.
    """
    if check_regime:
        model.check_regime()
    sizes = model.sizes
    d = model.d
    n = model.n
    shape = tuple(int(s) + 1 for s in sizes)
    count = int(np.prod([float(s) for s in shape]))
    if count > support_cap:
        raise SupportOverflow(
            f"magnetization grid has {count} cells (cap {support_cap})")

    def axis_view(arr, delta):
        view = [1] * d
        view[delta] = arr.size
        return arr.reshape(view)

    J = model.coupling_matrix()
    logw = np.zeros(shape)
    mags = []
    for delta in range(d):
        k = np.arange(shape[delta], dtype=float)
        n_d = float(sizes[delta])
        logc = gammaln(n_d + 1.0) - gammaln(k + 1.0) - gammaln(n_d - k + 1.0)
        logw += axis_view(logc, delta)
        mags.append(2.0 * k - n_d)
    for delta in range(d):
        logw += (J[delta, delta] / (2.0 * n)) * axis_view(mags[delta] ** 2, delta)
        for gamma in range(delta + 1, d):
            logw += (J[delta, gamma] / n) * (
                axis_view(mags[delta], delta) * axis_view(mags[gamma], gamma))
    logw -= logw.max()
    weights = np.exp(logw)
    weights /= np.sum(weights, dtype=np.longdouble)
    grid = GridSpec(offset=-np.sqrt(sizes.astype(float)),
                    step=2.0 / np.sqrt(sizes.astype(float)))
    return LatticePmf(grid, np.zeros(d, dtype=np.int64), weights)


def cw_covariance(model: CwModel, check_regime: bool = True) -> np.ndarray:
    """Limit covariance of the rescaled magnetization in the high-temperature
    regime: ``I + sqrt(A) (beta/(1-beta))_{dxd} sqrt(A)`` (homogeneous) or
    ``I + sqrt(A) (J^-1 - A)^-1 sqrt(A)`` (heterogeneous), A = diag(alpha)."""
    if check_regime:
        model.check_regime()
    d = model.d
    sqrt_a = np.sqrt(model.alpha)
    if model.homogeneous:
        if model.beta >= 1.0:
            raise RegimeViolation("covariance undefined for beta >= 1")
        core = np.full((d, d), model.beta / (1.0 - model.beta))
    else:
        A = np.diag(model.alpha)
        try:
            inv_j = np.linalg.inv(model.J)
            core = np.linalg.inv(inv_j - A)
        except np.linalg.LinAlgError as exc:
            raise SingularMatrix("coupling inversion failed") from exc
    cov = np.eye(d) + np.outer(sqrt_a, sqrt_a) * core
    return 0.5 * (cov + cov.T)


# ---------------------------------------------------------------------------
# JSON model descriptions
# ---------------------------------------------------------------------------
def base_from_config(cfg: dict) -> BaseLattice1D:
    """Build a base law from ``{"offset": v, "span": w, "masses": [...],
    "index_lo": k0}`` (index_lo optional, default 0)."""
    return BaseLattice1D(offset=float(cfg["offset"]), span=float(cfg["span"]),
                         masses=np.asarray(cfg["masses"], dtype=float),
                         index_lo=int(cfg.get("index_lo", 0)))


def cw_from_config(cfg: dict) -> CwModel:
    """Build a Curie-Weiss model from ``{"sizes": [...], "coupling":
    {"beta": b} | {"J": [[...]]}, "alpha": [...]}`` (alpha optional)."""
    coupling = cfg["coupling"]
    kwargs = {}
    if "beta" in coupling:
        kwargs["beta"] = float(coupling["beta"])
    elif "J" in coupling:
        kwargs["J"] = np.asarray(coupling["J"], dtype=float)
    else:
        raise ValueError("coupling must provide 'beta' or 'J'")
    if cfg.get("alpha") is not None:
        kwargs["alpha"] = np.asarray(cfg["alpha"], dtype=float)
    return CwModel(sizes=np.asarray(cfg["sizes"], dtype=np.int64), **kwargs)


def model_pmf_from_config(cfg: dict, check_regime: bool = True) -> LatticePmf:
    """Build the model pmf described by a model config record.

    ``{"family": "iid", "base": {...}, "n": N}`` yields the standardized
    i.i.d. sum; ``{"family": "cw", "sizes": [...], "coupling": {...}}`` yields
    the rescaled Curie-Weiss magnetization law.
    """
    family = cfg.get("family")
    if family == "iid":
        return standardized_iid_sum(base_from_config(cfg["base"]), int(cfg["n"]))
    if family == "cw":
        return cw_magnetization_pmf(cw_from_config(cfg), check_regime=check_regime)
    raise ValueError(f"unknown model family {family!r}")


def sizes_from_fractions(fractions, n: int) -> np.ndarray:
    """Split n spins over groups by fractions, largest remainder first.

    Deterministic: remainder ties go to the lower group index.  Every group
    receives at least one spin.
    """
    fr = np.asarray(fractions, dtype=float)
    if np.any(fr <= 0) or abs(fr.sum() - 1.0) > 1e-9:
        raise ValueError("fractions must be positive and sum to 1")
    raw = fr * n
    sizes = np.floor(raw).astype(np.int64)
    sizes = np.maximum(sizes, 1)
    while sizes.sum() > n:
        k = int(np.argmax(sizes))
        sizes[k] -= 1
    rem = n - int(sizes.sum())
    if rem > 0:
        order = np.lexsort((np.arange(fr.size), -(raw - np.floor(raw))))
        for k in order[:rem]:
            sizes[k] += 1
    if sizes.sum() != n or np.any(sizes < 1):
        raise ValueError(f"cannot split {n} spins over fractions {fractions}")
    return sizes
