"""Exception types raised across the library.

Every error the library raises deliberately derives from :class:`LltLabError`
so callers (and the CLI) can distinguish library failures from programming
errors.  Config parsing failures carry a machine-readable violation list.
"""

from __future__ import annotations


class LltLabError(Exception):
    """Base class for all library errors."""


# -- lattice construction -----------------------------------------------------
class NegativeMass(LltLabError):
    """A probability mass table contains a negative entry."""


class NotNormalized(LltLabError):
    """Total mass deviates from 1 by more than the construction tolerance."""


class EmptySupport(LltLabError):
    """A mass table with no entries (or all-zero entries) was supplied."""


class NonpositiveScale(LltLabError):
    """An affine rescaling with a non-positive scale component."""


class SupportOverflow(LltLabError):
    """An operation would materialize more lattice points than the cap allows."""


# -- model builders -----------------------------------------------------------
class ZeroVariance(LltLabError):
    """A base law is degenerate (single support point)."""


class RegimeViolation(LltLabError):
    """Coupling parameters outside the high-temperature regime."""


class SingularMatrix(LltLabError):
    """A matrix required to be invertible / positive definite is not."""


# -- reference measures -------------------------------------------------------
class DimensionUnsupported(LltLabError):
    """The requested operation is not implemented for this dimension."""


class ToleranceUnreachable(LltLabError):
    """Adaptive quadrature could not reach the requested tolerance."""


class ZeroDensityOnBox(LltLabError):
    """The density vanishes somewhere on a box where positivity is required."""


# -- statistics ---------------------------------------------------------------
class EmptyRegion(LltLabError):
    """A restriction region contains no grid points."""


class DensityNotBoundedBelow(LltLabError):
    """The reference density has no positive lower bound on the target box."""


class MinLengthExceedsBox(LltLabError):
    """A minimal-length vector larger than the enclosing box edge length."""


class NotEnoughGridPoints(LltLabError):
    """Too few consecutive grid points to build the requested interval."""


class BoundDegenerate(LltLabError):
    """floor(m/w) <= 2, the closed-form bound is undefined."""


# -- study configs ------------------------------------------------------------
class ConfigInvalid(LltLabError):
    """A study config failed validation.

    Attributes
    ----------
    violations : list[tuple[str, str]]
        All detected problems as (field path, message) pairs, not just the
        first one.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(f"{path}: {msg}" for path, msg in self.violations)
        super().__init__(f"invalid config: {lines}")
