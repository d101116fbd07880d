"""Exception types shared across the package."""


class WeakampError(ValueError):
    """Base class for domain errors raised by this package."""


class SingularPostselectionError(WeakampError):
    """Post-selection overlap too small for a meaningful conditioned value.

    Raised instead of returning a huge float: every downstream first-order
    expression is invalid in this regime, so the caller must decide how to
    proceed (skip the point, widen phi, ...).
    """


class GridCoverageError(WeakampError):
    """A sampling grid does not span enough of the relevant distribution."""


class GridResolutionError(WeakampError):
    """A sampling grid is too coarse to resolve the requested feature."""


class GridMismatchError(WeakampError):
    """Two profiles that must share a grid were built on different grids."""


class CalibrationRangeError(WeakampError):
    """Requested phase lies outside the calibrated readout window."""


class ConfigError(WeakampError):
    """Configuration document is malformed, out of range, or has unknown keys."""
