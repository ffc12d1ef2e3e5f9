"""Exception types shared across the package."""


class InvalidExponentError(ValueError):
    """Lebesgue exponent outside [1, inf]."""


class InvalidOrderError(ValueError):
    """Derivative order must be a positive integer."""


class InvalidScaleError(ValueError):
    """Scaling factor must be positive."""


class TopologyError(ValueError):
    """Operation not defined for this grid topology."""


class GridMismatchError(ValueError):
    """Operands live on incompatible grids."""


class UndefinedAtZeroModeError(ValueError):
    """Negative-order homogeneous norm of data with non-negligible mean."""


class UndefinedRatioError(ValueError):
    """Ratio diagnostics are undefined for identically zero input."""


class OutOfLemmaRangeError(ValueError):
    """Dispersive ratio is only measured for exponents p >= 2."""


class TimeTooSmallError(ValueError):
    """Oscillatory-kernel propagator needs |t| above its minimum time."""


class InvalidIntervalError(ValueError):
    """Time interval contains no trajectory nodes."""


class InvalidSeriesError(ValueError):
    """Diagnostics series unusable for the requested fit."""


class ContractionFailureError(RuntimeError):
    """Remainder fixed-point iteration failed to contract."""

    def __init__(self, message, diffs=None):
        super().__init__(message)
        self.diffs = list(diffs) if diffs is not None else []


class NumericalBlowupError(RuntimeError):
    """Non-finite values appeared during time integration."""


class BlowupDetectedError(RuntimeError):
    """Remainder L2 norm exceeded the configured ceiling."""


class RescaleFailureError(RuntimeError):
    """Bisection could not bring the data norm into the target window."""
