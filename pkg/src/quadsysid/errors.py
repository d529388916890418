"""Exception types raised across the identification toolkit."""


class SysIdError(Exception):
    """Base class for all toolkit errors."""


# --- log parsing ---

class MagicMismatch(SysIdError):
    """Input is not a ULog file (bad magic bytes)."""


class TruncatedMessage(SysIdError):
    """ULog file ends in the middle of a record."""


class UnsupportedVersion(SysIdError):
    """ULog header declares a version this reader does not handle."""


class MissingColumn(SysIdError):
    """CSV is missing a column named in the channel mapping."""


class NonNumericCell(SysIdError):
    """CSV cell could not be parsed as a number."""


# --- resampling / dataset handling ---

class EmptyOverlap(SysIdError):
    """Mapped channels share no common time window."""


class DegenerateChannel(SysIdError):
    """Channel has too few samples to interpolate."""


class UnknownLabel(SysIdError):
    """Requested segment label does not exist in the dataset."""


# --- least squares ---

class ShapeMismatch(SysIdError):
    """Stacked blocks disagree in shape."""


class RankDeficient(SysIdError):
    """Regression matrix is numerically rank deficient."""


class NonFiniteObjective(SysIdError):
    """Sweep objective returned NaN or infinity at a candidate."""


# --- model fitting ---

class NonPositiveInput(SysIdError):
    """A strictly-positive quantity (time constant, dt, inertia) was not."""


class LengthMismatch(SysIdError):
    """Series passed to a system builder differ in length."""


class TooShort(SysIdError):
    """Series is too short for the requested operation."""


class InsufficientExcitation(SysIdError):
    """Regressor carries no signal; the maneuver did not excite this axis."""


class NoRealRoot(SysIdError):
    """Thrust curve never reaches the requested thrust on [0, 1]."""


# --- simulation ---

class UnstableStep(SysIdError):
    """Integration produced a non-finite state component."""


# --- reporting / service ---

class SeriesUnavailable(SysIdError):
    """Requested plot series is not present in the report."""


class PipelineError(SysIdError):
    """Wraps a module error with the pipeline stage it occurred in."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
