"""Exception types shared across the package."""


class HalflearnError(Exception):
    """Base class for all package-specific errors."""


class ZeroVectorError(HalflearnError):
    """Input vector has (numerically) zero Euclidean norm."""


class DimensionMismatchError(HalflearnError):
    """Operands disagree on the ambient dimension."""


class SizeLimitError(HalflearnError):
    """An enumeration or grid would exceed its configured cap."""


class OddDegreeError(HalflearnError):
    """Moment degree must be an even integer >= 2."""


class InsufficientBandSamplesError(HalflearnError):
    """Too few samples fall inside the band to run conditional checks."""


class ThetaOutOfRangeError(HalflearnError):
    """Strip width theta must lie in (0, pi/4]."""


class NotSymmetricError(HalflearnError):
    """Matrix is not symmetric within tolerance."""


class NoConvergenceError(HalflearnError):
    """Iterative routine exhausted its iteration budget."""


class EmptyDatasetError(HalflearnError):
    """Dataset is empty or smaller than the configured batch."""


class NonPositiveStepError(HalflearnError):
    """Step size must be strictly positive."""


class EmptyCandidateListError(HalflearnError):
    """No candidate direction survived to selection."""


class ModeMismatchError(HalflearnError):
    """Learner mode is incompatible with the supplied target marginal."""


class WrongDimensionError(HalflearnError):
    """Operation requires a specific ambient dimension (e.g. the exact 2-D sweep)."""
