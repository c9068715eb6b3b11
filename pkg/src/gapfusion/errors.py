"""Exception hierarchy and advisory warnings used across the package."""


class GapFusionError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(GapFusionError, ValueError):
    """An argument violates a documented precondition."""


class ConfigError(GapFusionError, ValueError):
    """A configuration file or scenario setting is malformed or infeasible."""


class DesignViolationError(InvalidInputError):
    """A two-fidelity design is not nested or not internally consistent."""


class DegenerateSampleError(InvalidInputError):
    """A sample has no usable spread (constant, or too few distinct values)."""


class DuplicateTimestampError(InvalidInputError):
    """Two rows of an input series carry the same timestamp."""


class UndefinedReductionError(InvalidInputError):
    """Error reduction is undefined because the reference discrepancy is zero."""


class PairingError(GapFusionError):
    """A station cannot be paired within its cluster."""


class NumericalFailureError(GapFusionError):
    """A linear-algebra step failed even after the escalating jitter policy.

    ``jitter_levels`` records the relative jitter magnitudes that were tried
    before giving up.
    """

    def __init__(self, message, jitter_levels=()):
        super().__init__(message)
        self.jitter_levels = tuple(jitter_levels)


class FitFailureError(NumericalFailureError):
    """Every optimizer start for a model fit failed numerically."""


class ParameterPathologyError(GapFusionError):
    """A rejection sampler's acceptance rate collapsed for these parameters."""


class AdvisoryWarning(UserWarning):
    """Non-fatal advisory about a configuration known to degrade quality."""
