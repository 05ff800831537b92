"""Exception types shared across the package."""


class CosetflowError(Exception):
    """Base class for every error this package raises deliberately."""


class NonHermitianInput(CosetflowError):
    """A matrix that must be Hermitian failed the Hermiticity check."""


class NotPositiveDefinite(CosetflowError):
    """A matrix that must be positive definite has a non-positive eigenvalue."""


class DimensionMismatch(CosetflowError):
    """Matrix blocks or coordinates with incompatible shapes were combined."""


class IntegrationFailure(CosetflowError):
    """A trajectory could not be integrated over the requested window."""


class BaseSingularity(IntegrationFailure):
    """The base coordinate chart degenerated (third m component too small)."""


class SingularityEncountered(IntegrationFailure):
    """The coset coordinate blew up during direct z integration."""


class StepSizeUnderflow(IntegrationFailure):
    """The adaptive integrator could not meet the tolerance with a finite step."""


class NormalizationDrift(CosetflowError):
    """A state vector that should stay normalized drifted beyond tolerance."""


class OutOfRange(CosetflowError):
    """An argument fell outside its documented domain."""


class ConfigInvalid(CosetflowError):
    """A run configuration is malformed or inconsistent."""


class PathInvalid(ConfigInvalid):
    """An angle-path file could not be parsed into a usable path."""
