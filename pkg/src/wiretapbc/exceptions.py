"""Exception types raised across the package."""


class WiretapError(Exception):
    """Base class for every error raised by wiretapbc."""


class InvalidInputError(WiretapError, ValueError):
    """Malformed arguments: wrong shapes, non-finite entries, violated constraints."""


class DomainError(WiretapError, ValueError):
    """A mathematical precondition fails (matrix not PD, singular gain, ...)."""


class UnsupportedCaseError(WiretapError):
    """The requested quantity is undefined for this case (e.g. mu == 1)."""


class DegenerateEnhancementError(WiretapError):
    """N3' - N1' is singular, so the proportionality matrix is not unique."""


class NonStationaryError(WiretapError):
    """The KKT system cannot be satisfied at the given split.

    Carries the residuals so callers can log the diagnostic.
    """

    def __init__(self, message, residuals, multipliers=None):
        super().__init__(message)
        self.residuals = residuals
        self.multipliers = multipliers


class ConfigError(WiretapError, ValueError):
    """Run configuration violates the JSON schema; ``path`` locates the field."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
