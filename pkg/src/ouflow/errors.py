"""Exception types shared across the package."""


class OuflowError(Exception):
    """Base class for package-specific failures."""


class MarginError(OuflowError, ValueError):
    """Input window does not leave enough margin for the requested kernel support."""


class WindowError(OuflowError, ValueError):
    """Requested evaluation points fall outside the usable path window."""


class PoleError(OuflowError, ValueError):
    """Special function evaluated at a pole."""


class AccuracyError(OuflowError, RuntimeError):
    """Requested accuracy could not be certified within the work budget."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class SpectralSymmetryError(OuflowError, RuntimeError):
    """Inverse transform of a real signal produced a non-negligible imaginary part."""


class NonPsdError(OuflowError, RuntimeError):
    """Covariance matrix could not be factorized even with maximum jitter."""

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue
