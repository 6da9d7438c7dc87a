"""Exception and warning types raised across the package."""


class SKError(Exception):
    """Base class for all package errors."""


class InvalidGrid(SKError, ValueError):
    pass


class ShapeError(SKError, ValueError):
    pass


class UnsupportedRule(SKError, ValueError):
    pass


class BlowupDetected(SKError, RuntimeError):
    """A non-finite sample appeared during time integration."""

    def __init__(self, message, t=None, interval_index=None):
        super().__init__(message)
        self.t = t
        self.interval_index = interval_index


class InsufficientData(SKError, ValueError):
    pass


class SpaceMismatch(SKError, ValueError):
    pass


class ConfigError(SKError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class FormatError(SKError, ValueError):
    pass


class ResolutionWarning(UserWarning):
    """Trajectory data does not look resolved on the grid."""
