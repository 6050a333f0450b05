"""Exception types shared across the package.

Every exception carries a short ``category`` string that the command-line
front end reports on stderr.
"""

__all__ = [
    "DrivenXYError",
    "ConfigError",
    "ResourceError",
    "NumericError",
    "UnsupportedScenarioError",
]


class DrivenXYError(Exception):
    category = "error"


class ConfigError(DrivenXYError, ValueError):
    """Invalid configuration. ``errors`` holds every diagnostic found."""

    category = "config"

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class ResourceError(DrivenXYError, RuntimeError):
    """A requested system size exceeds a configured memory cap."""

    category = "resource"

    def __init__(self, message, required_bytes=None):
        self.required_bytes = required_bytes
        super().__init__(message)


class NumericError(DrivenXYError, ArithmeticError):
    category = "numeric"


class UnsupportedScenarioError(DrivenXYError, ValueError):
    category = "unsupported"
