class PolFockError(Exception):
    """Base class for all package errors."""


class DomainError(PolFockError, ValueError):
    """A nuclear coordinate outside the configured model window."""


class TruncationError(PolFockError, ValueError):
    """A displacement too large for the requested Fock truncation."""


class NumericalError(PolFockError, RuntimeError):
    """Eigensolver failure or loss of norm during propagation."""


class ConfigError(PolFockError, ValueError):
    """Invalid scenario configuration. ``path`` names the offending field."""

    def __init__(self, message, path=None):
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)


class OracleError(PolFockError, RuntimeError):
    """A reference computation failed to reach its accuracy target."""
