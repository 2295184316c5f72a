"""Exception types shared across the package."""


class FloqrylovError(Exception):
    """Base class for package-specific errors."""


class UsageError(FloqrylovError, ValueError):
    """A caller violated an operation's preconditions."""


class ValidationError(FloqrylovError, ValueError):
    """Constructed or loaded data failed an invariant check."""


class ParseError(FloqrylovError, ValueError):
    """A file could not be parsed into the expected structure."""


class ConfigError(FloqrylovError, ValueError):
    """Invalid command-line or config-file input."""


class NumericalError(FloqrylovError, RuntimeError):
    """A numerical routine failed to produce a trustworthy result."""


class NumericalDegeneracyError(NumericalError):
    """Orthogonality was lost beyond tolerance at some iteration step."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step
