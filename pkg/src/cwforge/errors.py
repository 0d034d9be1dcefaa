"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or out-of-contract input (bad ids, colors, file syntax)."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class InvariantError(AssertionError):
    """An internal consistency check failed; indicates a bug, not bad input."""


class SemigroupTooLarge(RuntimeError):
    """Closure of a generating set exceeded the configured element cap."""
