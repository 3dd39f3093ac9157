"""Exception types shared across the package."""


class WavgError(Exception):
    """Base class for all package errors."""


class InputError(WavgError, ValueError):
    """Malformed user input (sequence specs, game files, lasso words)."""


class SequenceFormatError(InputError):
    """A sequence spec string or constructor argument is malformed."""


class GameFormatError(InputError):
    """A game description violates the file grammar or graph invariants."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SequenceAdmissionError(InputError):
    """A structurally valid sequence fails admission (zero partial sum etc.)."""

    def __init__(self, message: str, violation_index: int | None = None):
        super().__init__(message)
        self.violation_index = violation_index


class UnsupportedSequenceError(WavgError):
    """The requested exact evaluation is outside the supported class."""


class BudgetExceededError(WavgError):
    """An enumeration or search exceeded its configured budget."""
