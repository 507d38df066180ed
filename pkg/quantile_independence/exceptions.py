from __future__ import annotations

from typing import Any


class QuantileIndependenceError(Exception):
    """Base class for all errors raised by this package.

    ``context`` holds the offending values so that callers (the CLI in particular)
    can report them without parsing the message.
    """

    def __init__(self, message: str, **context: Any) -> None:
        super().__init__(message)
        self.message = message
        self.context = context

    def __str__(self) -> str:
        if not self.context:
            return self.message
        details = ", ".join(f"{key}={value!r}" for key, value in self.context.items())
        return f"{self.message} ({details})"


class OutOfRangeError(QuantileIndependenceError, ValueError):  # noqa: D101
    pass


class ArgumentError(QuantileIndependenceError, ValueError):  # noqa: D101
    pass


class DegeneracyError(QuantileIndependenceError, ValueError):
    """Observed data do not satisfy the overlap condition ``p_x > 0`` for both arms."""


class ConstructionError(QuantileIndependenceError, ValueError):  # noqa: D101
    pass


class ConsistencyError(QuantileIndependenceError, ValueError):
    """A propensity score does not average to the declared treatment probability."""


class EvaluationError(QuantileIndependenceError, ArithmeticError):  # noqa: D101
    pass


class InfeasibleProgramError(QuantileIndependenceError):  # noqa: D101
    pass


class InputFormatError(QuantileIndependenceError, ValueError):
    """Malformed CSV, JSON or configuration input.

    ``line`` is the 1-based line number of the offending record when known.
    """

    def __init__(self, message: str, line: int | None = None, **context: Any) -> None:
        if line is not None:
            context["line"] = line
        super().__init__(message, **context)
        self.line = line


class AnchorMismatchError(QuantileIndependenceError):
    """A reproduced identified set does not match its expected anchor value."""
