"""Exception hierarchy for graphforms.

Each exception carries the process exit code the CLI reports for it.
"""


class GraphformsError(Exception):
    """Base class for all graphforms errors."""

    exit_code = 3


class UsageError(GraphformsError, ValueError):
    """Invalid arguments, unknown fixture names or malformed form specs."""

    exit_code = 2


class GraphParseError(UsageError):
    """A graph file could not be parsed."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column or 1})"
        super().__init__(message)


class InvalidGraphError(GraphformsError, ValueError):
    """The graph does not satisfy the precondition of an operation."""

    exit_code = 2


class DegreeMismatchError(UsageError):
    """The degree of a form does not match the edge count of a graph."""


class BudgetExceededError(UsageError):
    """Requested computation lies outside the configured budget."""


class SingularMatrixError(GraphformsError, ArithmeticError):
    """A matrix that must be invertible has zero determinant."""

    exit_code = 3


class PoleError(GraphformsError, ArithmeticError):
    """Evaluation or restriction hit a pole of a rational section."""

    exit_code = 2


class InvariantViolation(GraphformsError, AssertionError):
    """An internal consistency check failed."""

    exit_code = 3


class CheckFailed(GraphformsError):
    """A numeric or point check landed outside its tolerance."""

    exit_code = 1
