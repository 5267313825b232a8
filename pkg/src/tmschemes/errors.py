"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: UsageError -> 2, BudgetError -> 3,
verification failures -> 1 (reported via verdict objects, not exceptions).
"""


class TmError(Exception):
    """Base class for all package errors."""


class UsageError(TmError):
    """Caller violated a precondition (bad argument, malformed input file)."""


class BudgetError(TmError):
    """A configured resource limit (word length, time budget) was exceeded."""


class ParseError(UsageError):
    """Malformed scheme or word file; carries a 1-based line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InternalError(TmError):
    """An invariant the algorithms guarantee was observed to fail."""
