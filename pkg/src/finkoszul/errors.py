"""Exception hierarchy shared by every module of the package."""


class FinKoszulError(Exception):
    """Base class for all errors raised by finkoszul."""


class InvalidInputError(FinKoszulError, ValueError):
    """An argument violates the documented precondition."""


class ValidationError(FinKoszulError):
    """A constructed object failed an exact consistency check.

    ``degree`` and ``witness`` locate the failure when known.
    """

    def __init__(self, message, degree=None, witness=None):
        super().__init__(message)
        self.degree = degree
        self.witness = witness


class BudgetExceededError(FinKoszulError):
    """A requested size is beyond the configured computation budget."""
