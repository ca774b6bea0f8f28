"""Exception hierarchy shared by all microbeam modules."""


class MicrobeamError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(MicrobeamError):
    """A file could not be parsed (syntax, missing column, bad number)."""


class ValidationError(MicrobeamError):
    """Structurally valid input violates a model invariant."""


class DomainError(MicrobeamError):
    """An argument lies outside the mathematical domain of an operation."""


class NumericalError(MicrobeamError):
    """A computation produced a value outside its physical range."""


class ConvergenceError(MicrobeamError):
    """An iterative solver exhausted its iteration budget.

    The best result obtained so far is attached as ``result`` for
    diagnostics; callers that can tolerate partial output may use it.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class CoverageError(MicrobeamError):
    """Too few experimental points fall inside the model's span."""


class IoError(MicrobeamError):
    """Writing an output artifact failed."""
