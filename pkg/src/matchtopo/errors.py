"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class ResourceError(RuntimeError):
    """A configured size cap (edges or faces) would be exceeded."""


class StructureError(ValueError):
    """A matching pair does not join incident faces of the poset."""


class PreconditionError(ValueError):
    """A composition precondition (e.g. block order) is violated."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ClaimViolation(AssertionError):
    """A structural claim the constructions rely on failed on a concrete face."""


class ParseError(ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
