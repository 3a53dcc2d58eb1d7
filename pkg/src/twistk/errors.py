"""Exception hierarchy shared by all modules."""


class TwistkError(Exception):
    """Base class for library errors."""


class StructuralError(TwistkError):
    """Shapes, splits or inputs that do not fit together."""


class BoundError(TwistkError):
    """A request reaches past the truncation degree."""


class PreconditionError(TwistkError):
    """An operation was called on data violating its hypotheses."""


class DomainError(TwistkError):
    """Argument outside the domain of a numeric routine."""


class InternalConsistencyError(TwistkError):
    """A result contradicted an invariant that must hold by theory."""


class ContainmentFailure(TwistkError):
    """A twisting map does not preserve the given ideals."""

    def __init__(self, witness, degree: int, message: str = ""):
        self.witness = witness
        self.degree = degree
        super().__init__(message or f"containment fails at {witness} (degree {degree})")


class ParseError(TwistkError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")
