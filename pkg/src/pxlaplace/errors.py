"""Exception hierarchy shared across the package."""


class PxLaplaceError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(PxLaplaceError, ValueError):
    pass


class MeshError(PxLaplaceError, ValueError):
    def __init__(self, message, element=None):
        super().__init__(message)
        self.element = element


class ExpressionSyntaxError(PxLaplaceError, ValueError):
    """Raised by the expression parser; ``offset`` is the byte offset of the problem."""

    def __init__(self, message, offset, source=""):
        self.message = message
        self.offset = offset
        self.source = source
        super().__init__(f"{message} at offset {offset}")


class EvaluationError(PxLaplaceError, ArithmeticError):
    pass


class ProblemDefinitionError(PxLaplaceError, ValueError):
    def __init__(self, message, element=None):
        super().__init__(message)
        self.element = element


class NumericalError(PxLaplaceError, ArithmeticError):
    """A numerical kernel failed (breakdown, non-finite values, iteration cap).

    ``residual`` carries the last achieved relative residual when known and
    ``iteration`` the outer iteration index when raised from the DC loop.
    """

    def __init__(self, message, residual=None, iteration=None, element=None):
        super().__init__(message)
        self.residual = residual
        self.iteration = iteration
        self.element = element
