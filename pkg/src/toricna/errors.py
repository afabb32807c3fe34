"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class ToricError(Exception):
    exit_code = 1


class InputError(ToricError, ValueError):
    """Malformed or inconsistent user input."""
    exit_code = 2


class DomainError(ToricError, ValueError):
    """Input is well formed but outside the mathematical domain of an operation."""
    exit_code = 3


class ConsistencyError(ToricError, RuntimeError):
    """Two independent computations of the same quantity disagree."""
    exit_code = 4


class EmptyPolytopeError(InputError):
    pass


class DimensionMismatchError(InputError):
    pass


class InfeasibleError(DomainError):
    pass


class UnboundedError(DomainError):
    pass


class NotConvexError(DomainError):
    pass


class NotSemipositiveError(DomainError):
    pass


class NotAnticanonicalError(DomainError):
    pass


class NonSmoothConeError(DomainError):
    pass


class IntegralityError(DomainError):
    pass


class QuadratureError(DomainError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class EntropyMismatchError(ConsistencyError):
    def __init__(self, valuative, intersection):
        super().__init__("entropy mismatch: valuative=%s intersection=%s" % (valuative, intersection))
        self.valuative = valuative
        self.intersection = intersection
