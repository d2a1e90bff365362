"""Exception hierarchy; the CLI maps each family to an exit code."""


class RmmError(Exception):
    """Base class for all errors raised by this package."""


class InputFormatError(RmmError, ValueError):
    """Malformed input: bad piece list, gaps/overlaps, unparsable file or preset key."""

    exit_code = 2


class MathDomainError(RmmError, ValueError):
    """Input is well formed but violates a mathematical precondition."""

    exit_code = 1


class GeneratorConditionError(MathDomainError):
    """A generator (or maxmin pair) fails one of its defining conditions."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class UndefinedQuotientError(MathDomainError):
    """Q_C denominator below the threshold."""


class AnchorUndefinedError(MathDomainError):
    """Anchored generator recovery needs u_min > 0."""


class NumericalNonconvergenceError(RmmError, ArithmeticError):
    """Quadrature or root finding did not reach its tolerance."""

    exit_code = 3

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved
