"""Exception hierarchy shared by all subpackages."""


class MbootError(Exception):
    """Base class for errors raised by :mod:`mboot`."""


class InvalidArgumentError(MbootError, ValueError):
    """An argument has the wrong shape, range or symmetry."""


class NumericDomainError(MbootError, ArithmeticError):
    """A quantity left the domain where it is defined (e.g. an indefinite metric)."""


class ConvergenceError(MbootError, ArithmeticError):
    """An iterative solver did not converge.

    The last iterate is kept on ``last`` so callers can inspect it.
    """

    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last


class DegenerateInputError(MbootError, ValueError):
    """The input has no unique answer, e.g. two equally near foot points."""
