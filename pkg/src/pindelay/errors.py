"""Exception hierarchy.

Every error carries the CLI exit code it maps to: 3 for violated
preconditions / domain errors, 4 for numerical failures.
"""


class PinDelayError(Exception):
    exit_code = 3


class DomainError(PinDelayError, ValueError):
    exit_code = 3


class NumericalError(PinDelayError, ArithmeticError):
    exit_code = 4


class GraphFormatError(DomainError):
    pass


class EmptyPinSet(DomainError):
    pass


class NotStronglyConnected(DomainError):
    pass


class NonDiagonalizable(DomainError):
    pass


class ComplexSpectrum(DomainError):
    pass


class NotNormalized(DomainError):
    pass


class AllPinned(DomainError):
    pass


class StepTooLarge(DomainError):
    pass


class DegenerateNorm(NumericalError):
    pass


class NoRootFound(NumericalError):
    pass


class NonConvergence(NumericalError):
    pass


class SingularAtPoint(NumericalError):
    pass
