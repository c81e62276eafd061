"""Exception types. Each carries the process exit code the CLI maps it to."""


class HypercolourError(Exception):
    exit_code = 1


class InvalidInput(HypercolourError):
    exit_code = 2


class BudgetExceeded(HypercolourError):
    exit_code = 3


class NumericFailure(HypercolourError):
    exit_code = 4


class VerificationFailure(HypercolourError):
    exit_code = 5


# numerics
class DomainError(InvalidInput):
    pass


class NoSignChange(NumericFailure):
    pass


class MaxIters(NumericFailure):
    pass


class DegenerateLeadingCoefficient(InvalidInput):
    pass


# spin-core / hypergraph oracle
class InvalidParams(InvalidInput):
    pass


class TooLarge(BudgetExceeded):
    pass


class NotRegular(InvalidInput):
    pass


class Indivisible(InvalidInput):
    pass


class NotProper(VerificationFailure):
    pass


# reductions
class NotUncolourable(InvalidInput):
    pass


class EmptyS(VerificationFailure):
    pass


class WrongQ(InvalidInput):
    pass


# phi / recursion / stability
class ZeroInteraction(InvalidInput):
    pass


class InfeasiblePoint(InvalidInput):
    pass


class NotConverged(NumericFailure):
    pass


class NoAsymmetricFixpoint(NumericFailure):
    pass


class NotCritical(VerificationFailure):
    pass


class ZeroMarginal(InvalidInput):
    pass


# scalar systems
class NoRoot(NumericFailure):
    pass


class RegimeMismatch(InvalidInput):
    pass
