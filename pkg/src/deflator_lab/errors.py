"""Exception types raised by deflator_lab."""


class DeflatorLabError(Exception):
    """Base class for every error raised by the package."""


class NonRefiningFiltration(DeflatorLabError):
    pass


class BadMeasure(DeflatorLabError):
    pass


class NotAStoppingTime(DeflatorLabError):
    pass


class NotPredictable(DeflatorLabError):
    pass


class NotAdapted(DeflatorLabError):
    pass


class NonPositive(DeflatorLabError):
    pass


class DecompositionDomainViolation(DeflatorLabError):
    pass


class NotAMartingale(DeflatorLabError):
    pass


class NotADeflator(DeflatorLabError):
    pass


class ReductionImpossible(DeflatorLabError):
    pass


class JumpAtTau(DeflatorLabError):
    pass


class EquationNotSatisfied(DeflatorLabError):
    pass


class NonVanishingAtEtaDdot(DeflatorLabError):
    pass


class EtaStopFails(DeflatorLabError):
    pass


class JumpAtEtaTilde(DeflatorLabError):
    pass


class B1Violated(DeflatorLabError):
    pass


class UnrealizableClass(DeflatorLabError):
    pass


class InvariantViolation(DeflatorLabError):
    """An identity that must hold exactly failed; always a bug or bad input."""


def require(cond, message, exc=InvariantViolation):
    if not cond:
        raise exc(message)
