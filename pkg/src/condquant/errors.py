"""Exception hierarchy shared across the package."""


class CondQuantError(Exception):
    """Base class for all condquant errors."""


class NonPositiveProbability(CondQuantError):
    pass


class ProbabilitiesDoNotSumToOne(CondQuantError):
    pass


class SpaceMismatch(CondQuantError):
    pass


class UnknownAtom(CondQuantError):
    pass


class AlphaOutOfRange(CondQuantError):
    pass


class ScoreNotIntegrable(CondQuantError):
    pass


class DegenerateScore(CondQuantError):
    pass


class BracketFailure(CondQuantError):
    pass


class MaxIterExceeded(CondQuantError):
    pass


class NotMeasurable(CondQuantError):
    pass


class InstanceTooLarge(CondQuantError):
    pass


class NumericOverflow(CondQuantError):
    pass


class MissingSecondDerivative(CondQuantError):
    pass


class ParseError(CondQuantError):
    pass


class ValidationError(CondQuantError):
    pass
