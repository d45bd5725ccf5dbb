"""Exception hierarchy.

The class names are part of the CLI contract: a failing numeric command
reports ``type(exc).__name__`` verbatim in its ``"error"`` field.
"""


class HypercontError(Exception):
    """Base class for every numeric or domain failure raised by the package."""


class PoleError(HypercontError):
    pass


class DomainError(HypercontError):
    pass


class NoConvergence(HypercontError):
    pass


class IntegerExponent(HypercontError):
    pass


class NotImplementedIntegerS(IntegerExponent):
    """Integer balance other than zero; the continuation for that case
    needs logarithmic terms of higher order that are not implemented."""


class SingularDenominator(HypercontError):
    pass


class ConvergenceCondition(HypercontError):
    pass


class ExtrapolationUnstable(HypercontError):
    pass


class TruncationInsufficient(HypercontError):
    pass


class RepresentationInapplicable(HypercontError):
    pass


class ParseError(HypercontError):
    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position
