"""Exception hierarchy for the MB engine."""

from typing import Optional


class MBHFError(Exception):
    """Base class of every error raised by the engine."""


# expr

class ExprError(MBHFError):
    """Errors raised while parsing or evaluating expressions."""


class ExprSyntaxError(ExprError):
    """Malformed expression text."""

    def __init__(self, message: str, position: Optional[int] = None):
        super().__init__(message)
        self.position = position


class MissingBinding(ExprError):
    """An atom of the expression has no value in the assignment."""


class PoleAtPoint(ExprError):
    """Division by zero while evaluating an expression."""


class NonLinearExpression(ExprError):
    """Text expected to be a linear parameter combination is not linear."""


# mb_model

class ModelError(MBHFError):
    """Errors raised by the MB integral data model."""


class GammaPole(ModelError):
    """A numerator Gamma argument sits on a nonpositive integer."""


class NonPositiveKernelBase(ModelError):
    """A kernel base evaluates on the ray (-inf, 0]."""


class BranchCutViolation(ModelError):
    """A power base evaluates on the ray (-inf, 0] with a non-integer exponent."""


class Overflow(ModelError):
    """The log-magnitude of the integrand left the representable range."""


# rules

class RuleError(MBHFError):
    """Errors raised by the rewrite rules."""


class NoMatch(RuleError):
    """The integrand does not have the shape of the requested form."""


class AmbiguousMatch(RuleError):
    """More than one factor assignment fits the requested form."""


# notation

class NotationError(MBHFError):
    """Errors raised by the path notation."""


class PathSyntaxError(NotationError):
    """Malformed path string."""

    def __init__(self, message: str, position: Optional[int] = None):
        super().__init__(message)
        self.position = position


class UnknownSeed(NotationError):
    """The seed name is not registered."""


class ClassMismatch(NotationError):
    """Letters of a step do not belong to the class implied by its digits."""


class StepFailed(NotationError):
    """A step of a path could not be applied."""

    def __init__(self, message: str, index: int, label: str):
        super().__init__(message)
        self.index = index
        self.label = label


# series

class SeriesError(MBHFError):
    """Errors raised by series summation and the named-series registry."""


class PoleInNegativeExtension(SeriesError):
    """Pochhammer symbol with negative index hits a zero factor."""


class DenominatorPochPole(SeriesError):
    """A denominator Pochhammer symbol vanishes inside the summation range."""


class ArgumentPole(SeriesError):
    """A series argument cannot be evaluated at the requested point."""


class NonConvergent(SeriesError):
    """Summation stopped before reaching the requested tolerance."""


class ValidationFailure(SeriesError):
    """A registry entry disagrees with its MB representation."""


class DuplicateName(SeriesError):
    """A name is registered twice."""


class UnregisteredDefinition(SeriesError):
    """An identity needs a series definition that is not registered."""


# quadrature

class QuadratureError(MBHFError):
    """Errors raised by the contour quadrature."""


class Infeasible(QuadratureError):
    """No straight contour separates the pole sets with the requested margin."""


class PoleAtNonpositiveInteger(QuadratureError):
    """log_gamma called at a pole."""


# storage

class CodecError(MBHFError):
    """A JSON document does not follow its declared schema."""
