"""Exception hierarchy.

Domain errors signal a mathematically invalid request (exit status 2 on the
command line); budget errors signal that a computation hit a configured
resource limit (exit status 3).
"""


class ArakelovError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ArakelovError, ValueError):
    """The request lies outside the domain of the operation."""


class BudgetError(ArakelovError, RuntimeError):
    """A computation exceeded its configured budget."""


# characteristic
class NegativeCoordinate(DomainError):
    pass


class OutsideSimplex(DomainError):
    pass


class BoundaryPoint(DomainError):
    pass


class WeightsNotNormalized(DomainError):
    pass


class BadComposition(DomainError):
    pass


# theta
class EmptyRegion(DomainError):
    pass


class WrongDimension(DomainError):
    pass


class NotBoundary(DomainError):
    pass


class TooManyZeros(DomainError):
    pass


# norms / sections
class BadExponent(DomainError):
    pass


class NoSections(DomainError):
    pass


class UpperBoundInvalid(DomainError):
    pass


class QuadratureNotConverged(BudgetError):
    pass


class BudgetExceeded(BudgetError):
    pass


class ModeBudget(BudgetError):
    pass


# volume / zariski
class NotBig(DomainError):
    pass


class NotPseudoEffective(DomainError):
    pass


class SearchFailed(ArakelovError, RuntimeError):
    pass


class OutOfDomain(DomainError):
    pass


# fujita
class OutsideHull(DomainError):
    pass


class DegenerateHull(DomainError):
    pass


class NoFeasibleDelta(DomainError):
    pass


class BadLevel(DomainError):
    pass


class ResolutionExceeded(BudgetError):
    pass
