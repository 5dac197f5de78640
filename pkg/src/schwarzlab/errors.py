"""Exception hierarchy shared by all modules."""


class SchwarzLabError(Exception):
    """Base class for every error raised by the package."""


class QuadratureError(SchwarzLabError):
    """A contour sample evaluated to a non-finite value."""


class ContourZeroError(SchwarzLabError):
    """The integrand denominator vanishes (numerically) on the contour."""


class ResolutionError(SchwarzLabError):
    """An argument-principle count did not round cleanly to an integer."""


class NearBranchPointError(SchwarzLabError):
    """Root continuation failed because two branches came too close.

    ``location`` holds the z value where tracking stopped.
    """

    def __init__(self, message: str, location: complex | None = None):
        super().__init__(message)
        self.location = location


class DomainError(SchwarzLabError):
    """A model was evaluated outside its declared domain."""


class DegenerateMapError(SchwarzLabError):
    """A map is numerically constant on the region under test."""


class PreconditionError(SchwarzLabError):
    """A documented precondition of an operation does not hold."""


class RejectedConstruction(SchwarzLabError):
    """A constructor refused its input; ``witness`` explains why."""

    def __init__(self, message: str, witness: dict | None = None):
        super().__init__(message)
        self.witness = witness or {}


class IllConditionedError(SchwarzLabError):
    """A numerical reduction (gcd, inversion) is too ill-conditioned to trust."""


class SingularRatioError(SchwarzLabError):
    """A denominator normal derivative vanished at a sample."""


class FactorizationError(SchwarzLabError):
    """A nonpositive ratio prevents the square-root factorization."""


class CriticalPointError(SchwarzLabError):
    """The map A has a vanishing derivative at the base point."""


class ConfigError(SchwarzLabError):
    """Malformed job configuration; ``field`` names the offending key."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field
