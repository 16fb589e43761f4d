"""Exception types shared across the package."""


class WedgekitError(Exception):
    """Base class for all package-specific failures."""


class DimensionError(WedgekitError, ValueError):
    """Operands have incompatible dimensions."""


class DomainError(WedgekitError):
    """A point or set violates a domain precondition (e.g. not interior)."""


class DegenerateWedgeError(WedgekitError):
    """No positive-width wedge fits at the requested base point."""


class PoleError(WedgekitError, ZeroDivisionError):
    """Evaluation requested exactly on a singular point."""


class SupportError(WedgekitError, ValueError):
    """A measure's support violates the required interval constraint."""


class NotAnalyticError(WedgekitError):
    """The analyticity radius at the requested point is zero."""


class AccuracyError(WedgekitError):
    """A numerical result failed its internal consistency check."""


class SamplingError(WedgekitError):
    """A sampled linear system is rank deficient."""


class ConditioningError(WedgekitError):
    """A solve exceeded the reliable float64 conditioning envelope."""

    def __init__(self, message: str, largest_reliable: int | None = None):
        super().__init__(message)
        self.largest_reliable = largest_reliable


class StuckError(WedgekitError):
    """Path continuation stopped making progress; carries the partial trace."""

    def __init__(self, message: str, steps=None):
        super().__init__(message)
        self.steps = list(steps) if steps is not None else []
