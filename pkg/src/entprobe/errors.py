"""Exception types raised across the package."""


class EntProbeError(Exception):
    """Base class for all package errors."""


class InvariantViolation(EntProbeError, ValueError):
    """A value failed its construction invariants (normalization, positivity, ...)."""


class BadShape(InvariantViolation):
    pass


class BadPartySet(EntProbeError, ValueError):
    pass


class ShapeMismatch(EntProbeError, ValueError):
    pass


class NonHermitian(InvariantViolation):
    pass


class NoConvergence(EntProbeError, RuntimeError):
    pass


class SingularMap(EntProbeError, ValueError):
    pass


class IndexOutOfRange(EntProbeError, IndexError):
    pass


class NoSupportFound(EntProbeError, RuntimeError):
    """Every diagonal probe on a party fell below the support threshold."""


class NotPureInput(EntProbeError, ValueError):
    pass


class NotStrictlyPositive(EntProbeError, ValueError):
    pass


class ICError(EntProbeError, ValueError):
    """The observable set is informationally complete, so no witness pair exists."""


class NotProjector(EntProbeError, ValueError):
    pass


class TooManyParties(EntProbeError, ValueError):
    pass


class NotFound(EntProbeError):
    """Witness search exhausted without a property flip.

    ``report`` carries the diagnostics of the search (directions tried, radii,
    property values at the base points).
    """

    def __init__(self, message: str, report: dict):
        super().__init__(message)
        self.report = report
