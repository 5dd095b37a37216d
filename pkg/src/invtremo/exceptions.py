"""Exception types shared across the package."""


class InvtremoError(Exception):
    """Base class for all package errors."""


class BoundsViolation(InvtremoError):
    """A decision vector lies outside the problem's box bounds."""


class SpecError(InvtremoError):
    """Invalid problem or experiment specification."""


class NumericalFailure(InvtremoError):
    """Linear-algebra failure that survived the jitter escalation policy."""


class ValidationError(InvtremoError):
    """Data violates a documented invariant (simplex, bounds, dominance)."""


class FormatError(InvtremoError):
    """Unreadable file or unknown format version."""
