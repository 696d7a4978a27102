"""Exception types shared across the library."""


class CilError(Exception):
    """Base class for all library errors."""


class DegenerateGeometryError(CilError):
    """Raised when a geometric construction has no answer (collinear or coincident points)."""


class PoleCollisionError(CilError):
    """Raised when a Moebius map is applied to a region containing its pole."""


class EnclosureError(CilError):
    """Raised when an interval operation cannot produce a valid enclosure."""


class InvalidSystemError(CilError):
    """Raised when an iterated function system fails validation."""


class DepthCapError(CilError):
    """Raised when a recursion would exceed the configured word-length cap."""


class BudgetExceededError(CilError):
    """Raised when an enumeration would exceed the configured work budget."""
