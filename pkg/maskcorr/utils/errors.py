"""
Error Types

Exceptions raised by the simulation services. All derive from ValueError
so callers that only catch ValueError keep working.
"""


class MaskcorrError(ValueError):
    """Base class for every error raised by maskcorr."""


class DimensionError(MaskcorrError):
    """Operand shapes do not fit the requested operation."""


class QubitIndexError(MaskcorrError):
    """A qubit index is out of range or repeated."""


class NotUnitaryError(MaskcorrError):
    """An operator expected to be unitary is not."""


class InvalidStateError(MaskcorrError):
    """A vector or matrix violates a state invariant (norm, trace, hermiticity, positivity)."""


class InvalidChannelError(MaskcorrError):
    """A set of Kraus operators is not trace preserving."""


class ScenarioError(MaskcorrError):
    """A verification scenario was called with unusable arguments."""
