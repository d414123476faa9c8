class UsageError(ValueError):
    """An argument is outside the documented domain of an operation."""


class DataError(ValueError):
    """Input data violates the invariants of its type."""


class DegenerateInputError(ValueError):
    """A geometric construction has no well-defined answer for this input."""


class HorizonError(ValueError):
    """A requested time window runs past the available swaps."""


class WindowExitError(ValueError):
    """A statistic depends on a particle whose path left the local window."""
