"""Exception types shared across the package."""


class GrowlabError(Exception):
    """Base class for all package-specific errors."""


class StructuralError(GrowlabError):
    """A graph snapshot violates a structural requirement (asymmetry, bad ids, ...)."""


class MonotonicityError(GrowlabError):
    """An edge multiplicity decreased along the sequence, or a derived ratio left [0, 1]."""


class BudgetExceededError(GrowlabError):
    """A configured budget (states, steps, replicates) would be exceeded.

    Carries the offending quantity so callers can report it.
    """

    def __init__(self, message, *, budget=None, requested=None, at=None):
        super().__init__(message)
        self.budget = budget
        self.requested = requested
        self.at = at


class EnumerationCapError(GrowlabError):
    """Exact subset enumeration was requested beyond the vertex cap."""


class ConfigError(GrowlabError):
    """Experiment configuration failed to parse or validate."""
