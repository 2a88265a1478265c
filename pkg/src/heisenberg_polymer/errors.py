"""Exception types shared across the package."""


class ArgumentError(ValueError):
    """Malformed or inconsistent argument (wrong sector, bad dims, ...)."""


class SizeError(ValueError):
    """A size cap on the number of vertices or subset cardinality was exceeded."""


class DegenerateNormalizationError(ValueError):
    """The coefficients sum to zero (or not to one where that is required)."""
