"""Exception types shared across the package."""


class InputError(ValueError):
    """Invalid argument supplied by the caller."""


class DimensionMismatchError(InputError):
    """A vector/matrix argument has the wrong dimension."""


class UnsupportedQueryError(InputError):
    """A closed-form quantity was requested that the object cannot provide."""


class ConfigError(InputError):
    """An experiment configuration failed validation."""
