"""Exception types shared across the package."""


class FieldMismatchError(ValueError):
    """Operands live over different fields."""


class CountLimitError(RuntimeError):
    """An enumeration would exceed the configured element budget."""


class PrecisionError(ValueError):
    """A truncated series is too short to decide the requested quantity."""


class RangeError(ValueError):
    """Parameters fall outside the theorem-conforming range and no override was given."""
