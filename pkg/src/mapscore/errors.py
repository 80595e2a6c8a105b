"""Exception types shared across the package."""


class InputError(ValueError):
    """Caller-supplied data or parameters violate an operation contract."""


class SchemaError(InputError):
    """Scene-file validation failure; the message carries the field path."""
