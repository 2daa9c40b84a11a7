"""Exception types shared across the toolkit."""


class InputError(ValueError):
    """An argument violates an operation's precondition (bad shape, range, label)."""


class ConfigError(ValueError):
    """A configuration value or file is invalid (overlapping bands, bad keys)."""


class FormatError(ValueError):
    """A serialized payload is malformed; carries the offending byte offset."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class NumericalError(ArithmeticError):
    """A computation produced non-finite values (diverged loss or gradient)."""


class CapabilityError(RuntimeError):
    """The requested operation is unsupported for this object (e.g. gradients
    of a non-differentiable variation model, oracle over a too-large grid)."""
