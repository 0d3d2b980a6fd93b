"""Exception types shared across the package."""


class DecodeError(ValueError):
    """An encoded image stream is malformed or uses an unsupported feature."""

    def __init__(self, reason, offset=None):
        self.reason = reason
        self.offset = offset
        if offset is None:
            super().__init__(reason)
        else:
            super().__init__(f"offset {offset}: {reason}")


class FilterBankError(RuntimeError):
    """Embedded filter constants failed their perfect-reconstruction check."""


class ConfigError(ValueError):
    """A run configuration contains an unknown key or an out-of-range value."""
