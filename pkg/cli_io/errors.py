import typing

from spectral_core.errors import ComputationError


class UsageError(ComputationError):
    """Malformed or out-of-range command-line input (exit status 2)."""


class ConfigParseError(UsageError):
    """A config file line that cannot be used."""

    def __init__(self, message: str, line: int, value: typing.Optional[float] = None):
        super().__init__(f"line {line}: {message}", value)
        self.line = line


class IoError(ComputationError):
    """An output path that cannot be written."""
