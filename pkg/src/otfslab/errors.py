"""Exception types shared across the toolkit.

The CLI maps these onto process exit codes (config error -> 2,
complexity guard -> 3, numerical failure -> 4).
"""


class OtfslabError(Exception):
    """Base class for all toolkit errors."""


class ConfigurationError(OtfslabError):
    """A config value or combination of values is invalid."""


class ComplexityError(OtfslabError):
    """An enumeration or build would exceed a configured cap."""


class NumericalError(OtfslabError):
    """A numerical invariant failed (e.g. an equivalence check blew its tolerance)."""


class UnsupportedOperationError(OtfslabError):
    """The operation does not apply to the given inputs (e.g. fractional taps
    passed to an integer-tap-only routine)."""
