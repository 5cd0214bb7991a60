"""Exception hierarchy shared by every modekit module."""


class ModekitError(Exception):
    """Base class for all errors raised by modekit."""


class InvalidSignal(ModekitError, ValueError):
    pass


class SignalTooShort(ModekitError, ValueError):
    pass


class TooFewExtrema(ModekitError):
    """Not enough extrema to build an envelope.

    Sifting callers treat this as "the input is already a residue".
    """


class LengthMismatch(ModekitError, ValueError):
    pass


class IndexOutOfRange(ModekitError, IndexError):
    pass


class EmptyDecomposition(ModekitError, ValueError):
    pass


class ZeroVariance(ModekitError, ValueError):
    pass


class AliasingViolation(ModekitError, ValueError):
    pass


class ParseError(ModekitError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyFile(ParseError):
    pass


class ConfigError(ModekitError, ValueError):
    """Invalid parameter combination, detected before any computation."""
