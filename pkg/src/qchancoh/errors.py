"""Exception hierarchy shared by all modules."""


class CoherenceError(Exception):
    """Base class for every error raised by qchancoh."""


class NotHermitian(CoherenceError, ValueError):
    pass


class NotPSD(CoherenceError, ValueError):
    pass


class NoConvergence(CoherenceError, RuntimeError):
    pass


class DimensionMismatch(CoherenceError, ValueError):
    pass


class NotCPTP(CoherenceError, ValueError):
    """Kraus operators fail the trace-preservation check.

    The residual ``||sum K^dag K - I||`` is kept on the instance so callers
    (the CLI in particular) can report it.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ChannelFormatError(CoherenceError, ValueError):
    pass


class InvalidAlpha(CoherenceError, ValueError):
    pass


class InvalidRegime(CoherenceError, ValueError):
    pass


class DimensionTooLarge(CoherenceError, ValueError):
    pass


class ParamOutOfRange(CoherenceError, ValueError):
    pass
