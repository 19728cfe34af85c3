"""Exception hierarchy shared by all mlamatch modules."""


class MlaMatchError(Exception):
    """Base class for every error raised by this package."""


class DegenerateModeError(MlaMatchError, ValueError):
    """A mode sits exactly at cutoff, so its impedance is undefined."""


class SingularJunctionError(MlaMatchError, ValueError):
    pass


class SingularNetworkError(MlaMatchError, ArithmeticError):
    pass


class InvalidConfigError(MlaMatchError, ValueError):
    pass


class QuadratureError(MlaMatchError, ArithmeticError):
    """Adaptive quadrature did not reach its relative tolerance.

    The last two estimates are kept on ``estimates`` so callers can judge
    how far off the result is.
    """

    def __init__(self, message, estimates=()):
        super().__init__(message)
        self.estimates = tuple(estimates)


class DegenerateResonanceError(MlaMatchError, ArithmeticError):
    pass


class ApertureDomainError(MlaMatchError, ValueError):
    pass


class PoleError(MlaMatchError, ArithmeticError):
    pass


class EncodingError(MlaMatchError, ValueError):
    pass


class ConfigError(MlaMatchError, ValueError):
    """Configuration problem tied to a single named field."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class FormatError(MlaMatchError, ValueError):
    pass
