"""Exception types shared across the package."""


class MaxsurfError(Exception):
    """Base class for all package errors."""


class ParseError(MaxsurfError, ValueError):
    """Malformed expression string.

    ``offset`` is the byte offset into the source where the problem was found.
    """

    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownIdentifierError(ParseError):
    pass


class NonIntegerExponentError(ParseError):
    pass


class EvaluationError(MaxsurfError, ArithmeticError):
    """Division by zero or a non-finite value during evaluation."""


class DegenerateMetricError(MaxsurfError, ValueError):
    """The Hermitian norm of Phi is not positive."""


class DegeneratePointError(MaxsurfError, ValueError):
    """g1' g2' vanishes (isotropic point) where a canonical quantity is needed."""


class ValidityError(MaxsurfError, ValueError):
    """Generating data violates the modulus conditions on the domain."""


class RecoveryError(MaxsurfError, ValueError):
    """phi1 + i phi2 = 0, so (f, g1, g2) cannot be read off Phi."""


class QuadratureError(MaxsurfError, RuntimeError):
    """Adaptive quadrature did not reach the requested accuracy."""


class SpinorError(MaxsurfError, ValueError):
    """Matrix is not in SU(1,1) within tolerance."""


class FitError(MaxsurfError, RuntimeError):
    """A Moebius fit was expected to exist but could not be verified."""


class ConfigError(MaxsurfError, ValueError):
    """Invalid job configuration."""
