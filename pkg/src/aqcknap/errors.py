"""Exception types shared across the package.

Every error carries a machine-readable ``code`` (for example
``WEIGHT_EXCEEDS_CAPACITY``) so callers and the CLI can branch on the
violated condition without parsing messages.
"""


class AqcError(Exception):
    """Base class; ``code`` names the violated condition."""

    code = "ERROR"

    def __init__(self, code, message=None):
        self.code = code
        super().__init__(f"{code}: {message}" if message else code)


class InstanceError(AqcError, ValueError):
    """Invalid knapsack instance or solver input."""


class EncodingError(AqcError, ValueError):
    """Bad penalty constants or malformed model/assignment."""


class SpectralError(AqcError, RuntimeError):
    """Eigen-solver resource or convergence failure."""

    def __init__(self, code, message=None, *, s=None, iterations=None, residual=None):
        self.s = s
        self.iterations = iterations
        self.residual = residual
        super().__init__(code, message)


class QuadratureError(AqcError, RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


class ValidityRangeError(AqcError, ValueError):
    """Asymptotic relation evaluated outside its stated range."""
