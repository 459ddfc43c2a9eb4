"""Exception and warning classes shared across the package."""


class PoleError(ValueError):
    """Argument sits on a pole of a Gamma-type expression."""


class DomainError(ValueError):
    """Argument outside the domain an operation is defined on."""


class ConvergenceError(ArithmeticError):
    """A series or iteration did not reach its tolerance."""


class DepthExceeded(RuntimeWarning):
    """Adaptive quadrature hit its depth limit; the best estimate is returned."""


class NoDecayDetected(ArithmeticError):
    """A half-line integrand showed no decay within the doubling budget."""


class InfiniteConstant(ArithmeticError):
    """A superlevel set of a Paley weight has infinite Plancherel measure."""


class InfiniteBound(ArithmeticError):
    """A superlevel set of a multiplier symbol has infinite Plancherel measure."""


class NotMonotone(ValueError):
    """A function required to be monotone decreasing was found increasing."""


class DegenerateFit(ArithmeticError):
    """A log-log fit is too poor (or too short) to report an exponent."""


class EnvelopeViolation(ValueError):
    """A symbol exceeds every admissible decay envelope on the sample grid."""
