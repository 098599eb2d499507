"""Exception hierarchy shared by all modules."""


class SpectraError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(SpectraError, ValueError):
    """An argument violates a documented precondition."""


class DomainError(SpectraError, ValueError):
    """A coefficient or argument falls outside its admissible domain."""


class SingularGridError(SpectraError):
    """Coincident nodes make a stencil denominator vanish."""


class ConvergenceError(SpectraError, ArithmeticError):
    """An iterative eigensolver exhausted its iteration budget."""


class NotPositiveDefiniteError(SpectraError, ArithmeticError):
    """A Cholesky factorization failed."""


class BracketError(SpectraError, ValueError):
    """The bisection bracket does not contain the requested level."""


class DimensionMismatchError(SpectraError, ValueError):
    """Two spectra that must be paired have incompatible sizes."""


class ConfigError(SpectraError):
    """An experiment configuration failed schema validation."""
