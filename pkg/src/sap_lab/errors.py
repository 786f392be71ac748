"""Exception and warning types shared across the package."""


class SapLabError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(SapLabError, ValueError):
    """A physical parameter or configuration value violates its invariant."""


class ConfigError(SapLabError, ValueError):
    """An experiment config file is malformed or inconsistent."""


class BracketError(SapLabError):
    """Root bracketing failed: no sign change on the given interval."""


class ConvergenceError(SapLabError):
    """An iterative solver hit its iteration cap without converging."""


class InfeasibleProtectionError(SapLabError):
    """Primary protection cannot be met even with full secondary suppression.

    Signals a lambda1/gamma/tau combination where the primary network alone
    exceeds the outage budget.
    """


class InsufficientBinOccupancyError(SapLabError):
    """A conditional Monte Carlo bin collected too few trials to estimate."""


class QuadratureToleranceWarning(RuntimeWarning):
    """Adaptive quadrature exhausted its subdivision budget.

    The returned value is the best available estimate; the requested
    tolerance is not certified.
    """
