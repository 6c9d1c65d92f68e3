"""Exception hierarchy shared across the package."""


class CsflabError(Exception):
    """Base class for all package errors."""


class ConfigurationError(CsflabError, ValueError):
    """Invalid parameter, grid, or run configuration."""


class DivergentIntegralError(CsflabError, ArithmeticError):
    """An integral with a non-integrable endpoint singularity was requested."""


class EntireGraphRegimeError(CsflabError, ValueError):
    """No slab-bound translator exists for this exponent (alpha <= 1/2)."""


class InvalidRecipeError(CsflabError, ValueError):
    """Initial-data recipe produced non-positive speed or a divergent width."""


class PositivityLossError(CsflabError, ArithmeticError):
    """Time step lost strict positivity even after the maximum number of halvings."""

    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = time


class IntegrationFailureError(CsflabError, ArithmeticError):
    """Time integration could not reach the requested horizon."""

    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = time


class ReconstructionError(CsflabError, ValueError):
    """Curve reconstruction or graph conversion hit an inconsistent sample."""


class ParameterDomainError(CsflabError, ValueError):
    """Arguments outside the validity domain of an estimate or barrier."""
