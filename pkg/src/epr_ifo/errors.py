"""Exception types shared across the package."""


class EprIfoError(Exception):
    """Base class for all package errors."""


class DegenerateIdler(EprIfoError):
    """Idler quadrature variance too small to condition on (division blow-up)."""


class NonPositiveFrequency(EprIfoError):
    """Sideband frequency must be strictly positive for this operation."""


class UnreachableBandwidth(EprIfoError):
    """Requested effective bandwidth cannot be met by any recycling-cavity phase."""


class NoSolutionInRange(EprIfoError):
    """Integer search exhausted without meeting the resonance residual bound.

    Carries the best residual found so the caller can widen the search.
    """

    def __init__(self, message: str, best_residual: float | None = None):
        super().__init__(message)
        self.best_residual = best_residual


class ConfigError(EprIfoError):
    """Configuration file is invalid; `line` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
