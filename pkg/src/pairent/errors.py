"""Exception types shared across the solver backends."""


class PairentError(Exception):
    """Base class for all pairent errors."""


class InvalidModelError(PairentError, ValueError):
    """Raised for model parameters that violate a documented precondition."""


class CapacityError(PairentError):
    """Paired-sector dimension exceeds the configured memory budget."""

    def __init__(self, n_levels, n_pairs, dim, budget):
        self.dim = dim
        self.budget = budget
        super().__init__(
            f"basis dimension binomial({n_levels},{n_pairs}) = {dim} "
            f"exceeds the dimension budget {budget}"
        )


class ConvergenceError(PairentError):
    """An iterative solve failed; carries the best residual reached."""

    def __init__(self, message, residual=None):
        self.residual = residual
        if residual is not None:
            message = f"{message} (best residual {residual:.3e})"
        super().__init__(message)


class ContinuationError(ConvergenceError):
    """Coupling continuation stalled; carries the last coupling that solved."""

    def __init__(self, message, last_good, residual=None):
        self.last_good = last_good
        super().__init__(f"{message}; last converged coupling {last_good:.6g}", residual)


class GapBracketError(PairentError):
    """No root bracket found for the self-consistent gap equation."""


class QuadratureError(PairentError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, estimate):
        self.estimate = estimate
        super().__init__(f"{message} (error estimate {estimate:.3e})")


class SweepTooSparseError(PairentError):
    """A ratio sweep is too sparse to bracket its interior maximum."""
