"""Exception types shared across the package."""


class PtzgsError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(PtzgsError):
    """Vector/matrix shapes inconsistent with the agent layout."""


class NonFiniteInput(PtzgsError):
    """An evaluation point contains NaN or infinity."""


class DisconnectedGraph(PtzgsError):
    """Fiedler value is not positive: the communication graph is disconnected."""


class ConvergenceFailure(PtzgsError):
    """An iterative solver (eigensolver, Newton) exceeded its iteration cap."""


class SingularHessian(PtzgsError):
    """A local Hessian failed its SPD factorization."""


class NonFiniteState(PtzgsError):
    """Integration produced a NaN/inf state component."""

    def __init__(self, t, component):
        self.t = t
        self.component = component
        super().__init__(f"non-finite state at t={t:.9g} ({component})")


class GridTooFine(PtzgsError):
    """Projected time-grid size exceeds the safety cap."""


class InvalidConstants(PtzgsError):
    """Envelope constants violate the required ordering p > delta > k2/(4*c*lambda2)."""


class EnvelopeViolation(PtzgsError):
    """A Lyapunov sample exceeds its theoretical decay envelope."""

    def __init__(self, message, worst_time=None, worst_ratio=None):
        self.worst_time = worst_time
        self.worst_ratio = worst_ratio
        super().__init__(message)


class ParseError(PtzgsError):
    """Config file is syntactically malformed."""


class ValidationError(PtzgsError):
    """Config or constructed object violates a declared invariant."""
