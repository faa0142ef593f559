"""Exception types shared across the package."""


class InfluNetError(Exception):
    """Base class for all package-specific errors."""


class GraphValidationError(InfluNetError, ValueError):
    """A graph violates a structural invariant (weights, loops, degrees)."""


class GraphParseError(InfluNetError, ValueError):
    """Edge-list input could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NotStronglyConnectedError(InfluNetError, ValueError):
    """Operation requires a strongly connected graph."""


class SingularSystemError(InfluNetError, ValueError):
    """The interior linear system is singular or numerically unsolvable."""


class StabilityError(InfluNetError, ValueError):
    """Explicit time step too large for the requested simulation."""


class WalkCapError(InfluNetError, RuntimeError):
    """A random walk exceeded the per-walk step cap before absorbing."""


class ConvergenceError(InfluNetError, RuntimeError):
    """Iterative optimizer stopped at its iteration cap before reaching tolerance."""

    def __init__(self, message: str, gradient_norm: float | None = None):
        self.gradient_norm = gradient_norm
        super().__init__(message)


class GameError(InfluNetError, ValueError):
    """Base class for illegal game interactions."""


class OutOfTurnError(GameError):
    """A player attempted to move when it is not their turn."""


class IllegalMoveError(GameError):
    """The requested vertex is not a legal move."""


class GameOverError(GameError):
    """The game has already ended."""
