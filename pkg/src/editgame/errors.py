"""Exception types shared across the package."""


class EditGameError(Exception):
    """Base class for all editgame-specific errors."""


class UndefinedOwnershipError(EditGameError):
    """Raised when ownership is requested for an all-zero allocation."""


class InfeasibleGameError(EditGameError):
    """Raised by routines that require every contributor to be feasible."""


class DegenerateOpponentsError(EditGameError):
    """Raised when a best response is requested against zero opposing content."""


class ConvergenceError(EditGameError):
    """Fixed-point iteration did not converge within the iteration budget."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class CorpusError(EditGameError):
    """Base class for revision-corpus problems."""


class CorpusFormatError(CorpusError):
    """Malformed corpus record; carries the 1-based line number."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class CorpusOrderingError(CorpusError):
    """Revision ids and timestamps disagree about the order of edits."""


class ZeroVarianceError(EditGameError):
    """Correlation is undefined because one input has no variance."""


class SingularFitError(EditGameError):
    """Least-squares fit is undefined because the regressor is constant."""
