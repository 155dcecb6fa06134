"""Exception types shared by every module in the package."""


class GraphVecError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(GraphVecError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class ValidationError(GraphVecError):
    """Input data or configuration violates a documented precondition."""


class SolverError(GraphVecError):
    """An iterative solver did not converge; carries its last residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class TrainingError(GraphVecError):
    """Weight training diverged; carries the epoch and weights at failure."""

    def __init__(self, message, epoch=None, weights=None):
        super().__init__(message)
        self.epoch = epoch
        self.weights = weights


class UnknownNodeError(GraphVecError):
    """A node id was requested that is not present in the graph."""
