"""Exception hierarchy shared by every module."""


class GraphMPError(Exception):
    """Base class; ``kind`` is the short tag used in CLI error documents."""

    kind = "error"


class ParseError(GraphMPError):
    kind = "parse"

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(GraphMPError, ValueError):
    kind = "validation"


class DomainError(GraphMPError, ValueError):
    """Point outside the admissible domain of a cost function."""

    kind = "domain"


class SolverError(GraphMPError):
    kind = "solver"

    def __init__(self, message, iteration=None):
        if iteration is not None:
            message = f"iteration {iteration}: {message}"
        super().__init__(message)
        self.iteration = iteration


class NumericError(SolverError):
    kind = "numeric"


class OracleSizeError(GraphMPError):
    """Brute-force enumeration refused because the graph is too large."""

    kind = "size"
