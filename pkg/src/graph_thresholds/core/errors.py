"""Exception hierarchy. The CLI maps each class to an exit code."""

from pathlib import Path
from typing import Any, Optional


class GraphThresholdsError(Exception):
    """Base class for all package errors."""

    exit_code: int = 1


class DomainError(GraphThresholdsError, ValueError):
    """Precondition or domain violation (empty graph, loop in a coloring query, ...)."""


class RecordError(DomainError):
    """Malformed or unreadable record file, located by 1-based line."""

    def __init__(self, path: Path | str, line: Optional[int], message: str):
        self.path = Path(path)
        self.line = line
        self.message = message
        where = f"{self.path}:{line}" if line is not None else str(self.path)
        super().__init__(f"{where}: {message}")


class InfeasibleSizeError(GraphThresholdsError):
    """A requested finite size cannot be reached at this window.

    Carries the largest achievable size and the best partial result.
    """

    exit_code = 2

    def __init__(self, message: str, max_achievable: int, partial: Any = None):
        super().__init__(message)
        self.max_achievable = max_achievable
        self.partial = partial


class ConvergenceError(GraphThresholdsError):
    """No restart of an iterative method converged; carries the best-so-far result."""

    def __init__(self, message: str, best: Any = None):
        super().__init__(message)
        self.best = best
