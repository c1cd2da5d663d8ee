"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class ReductError(Exception):
    """Base class for every error raised by this package."""


class ZeroSide(ReductError, ValueError):
    """A bipartite graph (or index set) would have an empty side."""


class DimensionMismatch(ReductError, ValueError):
    pass


class OutOfRange(ReductError, IndexError):
    pass


class NotDecomposable(ReductError):
    """The flip matrix has an odd (2x2)-minor, so no switch pattern reproduces it.

    ``minor`` holds the first failing coordinates ``(a, a2, b, b2)``.
    """

    def __init__(self, message: str, minor: tuple[int, int, int, int] | None = None):
        super().__init__(message)
        self.minor = minor


class NotFound(ReductError):
    pass


class NotInSLR(ReductError):
    pass


class TooSmall(ReductError, ValueError):
    pass


class TooLarge(ReductError, ValueError):
    pass


class NoExtension(ReductError):
    pass


class DuplicateTarget(ReductError, ValueError):
    pass


class ParseError(ReductError, ValueError):
    """Malformed text input. ``line`` and ``column`` are 1-based."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
