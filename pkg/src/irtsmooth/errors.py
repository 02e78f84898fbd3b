"""Exception types shared across the package.

Every error raised by the library derives from :class:`IrtSmoothError` and
carries enough context (module, operation, location) for the CLI to print a
structured diagnostic and exit nonzero.
"""

from __future__ import annotations


class IrtSmoothError(Exception):
    """Base class for all library errors."""

    def __init__(self, message: str, *, module: str = "", operation: str = "",
                 location: str = ""):
        super().__init__(message)
        self.message = message
        self.module = module
        self.operation = operation
        self.location = location

    def diagnostic(self) -> str:
        parts = []
        if self.module:
            parts.append(f"module={self.module}")
        if self.operation:
            parts.append(f"operation={self.operation}")
        if self.location:
            parts.append(f"location={self.location}")
        prefix = " ".join(parts)
        return f"{prefix}: {self.message}" if prefix else self.message


class ParseError(IrtSmoothError):
    """Malformed input file (carries row/column location when known)."""


class InputError(IrtSmoothError):
    """Structurally invalid argument: wrong length, empty input, bad combination."""


class DomainError(IrtSmoothError):
    """Value outside its mathematical domain (option code, rank, key, ...)."""


class DegenerateGridError(IrtSmoothError):
    """Evaluation grid cannot be built (all abilities identical)."""


class EmptyNeighborhoodError(IrtSmoothError):
    """A compact-support kernel left an evaluation point with zero total weight."""


class DegenerateLikelihoodError(IrtSmoothError):
    """A subject's selected option has zero estimated probability everywhere."""


class DegenerateDensityError(IrtSmoothError):
    """Score density is undefined (zero variance in the scores)."""
