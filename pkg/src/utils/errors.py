from __future__ import annotations
from typing import Optional


class RobustChoiceError(Exception):
    """Base class for every error raised by the library."""


class DimensionError(RobustChoiceError, ValueError):
    """Acts or models live on different state spaces."""


class DomainError(RobustChoiceError, ValueError):
    """An argument lies outside its mathematical domain."""


class ConvergenceError(RobustChoiceError, RuntimeError):
    """A numerical routine could not bracket or reach its optimum."""


class ParseError(RobustChoiceError, ValueError):
    """A problem document violates the schema.

    `pointer` is a JSON pointer (RFC 6901) to the offending node.
    """

    def __init__(self, message: str, pointer: str = ''):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


class ValidationError(DomainError):
    """A well-formed document (or setting) carries a semantically invalid value."""

    def __init__(self, message: str, pointer: Optional[str] = ''):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer
