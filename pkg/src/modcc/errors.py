"""Exception types shared across the package."""

from __future__ import annotations


class ModccError(Exception):
    """Base class for all errors raised by this package."""


class QasmParseError(ModccError):
    """Raised when OpenQASM input cannot be parsed or uses unsupported syntax."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ValidationError(ModccError):
    """Raised when an input is well-formed but semantically invalid."""


class InfeasibleError(ModccError):
    """Raised when a circuit cannot be placed on the given system."""
