"""Exception hierarchy shared by all modules.

The CLI maps :class:`InputError` to exit status 1 and the two numerical
classes to exit status 2.
"""

from __future__ import annotations


class HiggsRGError(Exception):
    """Base class for every error raised by this package."""


class InputError(HiggsRGError, ValueError):
    """Invalid user-supplied value, config line or hypercharge assignment."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DomainError(HiggsRGError, ArithmeticError):
    """A closed form was evaluated outside its domain (Landau pole, arcoth, ...)."""

    def __init__(self, message: str, coupling: str | None = None):
        self.coupling = coupling
        super().__init__(message)


class NumericalFailure(HiggsRGError, ArithmeticError):
    """Integration blow-up, unsolvable relation or failed sample/corner runs."""

    def __init__(self, message: str, last_t: float | None = None, stage: str | None = None):
        self.last_t = last_t
        self.stage = stage
        if stage is not None:
            message = f"[{stage}] {message}"
        super().__init__(message)
