"""Diagnostics shared by the ingest, translation and checking stages."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    code: str
    message: str
    line: Optional[int] = None
    column: Optional[int] = None

    @property
    def is_error(self) -> bool:
        return self.severity == ERROR

    def __str__(self) -> str:
        where = ""
        if self.line is not None:
            where = f"{self.line}:{self.column}: " if self.column is not None else f"{self.line}: "
        return f"{where}{self.severity}[{self.code}]: {self.message}"


def error(code: str, message: str, line=None, column=None) -> Diagnostic:
    return Diagnostic(ERROR, code, message, line, column)


def warning(code: str, message: str, line=None, column=None) -> Diagnostic:
    return Diagnostic(WARNING, code, message, line, column)


def has_errors(diagnostics: Iterable[Diagnostic]) -> bool:
    return any(d.is_error for d in diagnostics)


class Owx2ProtoError(Exception):
    """Fatal failure carrying every diagnostic accumulated up to that point."""

    def __init__(self, diagnostics: Iterable[Diagnostic]):
        self.diagnostics = list(diagnostics)
        errors = [d for d in self.diagnostics if d.is_error]
        summary = str(errors[0]) if errors else "fatal error"
        if len(errors) > 1:
            summary += f" (and {len(errors) - 1} more)"
        super().__init__(summary)


class OwxError(Owx2ProtoError):
    pass


class ModelError(Owx2ProtoError):
    pass


class TranslateError(Owx2ProtoError):
    pass


class NumberingError(Owx2ProtoError):
    pass
