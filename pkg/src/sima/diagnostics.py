"""Shared diagnostic records emitted by validators and the compiler."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Severity(Enum):
    ERROR = "ERROR"
    WARN = "WARN"


@dataclass(frozen=True)
class Diagnostic:
    """One validator finding, printable as ``file:line:col: [CODE] message``."""

    severity: Severity
    code: str
    message: str
    line: int | None = None
    col: int | None = None

    def render(self, file: str | None = None) -> str:
        prefix = file if file else "<input>"
        line = self.line if self.line is not None else 0
        col = self.col if self.col is not None else 0
        return f"{prefix}:{line}:{col}: [{self.code}] {self.message}"


def has_errors(diagnostics: list[Diagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diagnostics)
