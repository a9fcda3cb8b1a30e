"""Shared diagnostic machinery: source spans, severities, stable rule ids."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Span:
    """A source region. `line`/`col` are 1-based and point at the start."""

    file: str
    line: int
    col: int
    end_line: int = 0
    end_col: int = 0

    def point(self) -> tuple[str, int, int]:
        return (self.file, self.line, self.col)

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"


@dataclass(frozen=True)
class Diagnostic:
    """One parse/validation/runtime finding with a stable rule id."""

    rule_id: str
    severity: Severity
    message: str
    span: Span

    def render(self) -> str:
        return (
            f"{self.span}: {self.severity.value}[{self.rule_id}]: {self.message}"
        )

    def sort_key(self) -> tuple:
        # severity and message only break exact ties, keeping the order total
        return (
            self.span.file, self.span.line, self.span.col, self.rule_id,
            self.severity.value, self.message,
        )


def sort_diagnostics(diags: list[Diagnostic]) -> list[Diagnostic]:
    """Total, deterministic order: (file, line, column, rule_id)."""
    return sorted(diags, key=Diagnostic.sort_key)


def has_errors(diags: list[Diagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diags)
