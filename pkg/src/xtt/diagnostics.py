"""Source spans and structured diagnostics.

Codes are stable strings consumed by tooling:

=================  =====================================================
E-PARSE            lexical or syntactic error
E-SCOPE            unbound name (with a nearest-name suggestion)
E-TYPE-MISMATCH    checked/inferred type disagreement, bad eliminations
E-BOUNDARY         a dimension abstraction missed its declared endpoint
E-FACE             a composition tube disagrees with its cap at the seam
E-LEVEL            universe level violation
E-DUPLICATE        a top-level name was defined twice
E-IO               unreadable input file
=================  =====================================================

JSON output is one object per line, schema version 1:
``{"v": 1, "code": ..., "span": {...}, "message": ..., "expected"?, "actual"?}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

__all__ = ["Span", "Diagnostic", "XttError"]


@dataclass(frozen=True)
class Span:
    file: str
    line: int
    col: int
    end_line: int
    end_col: int

    def to_json(self) -> dict:
        return {"file": self.file, "line": self.line, "col": self.col,
                "endLine": self.end_line, "endCol": self.end_col}

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"


@dataclass(frozen=True)
class Diagnostic:
    span: Span
    code: str
    message: str
    expected: Optional[str] = None
    actual: Optional[str] = None

    def to_json(self) -> dict:
        out = {"v": 1, "code": self.code, "span": self.span.to_json(),
               "message": self.message}
        if self.expected is not None:
            out["expected"] = self.expected
        if self.actual is not None:
            out["actual"] = self.actual
        return out

    def human(self) -> str:
        lines = [f"{self.span}: error[{self.code}]: {self.message}"]
        if self.expected is not None:
            lines.append(f"  expected: {self.expected}")
        if self.actual is not None:
            lines.append(f"  actual:   {self.actual}")
        return "\n".join(lines)


class XttError(Exception):
    """Raised for any user-facing failure; carries one diagnostic."""

    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.human())
        self.diagnostic = diagnostic
