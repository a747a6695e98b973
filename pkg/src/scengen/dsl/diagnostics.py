"""Diagnostics shared by the compile gate and the executor.

Every diagnostic carries a stable machine code (``lex.*``, ``parse.*``,
``sem.*``, ``exec.*``, ...) so downstream consumers match on codes, not on
message prose.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class Phase(Enum):
    COMPILE = "compile"
    EXECUTE = "execute"


@dataclass(frozen=True)
class SourceSpan:
    """1-based source location covering ``length`` characters."""

    line: int
    column: int
    length: int = 0

    def __post_init__(self) -> None:
        if self.line < 1 or self.column < 1 or self.length < 0:
            raise ValueError(f"invalid span {self.line}:{self.column}+{self.length}")


@dataclass(frozen=True)
class Diagnostic:
    """Phase-tagged error record.

    Compile diagnostics carry a span; execute diagnostics carry a non-empty
    trace of frame descriptions.
    """

    phase: Phase
    code: str
    message: str
    span: SourceSpan | None = None
    trace: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.phase is Phase.COMPILE and self.span is None:
            raise ValueError(f"compile diagnostic {self.code} needs a span")
        if self.phase is Phase.EXECUTE and not self.trace:
            raise ValueError(f"execute diagnostic {self.code} needs a trace")

    def render(self) -> str:
        """Fixed one-line rendering used in repair prompts and logs."""
        loc = f" @ {self.span.line}:{self.span.column}" if self.span else ""
        head = f"[{self.phase.value}/{self.code}] {self.message}{loc}"
        if self.trace:
            frames = "\n".join(f"    at {frame}" for frame in self.trace)
            return f"{head}\n{frames}"
        return head


def compile_error(code: str, message: str, span: SourceSpan) -> Diagnostic:
    return Diagnostic(Phase.COMPILE, code, message, span=span)


def execute_error(code: str, message: str, trace: tuple[str, ...]) -> Diagnostic:
    return Diagnostic(Phase.EXECUTE, code, message, trace=trace)
