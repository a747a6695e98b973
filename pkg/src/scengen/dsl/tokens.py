"""Token stream definitions for the scenario DSL."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .diagnostics import SourceSpan


class TokenKind(Enum):
    KEYWORD = "keyword"
    IDENTIFIER = "identifier"
    NUMBER = "number"
    STRING = "string"
    OPERATOR = "operator"
    NEWLINE = "newline"
    INDENT = "indent"
    DEDENT = "dedent"
    EOF = "eof"


KEYWORDS = frozenset(
    {
        "map",
        "model",
        "param",
        "behavior",
        "interrupt",
        "when",
        "new",
        "on",
        "lane",
        "at",
        "facing",
        "ahead",
        "behind",
        "left",
        "right",
        "of",
        "by",
        "with",
        "require",
        "distance",
        "speed",
        "signal",
        "is",
    }
)

# Object kinds are capitalized identifiers, not keywords.
OBJECT_KINDS = ("Car", "Truck", "Bicycle", "Pedestrian", "StaticProp")

ACTION_NAMES = ("follow_lane", "lane_change", "brake", "wait", "accelerate", "turn")

REGION_MARKER_PREFIX = "#-- region:"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    span: SourceSpan

    def __repr__(self) -> str:  # compact for test failure output
        return f"Token({self.kind.value}, {self.text!r}, {self.span.line}:{self.span.column})"
