"""Per-region fragment grammars.

Knowledge-base snippets and pipeline-generated snippets are not whole
programs; each region only admits certain statement kinds.
"""

from __future__ import annotations

from .ast import (
    BehaviorDef,
    MapDecl,
    ModelDecl,
    ObjectDef,
    ParamDecl,
    RequireStmt,
    Statement,
)
from .diagnostics import Diagnostic, compile_error
from .lexer import tokenize
from .parser import Parser

FRAGMENT_STATEMENTS: dict[str, tuple[type, ...]] = {
    "geometry": (MapDecl, ParamDecl),
    "weather": (ParamDecl,),
    "defaults": (ModelDecl, ParamDecl),
    "adversarial_object": (ObjectDef,),
    "spawn": (ObjectDef,),
    "behavior": (BehaviorDef,),
    "other_objects": (ObjectDef,),
    "requirements": (RequireStmt,),
}


def parse_fragment(source: str, category: str) -> tuple[list[Statement], list[Diagnostic]]:
    """Parse ``source`` as a fragment of ``category``'s grammar.

    Returns (statements, diagnostics); diagnostics non-empty means the
    fragment is invalid for that region.
    """
    allowed = FRAGMENT_STATEMENTS.get(category)
    if allowed is None:
        raise ValueError(f"unknown region category {category!r}")
    tokens = tokenize(source)
    if isinstance(tokens, Diagnostic):
        return [], [tokens]
    statements, diagnostics = Parser(tokens).parse_statement_list()
    if diagnostics:
        return statements, diagnostics
    if not statements:
        return [], [
            compile_error(
                "parse.empty_fragment",
                f"{category} fragment contains no statements",
                _origin_span(),
            )
        ]
    for stmt in statements:
        if not isinstance(stmt, allowed):
            names = ", ".join(t.__name__ for t in allowed)
            diagnostics.append(
                compile_error(
                    "parse.wrong_fragment_kind",
                    f"{type(stmt).__name__} not allowed in region {category!r} (expected {names})",
                    stmt.span,
                )
            )
    return statements, diagnostics


def fragment_is_valid(source: str, category: str) -> bool:
    _, diagnostics = parse_fragment(source, category)
    return not diagnostics


def _origin_span():
    from .diagnostics import SourceSpan

    return SourceSpan(1, 1, 0)
