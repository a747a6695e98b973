"""Scenario DSL front end: lexer, parser, semantic analyzer, formatter."""

from .analyzer import analyze
from .ast import (
    BUILTIN_BEHAVIORS,
    CANONICAL_REGION_ORDER,
    KB_CATEGORIES,
    REGION_LABELS,
    Anchor,
    BehaviorDef,
    ObjectDef,
    ObjectKind,
    PlacementExpr,
    Region,
    Relation,
    ScriptModule,
)
from .diagnostics import Diagnostic, Phase, SourceSpan, compile_error, execute_error
from .formatter import format_module
from .fragments import FRAGMENT_STATEMENTS, fragment_is_valid, parse_fragment
from .lexer import tokenize
from .parser import compile_source, parse

__all__ = [
    "BUILTIN_BEHAVIORS",
    "CANONICAL_REGION_ORDER",
    "KB_CATEGORIES",
    "REGION_LABELS",
    "FRAGMENT_STATEMENTS",
    "Anchor",
    "BehaviorDef",
    "Diagnostic",
    "ObjectDef",
    "ObjectKind",
    "Phase",
    "PlacementExpr",
    "Region",
    "Relation",
    "ScriptModule",
    "SourceSpan",
    "analyze",
    "compile_error",
    "compile_source",
    "execute_error",
    "format_module",
    "fragment_is_valid",
    "parse",
    "parse_fragment",
    "tokenize",
]
