"""Recursive-descent parser producing ScriptModule ASTs.

Panic-mode recovery: a malformed statement yields one diagnostic and the
parser resynchronizes at the next top-level line, so a single pass can report
several independent problems (the repair loop wants them all at once).
"""

from __future__ import annotations

from .ast import (
    REGION_LABELS,
    ActionCall,
    Anchor,
    Arg,
    BehaviorDef,
    BehaviorParam,
    BehaviorRef,
    Condition,
    DistanceCond,
    InterruptClause,
    LaneCond,
    MapDecl,
    ModelDecl,
    ObjectDef,
    ObjectKind,
    ParamDecl,
    PlacementExpr,
    Ref,
    Region,
    Relation,
    RequireStmt,
    RequireStmt as _RequireStmt,  # noqa: F401  (re-export convenience)
    ScriptModule,
    SignalCond,
    SpeedCond,
    Statement,
    Value,
)
from .diagnostics import Diagnostic, SourceSpan, compile_error
from .lexer import tokenize, unquote
from .tokens import ACTION_NAMES, REGION_MARKER_PREFIX, Token, TokenKind

_MAX_DIAGNOSTICS = 50
_SIGNAL_STATES = ("red", "yellow", "green")
_KIND_BY_NAME = {kind.value: kind for kind in ObjectKind}
_CMP_OPS = (">", "<", ">=", "<=")
# Keywords that double as parameter/argument names ("speed" above all).
_NAME_KEYWORDS = ("speed", "distance", "lane", "signal")


class _ParseFailure(Exception):
    """Internal control flow; carries the diagnostic for the statement."""

    def __init__(self, diagnostic: Diagnostic):
        self.diagnostic = diagnostic


class Parser:
    def __init__(self, tokens: list[Token]):
        # Tolerate streams without a trailing EOF (token-level fuzzing).
        if not tokens or tokens[-1].kind is not TokenKind.EOF:
            last_span = tokens[-1].span if tokens else SourceSpan(1, 1, 0)
            tokens = list(tokens) + [Token(TokenKind.EOF, "", last_span)]
        self.tokens = tokens
        self.pos = 0
        self.diagnostics: list[Diagnostic] = []

    # -- token helpers --

    def peek(self, offset: int = 0) -> Token:
        pos = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        if token.kind is not TokenKind.EOF:
            self.pos += 1
        return token

    def at(self, kind: TokenKind, text: str | None = None) -> bool:
        token = self.peek()
        return token.kind is kind and (text is None or token.text == text)

    def expect(self, kind: TokenKind, text: str | None = None) -> Token:
        if not self.at(kind, text):
            token = self.peek()
            want = text if text is not None else kind.value
            raise _ParseFailure(
                compile_error(
                    "parse.unexpected_token",
                    f"expected {want!r}, got {token.text or token.kind.value!r}",
                    token.span,
                )
            )
        return self.advance()

    def expect_name(self) -> Token:
        """An identifier, or one of the keywords usable as a name."""
        token = self.peek()
        if token.kind is TokenKind.IDENTIFIER or (
            token.kind is TokenKind.KEYWORD and token.text in _NAME_KEYWORDS
        ):
            return self.advance()
        raise _ParseFailure(
            compile_error(
                "parse.unexpected_token",
                f"expected a name, got {token.text or token.kind.value!r}",
                token.span,
            )
        )

    def error(self, code: str, message: str, span: SourceSpan | None = None) -> _ParseFailure:
        return _ParseFailure(compile_error(code, message, span or self.peek().span))

    # -- entry points --

    def parse_program(self) -> ScriptModule | list[Diagnostic]:
        statements: list[Statement] = []
        regions: list[Region] = []
        current_label: str | None = None
        region_start = 0

        def close_region() -> None:
            nonlocal region_start
            if current_label is not None:
                regions.append(Region(current_label, region_start, len(statements)))
            elif statements[region_start:]:
                regions.append(Region("defaults", region_start, len(statements)))
            region_start = len(statements)

        while not self.at(TokenKind.EOF) and len(self.diagnostics) < _MAX_DIAGNOSTICS:
            token = self.peek()
            if token.kind is TokenKind.NEWLINE:
                self.advance()
                continue
            if token.kind is TokenKind.INDENT:
                self.diagnostics.append(
                    compile_error("parse.bad_indent", "unexpected indentation", token.span)
                )
                self._skip_block()
                continue
            if token.kind is TokenKind.DEDENT:
                self.advance()
                continue
            if token.kind is TokenKind.KEYWORD and token.text.startswith(REGION_MARKER_PREFIX):
                label = token.text[len(REGION_MARKER_PREFIX) :].strip()
                self.advance()
                if self.at(TokenKind.NEWLINE):
                    self.advance()
                if label not in REGION_LABELS:
                    self.diagnostics.append(
                        compile_error("parse.unknown_region", f"unknown region {label!r}", token.span)
                    )
                    continue
                close_region()
                seen = {r.label for r in regions}
                if label in seen:
                    self.diagnostics.append(
                        compile_error(
                            "parse.duplicate_region", f"region {label!r} declared twice", token.span
                        )
                    )
                    current_label = None
                    continue
                current_label = label
                continue
            try:
                statements.append(self.parse_statement())
            except _ParseFailure as failure:
                self.diagnostics.append(failure.diagnostic)
                self._synchronize()
        close_region()

        if not any(isinstance(s, ModelDecl) for s in statements):
            self.diagnostics.append(
                compile_error("parse.missing_model", "no model declaration", SourceSpan(1, 1, 0))
            )
        if self.diagnostics:
            return self.diagnostics
        return ScriptModule(tuple(statements), tuple(regions))

    def parse_statement_list(self) -> tuple[list[Statement], list[Diagnostic]]:
        """Parse a flat statement sequence (fragment mode: no regions, no
        required model declaration)."""
        statements: list[Statement] = []
        while not self.at(TokenKind.EOF) and len(self.diagnostics) < _MAX_DIAGNOSTICS:
            token = self.peek()
            if token.kind in (TokenKind.NEWLINE, TokenKind.DEDENT):
                self.advance()
                continue
            if token.kind is TokenKind.INDENT:
                self.diagnostics.append(
                    compile_error("parse.bad_indent", "unexpected indentation", token.span)
                )
                self._skip_block()
                continue
            if token.kind is TokenKind.KEYWORD and token.text.startswith(REGION_MARKER_PREFIX):
                self.advance()  # markers are ignorable in fragment mode
                continue
            try:
                statements.append(self.parse_statement())
            except _ParseFailure as failure:
                self.diagnostics.append(failure.diagnostic)
                self._synchronize()
        return statements, self.diagnostics

    # -- recovery --

    def _synchronize(self) -> None:
        depth = 0
        while not self.at(TokenKind.EOF):
            token = self.advance()
            if token.kind is TokenKind.INDENT:
                depth += 1
            elif token.kind is TokenKind.DEDENT:
                depth = max(0, depth - 1)
            elif token.kind is TokenKind.NEWLINE and depth == 0:
                return

    def _skip_block(self) -> None:
        depth = 0
        while not self.at(TokenKind.EOF):
            token = self.advance()
            if token.kind is TokenKind.INDENT:
                depth += 1
            elif token.kind is TokenKind.DEDENT:
                depth -= 1
                if depth <= 0:
                    return

    # -- statements --

    def parse_statement(self) -> Statement:
        token = self.peek()
        if token.kind is TokenKind.KEYWORD:
            if token.text == "map":
                return self.parse_map_decl()
            if token.text == "model":
                return self.parse_model_decl()
            if token.text == "param":
                return self.parse_param_decl()
            if token.text == "behavior":
                return self.parse_behavior_def()
            if token.text == "require":
                return self.parse_require()
            raise self.error(
                "parse.unexpected_token", f"cannot start a statement with {token.text!r}", token.span
            )
        if token.kind is TokenKind.IDENTIFIER:
            return self.parse_object_def()
        raise self.error(
            "parse.unexpected_token",
            f"expected a statement, got {token.text or token.kind.value!r}",
            token.span,
        )

    def parse_map_decl(self) -> MapDecl:
        span = self.expect(TokenKind.KEYWORD, "map").span
        name = unquote(self.expect(TokenKind.STRING).text)
        self._end_line()
        return MapDecl(name, span=span)

    def parse_model_decl(self) -> ModelDecl:
        span = self.expect(TokenKind.KEYWORD, "model").span
        name = self.expect(TokenKind.IDENTIFIER).text
        self._end_line()
        return ModelDecl(name, span=span)

    def parse_param_decl(self) -> ParamDecl:
        span = self.expect(TokenKind.KEYWORD, "param").span
        name = self.expect_name().text
        self.expect(TokenKind.OPERATOR, "=")
        value = self.parse_value()
        self._end_line()
        return ParamDecl(name, value, span=span)

    def parse_value(self) -> Value:
        token = self.peek()
        if token.kind is TokenKind.NUMBER:
            return float(self.advance().text)
        if token.kind is TokenKind.STRING:
            return unquote(self.advance().text)
        raise self.error("parse.unexpected_token", "expected a number or string value", token.span)

    def parse_behavior_def(self) -> BehaviorDef:
        span = self.expect(TokenKind.KEYWORD, "behavior").span
        name = self.expect(TokenKind.IDENTIFIER).text
        self.expect(TokenKind.OPERATOR, "(")
        params: list[BehaviorParam] = []
        if not self.at(TokenKind.OPERATOR, ")"):
            while True:
                pname = self.expect_name().text
                annotation = None
                if self.at(TokenKind.OPERATOR, ":"):
                    self.advance()
                    annotation = self.expect(TokenKind.IDENTIFIER).text
                params.append(BehaviorParam(pname, annotation))
                if self.at(TokenKind.OPERATOR, ","):
                    self.advance()
                    continue
                break
        self.expect(TokenKind.OPERATOR, ")")
        self.expect(TokenKind.OPERATOR, ":")
        self.expect(TokenKind.NEWLINE)
        body = self.parse_behavior_body()
        if not body:
            raise self.error("parse.empty_body", f"behavior {name!r} has an empty body", span)
        return BehaviorDef(name, tuple(params), tuple(body), span=span)

    def parse_behavior_body(self) -> list[ActionCall | InterruptClause]:
        if not self.at(TokenKind.INDENT):
            raise self.error("parse.bad_indent", "expected an indented behavior body")
        self.advance()
        items: list[ActionCall | InterruptClause] = []
        while not self.at(TokenKind.DEDENT) and not self.at(TokenKind.EOF):
            if self.at(TokenKind.NEWLINE):
                self.advance()
                continue
            if self.at(TokenKind.KEYWORD, "interrupt"):
                items.append(self.parse_interrupt())
            else:
                items.append(self.parse_action_call())
                self._end_line()
        if self.at(TokenKind.DEDENT):
            self.advance()
        return items

    def parse_interrupt(self) -> InterruptClause:
        span = self.expect(TokenKind.KEYWORD, "interrupt").span
        self.expect(TokenKind.KEYWORD, "when")
        condition = self.parse_condition()
        self.expect(TokenKind.OPERATOR, ":")
        self.expect(TokenKind.NEWLINE)
        if not self.at(TokenKind.INDENT):
            raise self.error("parse.bad_indent", "expected an indented interrupt body")
        self.advance()
        actions: list[ActionCall] = []
        while not self.at(TokenKind.DEDENT) and not self.at(TokenKind.EOF):
            if self.at(TokenKind.NEWLINE):
                self.advance()
                continue
            actions.append(self.parse_action_call())
            self._end_line()
        if self.at(TokenKind.DEDENT):
            self.advance()
        if not actions:
            raise self.error("parse.empty_body", "interrupt clause has an empty body", span)
        return InterruptClause(condition, tuple(actions), span=span)

    def parse_action_call(self) -> ActionCall:
        token = self.peek()
        if token.kind is not TokenKind.IDENTIFIER or token.text not in ACTION_NAMES:
            raise self.error(
                "parse.unknown_action",
                f"unknown action {token.text!r} (expected one of {', '.join(ACTION_NAMES)})",
                token.span,
            )
        span = self.advance().span
        self.expect(TokenKind.OPERATOR, "(")
        args = self.parse_args()
        self.expect(TokenKind.OPERATOR, ")")
        return ActionCall(token.text, tuple(args), span=span)

    def parse_args(self) -> list[Arg]:
        args: list[Arg] = []
        if self.at(TokenKind.OPERATOR, ")"):
            return args
        while True:
            token = self.peek()
            if token.kind is TokenKind.NUMBER:
                args.append(float(self.advance().text))
            elif token.kind is TokenKind.STRING:
                args.append(unquote(self.advance().text))
            elif token.kind is TokenKind.IDENTIFIER:
                args.append(Ref(self.advance().text))
            elif token.kind is TokenKind.KEYWORD and token.text in ("left", "right") + _NAME_KEYWORDS:
                args.append(Ref(self.advance().text))
            else:
                raise self.error("parse.unexpected_token", "expected an argument", token.span)
            if self.at(TokenKind.OPERATOR, ","):
                self.advance()
                continue
            return args

    def parse_require(self) -> RequireStmt:
        span = self.expect(TokenKind.KEYWORD, "require").span
        condition = self.parse_condition()
        self._end_line()
        return RequireStmt(condition, span=span)

    def parse_condition(self) -> Condition:
        token = self.peek()
        if token.kind is TokenKind.KEYWORD and token.text == "distance":
            self.advance()
            self.expect(TokenKind.OPERATOR, "(")
            a = self.expect(TokenKind.IDENTIFIER).text
            self.expect(TokenKind.OPERATOR, ",")
            b = self.expect(TokenKind.IDENTIFIER).text
            self.expect(TokenKind.OPERATOR, ")")
            op = self.parse_cmp()
            return DistanceCond(a, b, op, self.parse_rhs())
        if token.kind is TokenKind.KEYWORD and token.text == "signal":
            self.advance()
            self.expect(TokenKind.OPERATOR, "(")
            index = self.parse_int("signal index")
            self.expect(TokenKind.OPERATOR, ")")
            self.expect(TokenKind.KEYWORD, "is")
            state = self.expect(TokenKind.IDENTIFIER)
            if state.text not in _SIGNAL_STATES:
                raise self.error(
                    "parse.unexpected_token",
                    f"unknown signal state {state.text!r}",
                    state.span,
                )
            return SignalCond(index, state.text)
        if token.kind is TokenKind.IDENTIFIER:
            name = self.advance().text
            if self.at(TokenKind.OPERATOR, "."):
                self.advance()
                self.expect(TokenKind.KEYWORD, "speed")
                op = self.parse_cmp()
                return SpeedCond(name, op, self.parse_rhs())
            if self.at(TokenKind.KEYWORD, "on"):
                self.advance()
                self.expect(TokenKind.KEYWORD, "lane")
                self.expect(TokenKind.OPERATOR, "(")
                index = self.parse_int("lane index")
                self.expect(TokenKind.OPERATOR, ")")
                return LaneCond(name, index)
            raise self.error("parse.unexpected_token", "expected '.speed' or 'on lane(...)'")
        raise self.error("parse.unexpected_token", "expected a condition", token.span)

    def parse_cmp(self) -> str:
        token = self.peek()
        if token.kind is TokenKind.OPERATOR and token.text in _CMP_OPS:
            return self.advance().text
        raise self.error("parse.unexpected_token", "expected a comparison operator", token.span)

    def parse_rhs(self) -> float | Ref:
        token = self.peek()
        if token.kind is TokenKind.NUMBER:
            return float(self.advance().text)
        if token.kind is TokenKind.IDENTIFIER or (
            token.kind is TokenKind.KEYWORD and token.text in _NAME_KEYWORDS
        ):
            return Ref(self.advance().text)
        raise self.error("parse.unexpected_token", "expected a number or parameter name", token.span)

    def parse_int(self, what: str) -> int:
        token = self.expect(TokenKind.NUMBER)
        value = float(token.text)
        if not value.is_integer() or value < 0:
            raise self.error(
                "parse.unexpected_token", f"{what} must be a non-negative integer", token.span
            )
        return int(value)

    def parse_object_def(self) -> ObjectDef:
        name_token = self.expect(TokenKind.IDENTIFIER)
        self.expect(TokenKind.OPERATOR, "=")
        self.expect(TokenKind.KEYWORD, "new")
        kind_token = self.expect(TokenKind.IDENTIFIER)
        kind = _KIND_BY_NAME.get(kind_token.text)
        if kind is None:
            raise self.error(
                "parse.bad_kind",
                f"unknown object kind {kind_token.text!r} (expected one of {', '.join(_KIND_BY_NAME)})",
                kind_token.span,
            )
        placement = self.parse_placement()
        behavior_ref: BehaviorRef | None = None
        attributes: list[tuple[str, Value]] = []
        while self.at(TokenKind.OPERATOR, ","):
            self.advance()
            self.expect(TokenKind.KEYWORD, "with")
            if self.at(TokenKind.KEYWORD, "behavior"):
                self.advance()
                bname = self.expect(TokenKind.IDENTIFIER).text
                self.expect(TokenKind.OPERATOR, "(")
                args = self.parse_args()
                self.expect(TokenKind.OPERATOR, ")")
                if behavior_ref is not None:
                    raise self.error(
                        "parse.unexpected_token", "object declares two behaviors", name_token.span
                    )
                behavior_ref = BehaviorRef(bname, tuple(args))
            elif self.at(TokenKind.KEYWORD, "speed"):
                self.advance()
                attributes.append(("speed", self.parse_value()))
            else:
                attr = self.expect(TokenKind.IDENTIFIER).text
                attributes.append((attr, self.parse_value()))
        self._end_line()
        return ObjectDef(
            name_token.text,
            kind,
            placement,
            behavior_ref=behavior_ref,
            attributes=tuple(attributes),
            span=name_token.span,
        )

    def parse_placement(self) -> PlacementExpr:
        token = self.peek()
        if token.kind is TokenKind.KEYWORD and token.text == "at":
            self.advance()
            self.expect(TokenKind.OPERATOR, "(")
            x = float(self.expect(TokenKind.NUMBER).text)
            self.expect(TokenKind.OPERATOR, ",")
            y = float(self.expect(TokenKind.NUMBER).text)
            self.expect(TokenKind.OPERATOR, ")")
            heading = self.parse_facing()
            return PlacementExpr(Anchor.ABSOLUTE_POINT, x=x, y=y, heading=heading)
        if token.kind is TokenKind.KEYWORD and token.text == "on":
            self.advance()
            self.expect(TokenKind.KEYWORD, "lane")
            self.expect(TokenKind.OPERATOR, "(")
            index = self.parse_int("lane index")
            self.expect(TokenKind.OPERATOR, ")")
            at_s = None
            if self.at(TokenKind.KEYWORD, "at"):
                self.advance()
                at_s = float(self.expect(TokenKind.NUMBER).text)
            heading = self.parse_facing()
            return PlacementExpr(Anchor.ON_LANE, lane_index=index, at_s=at_s, heading=heading)
        if token.kind is TokenKind.KEYWORD and token.text in ("ahead", "behind", "left", "right"):
            word = self.advance().text
            if word != "behind":
                self.expect(TokenKind.KEYWORD, "of")
            relation = {
                "ahead": Relation.AHEAD_OF,
                "behind": Relation.BEHIND,
                "left": Relation.LEFT_OF,
                "right": Relation.RIGHT_OF,
            }[word]
            reference = self.expect(TokenKind.IDENTIFIER).text
            self.expect(TokenKind.KEYWORD, "by")
            dist_token = self.expect(TokenKind.NUMBER)
            distance = float(dist_token.text)
            if distance <= 0:
                raise self.error(
                    "parse.bad_distance", "placement distance must be > 0", dist_token.span
                )
            heading = self.parse_facing()
            return PlacementExpr(
                Anchor.RELATIVE,
                relation=relation,
                reference=reference,
                distance=distance,
                heading=heading,
            )
        raise self.error(
            "parse.missing_placement",
            "object needs a placement ('at(x, y)', 'on lane(i)', or a relative clause)",
            token.span,
        )

    def parse_facing(self) -> float | None:
        if self.at(TokenKind.KEYWORD, "facing"):
            self.advance()
            return float(self.expect(TokenKind.NUMBER).text)
        return None

    def _end_line(self) -> None:
        if self.at(TokenKind.EOF):
            return
        self.expect(TokenKind.NEWLINE)


def parse(tokens: list[Token]) -> ScriptModule | list[Diagnostic]:
    return Parser(tokens).parse_program()


def compile_source(source: str) -> tuple[ScriptModule | None, list[Diagnostic]]:
    """Lex + parse. Returns (module, []) on success or (None, diagnostics)."""
    tokens = tokenize(source)
    if isinstance(tokens, Diagnostic):
        return None, [tokens]
    result = parse(tokens)
    if isinstance(result, ScriptModule):
        return result, []
    return None, result
