"""Indentation-aware lexer for the scenario DSL.

Line oriented: blank lines and ordinary ``#`` comments vanish, region marker
lines (``#-- region: <label>``) survive as keyword tokens so the parser can
assign statements to regions. Indentation produces balanced INDENT/DEDENT
tokens; the stream always ends with exactly one EOF.
"""

from __future__ import annotations

from .diagnostics import Diagnostic, SourceSpan, compile_error
from .tokens import KEYWORDS, REGION_MARKER_PREFIX, Token, TokenKind

_OPERATOR_STARTS = "=(),.:<>"
_TWO_CHAR_OPS = (">=", "<=")


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def tokenize(source: str) -> list[Token] | Diagnostic:
    """Lex ``source`` into tokens, or return a single diagnostic on the first
    byte outside the DSL alphabet."""
    tokens: list[Token] = []
    indent_stack = [0]

    for line_no, raw_line in enumerate(source.split("\n"), start=1):
        line = raw_line.rstrip()
        # Measure indentation (tab counts as 4 columns).
        pos = 0
        indent = 0
        while pos < len(line) and line[pos] in " \t":
            indent += 4 if line[pos] == "\t" else 1
            pos += 1
        if pos >= len(line):
            continue  # blank line

        if line[pos] == "#" and not line[pos:].startswith(REGION_MARKER_PREFIX):
            continue  # comment-only line

        _apply_indent(tokens, indent_stack, indent, line_no)

        if line[pos] == "#":  # region marker line, kept verbatim
            marker = line[pos:]
            tokens.append(
                Token(TokenKind.KEYWORD, marker, SourceSpan(line_no, pos + 1, len(marker)))
            )
            tokens.append(Token(TokenKind.NEWLINE, "\n", SourceSpan(line_no, len(line) + 1, 0)))
            continue

        while pos < len(line):
            ch = line[pos]
            if ch in " \t":
                pos += 1
                continue
            if ch == "#":  # trailing comment
                break
            col = pos + 1
            if _is_ident_start(ch):
                end = pos
                while end < len(line) and _is_ident_char(line[end]):
                    end += 1
                text = line[pos:end]
                kind = TokenKind.KEYWORD if text in KEYWORDS else TokenKind.IDENTIFIER
                tokens.append(Token(kind, text, SourceSpan(line_no, col, len(text))))
                pos = end
            elif ch.isdigit() or (ch == "-" and pos + 1 < len(line) and line[pos + 1].isdigit()):
                end = pos + 1
                seen_dot = False
                while end < len(line) and (line[end].isdigit() or (line[end] == "." and not seen_dot)):
                    if line[end] == ".":
                        # A dot must be followed by a digit to belong to the number.
                        if end + 1 >= len(line) or not line[end + 1].isdigit():
                            break
                        seen_dot = True
                    end += 1
                text = line[pos:end]
                tokens.append(Token(TokenKind.NUMBER, text, SourceSpan(line_no, col, len(text))))
                pos = end
            elif ch == '"':
                result = _lex_string(line, line_no, pos)
                if isinstance(result, Diagnostic):
                    return result
                token, pos = result
                tokens.append(token)
            elif ch in _OPERATOR_STARTS:
                text = line[pos : pos + 2]
                if text not in _TWO_CHAR_OPS:
                    text = ch
                tokens.append(Token(TokenKind.OPERATOR, text, SourceSpan(line_no, col, len(text))))
                pos += len(text)
            else:
                return compile_error(
                    "lex.illegal_char",
                    f"illegal character {ch!r}",
                    SourceSpan(line_no, col, 1),
                )
        tokens.append(Token(TokenKind.NEWLINE, "\n", SourceSpan(line_no, len(line) + 1, 0)))

    last_line = source.count("\n") + 1
    while len(indent_stack) > 1:
        indent_stack.pop()
        tokens.append(Token(TokenKind.DEDENT, "", SourceSpan(last_line, 1, 0)))
    tokens.append(Token(TokenKind.EOF, "", SourceSpan(last_line, 1, 0)))
    return tokens


def _apply_indent(
    tokens: list[Token], indent_stack: list[int], indent: int, line_no: int
) -> None:
    """Emit INDENT/DEDENT tokens. Tolerant: a dedent to a level that was never
    pushed pops past it and re-indents, keeping the stream balanced; the parser
    reports the structural error."""
    current = indent_stack[-1]
    if indent > current:
        indent_stack.append(indent)
        tokens.append(Token(TokenKind.INDENT, "", SourceSpan(line_no, 1, 0)))
        return
    while indent < indent_stack[-1]:
        indent_stack.pop()
        tokens.append(Token(TokenKind.DEDENT, "", SourceSpan(line_no, 1, 0)))
    if indent > indent_stack[-1]:
        indent_stack.append(indent)
        tokens.append(Token(TokenKind.INDENT, "", SourceSpan(line_no, 1, 0)))


def _lex_string(line: str, line_no: int, pos: int) -> tuple[Token, int] | Diagnostic:
    col = pos + 1
    end = pos + 1
    while end < len(line):
        if line[end] == "\\":
            end += 2
            continue
        if line[end] == '"':
            text = line[pos : end + 1]
            return Token(TokenKind.STRING, text, SourceSpan(line_no, col, len(text))), end + 1
        end += 1
    return compile_error(
        "lex.unterminated_string", "unterminated string literal", SourceSpan(line_no, col, 1)
    )


def unquote(text: str) -> str:
    """Decode a STRING token's text to its value."""
    body = text[1:-1]
    out: list[str] = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body):
            nxt = body[i + 1]
            out.append({"n": "\n", "t": "\t"}.get(nxt, nxt))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def quote(value: str) -> str:
    """Encode a string value as a STRING token text."""
    escaped = value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{escaped}"'
