"""Translation of Scenic/CARLA error strings into the stable diagnostic code
taxonomy the repair loop consumes.

The table is ordered; the first pattern that matches the error text wins.
Unmatched compile errors fall back to parse.unexpected_token, unmatched
execution errors to exec.behavior_error.
"""

from __future__ import annotations

import re

from .wire import DiagnosticRecord

# (regex over the error text, diagnostic code)
COMPILE_MAP: tuple[tuple[str, str], ...] = (
    (r"no model statement|model declaration required", "parse.missing_model"),
    (r"indentation|IndentationError", "parse.bad_indent"),
    (r"behavior '?\w+'? is not defined|NameError: name '\w*[Bb]ehavior\w*'", "sem.undefined_behavior"),
    (r"NameError", "sem.undefined_object"),
    (r"is already defined|duplicate", "sem.duplicate_name"),
    (r"no map|unknown town|map file", "sem.unknown_map"),
    (r"ego is not defined|no ego", "sem.missing_ego"),
    (r"ScenicSyntaxError|SyntaxError|ParseError", "parse.unexpected_token"),
)

EXECUTE_MAP: tuple[tuple[str, str], ...] = (
    (r"RejectionException|failed to sample|rejected sample", "exec.spawn_exhausted"),
    (r"requirement .* falsified|GuardViolation|require", "exec.require_failed"),
    (r"off.?road|OffRoad", "exec.off_road"),
    (r".*", "exec.behavior_error"),
)

_LINE_RE = re.compile(r"line (\d+)")
_NAME_RE = re.compile(r"name '(\w+)'")


def map_compile_error(text: str, source: str | None = None) -> DiagnosticRecord:
    code = "parse.unexpected_token"
    for pattern, candidate in COMPILE_MAP:
        if re.search(pattern, text):
            code = candidate
            break
    if code == "sem.undefined_object" and source is not None:
        # A bare NameError does not say what kind of name is missing; the
        # usage site in the script does.
        named = _NAME_RE.search(text)
        if named and re.search(rf"with behavior {named.group(1)}\(", source):
            code = "sem.undefined_behavior"
    match = _LINE_RE.search(text)
    line = int(match.group(1)) if match else 1
    return DiagnosticRecord(phase="compile", code=code, message=text, line=line, column=1)


def map_execute_error(text: str, trace: tuple[str, ...] = ()) -> DiagnosticRecord:
    code = "exec.behavior_error"
    for pattern, candidate in EXECUTE_MAP:
        if re.search(pattern, text):
            code = candidate
            break
    return DiagnosticRecord(
        phase="execute",
        code=code,
        message=text,
        trace=trace or (text.splitlines()[0],),
    )


def status_for_execute_code(code: str) -> str:
    if code == "exec.spawn_exhausted":
        return "spawn_failure"
    if code == "exec.require_failed":
        return "requirement_violation"
    return "runtime_error"
