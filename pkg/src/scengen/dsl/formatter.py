"""Canonical formatter: byte-deterministic rendering of ScriptModule ASTs.

Round-trip contract: parsing the formatted text yields a structurally equal
module, and formatting is idempotent.
"""

from __future__ import annotations

from .ast import (
    ActionCall,
    Anchor,
    Arg,
    BehaviorDef,
    Condition,
    DistanceCond,
    InterruptClause,
    LaneCond,
    MapDecl,
    ModelDecl,
    ObjectDef,
    ParamDecl,
    Ref,
    Relation,
    RequireStmt,
    ScriptModule,
    SignalCond,
    SpeedCond,
    Statement,
    Value,
)
from .lexer import quote

_INDENT = "    "


def format_number(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def _format_value(value: Value) -> str:
    if isinstance(value, str):
        return quote(value)
    return format_number(value)


def _format_arg(arg: Arg) -> str:
    if isinstance(arg, Ref):
        return arg.name
    return _format_value(arg)


def _format_args(args: tuple[Arg, ...]) -> str:
    return ", ".join(_format_arg(a) for a in args)


def format_condition(condition: Condition) -> str:
    if isinstance(condition, SpeedCond):
        return f"{condition.obj}.speed {condition.op} {_format_arg(condition.rhs)}"
    if isinstance(condition, DistanceCond):
        return (
            f"distance({condition.a}, {condition.b}) {condition.op} {_format_arg(condition.rhs)}"
        )
    if isinstance(condition, LaneCond):
        return f"{condition.obj} on lane({condition.lane_index})"
    if isinstance(condition, SignalCond):
        return f"signal({condition.signal_index}) is {condition.state}"
    raise TypeError(f"unknown condition {condition!r}")


def _format_placement(obj: ObjectDef) -> str:
    p = obj.placement
    if p.anchor is Anchor.ABSOLUTE_POINT:
        text = f"at({format_number(p.x)}, {format_number(p.y)})"
    elif p.anchor is Anchor.ON_LANE:
        text = f"on lane({p.lane_index})"
        if p.at_s is not None:
            text += f" at {format_number(p.at_s)}"
    else:
        text = f"{p.relation.value} {p.reference} by {format_number(p.distance)}"
    if p.heading is not None:
        text += f" facing {format_number(p.heading)}"
    return text


def _format_object(obj: ObjectDef) -> str:
    parts = [f"{obj.name} = new {obj.kind.value} {_format_placement(obj)}"]
    if obj.behavior_ref is not None:
        parts.append(f"with behavior {obj.behavior_ref.name}({_format_args(obj.behavior_ref.args)})")
    for attr, value in obj.attributes:
        parts.append(f"with {attr} {_format_value(value)}")
    return ", ".join(parts)


def _format_behavior(bdef: BehaviorDef) -> list[str]:
    params = ", ".join(
        p.name if p.annotation is None else f"{p.name}: {p.annotation}" for p in bdef.params
    )
    lines = [f"behavior {bdef.name}({params}):"]
    for item in bdef.body:
        if isinstance(item, InterruptClause):
            lines.append(f"{_INDENT}interrupt when {format_condition(item.condition)}:")
            for action in item.actions:
                lines.append(f"{_INDENT * 2}{action.name}({_format_args(action.args)})")
        else:
            lines.append(f"{_INDENT}{item.name}({_format_args(item.args)})")
    return lines


def format_statement(stmt: Statement) -> list[str]:
    if isinstance(stmt, MapDecl):
        return [f"map {quote(stmt.name)}"]
    if isinstance(stmt, ModelDecl):
        return [f"model {stmt.name}"]
    if isinstance(stmt, ParamDecl):
        return [f"param {stmt.name} = {_format_value(stmt.value)}"]
    if isinstance(stmt, BehaviorDef):
        return _format_behavior(stmt)
    if isinstance(stmt, ObjectDef):
        return [_format_object(stmt)]
    if isinstance(stmt, RequireStmt):
        return [f"require {format_condition(stmt.condition)}"]
    raise TypeError(f"unknown statement {stmt!r}")


def format_module(module: ScriptModule) -> str:
    lines: list[str] = []
    covered: set[int] = set()
    for region in module.regions:
        covered.update(range(region.start, region.end))
    # Statements outside every region (hand-built modules) come first.
    for index, stmt in enumerate(module.statements):
        if index not in covered:
            lines.extend(format_statement(stmt))
    for region in module.regions:
        lines.append(f"#-- region: {region.label}")
        for stmt in module.statements[region.start : region.end]:
            lines.extend(format_statement(stmt))
        lines.append("")
    while lines and lines[-1] == "":
        lines.pop()
    return "\n".join(lines) + "\n"
