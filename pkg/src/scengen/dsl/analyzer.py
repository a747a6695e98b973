"""Semantic checks run after parsing, before execution.

All findings are returned (never raised); an empty list means the module
passed the compile gate.
"""

from __future__ import annotations

from collections.abc import Iterable, Set

from .ast import (
    BUILTIN_BEHAVIORS,
    BehaviorDef,
    Condition,
    DistanceCond,
    InterruptClause,
    LaneCond,
    MapDecl,
    ObjectDef,
    Ref,
    ScriptModule,
    SpeedCond,
)
from .diagnostics import Diagnostic, SourceSpan, compile_error


def analyze(module: ScriptModule, map_catalog: Set[str]) -> list[Diagnostic]:
    diagnostics: list[Diagnostic] = []
    object_names = [obj.name for obj in module.objects]
    object_set = set(object_names)
    behavior_defs = {b.name: b for b in module.behaviors}
    param_names = {p.name for p in module.params}

    seen: set[str] = set()
    for obj in module.objects:
        if obj.name in seen:
            diagnostics.append(
                compile_error("sem.duplicate_name", f"object {obj.name!r} declared twice", obj.span)
            )
        seen.add(obj.name)
    seen_behaviors: set[str] = set()
    for bdef in module.behaviors:
        if bdef.name in seen_behaviors:
            diagnostics.append(
                compile_error(
                    "sem.duplicate_name", f"behavior {bdef.name!r} declared twice", bdef.span
                )
            )
        seen_behaviors.add(bdef.name)

    if "ego" not in object_set:
        diagnostics.append(
            compile_error("sem.missing_ego", "script declares no object named 'ego'", SourceSpan(1, 1, 0))
        )

    for stmt in module.statements:
        if isinstance(stmt, MapDecl) and stmt.name not in map_catalog:
            diagnostics.append(
                compile_error("sem.unknown_map", f"unknown map {stmt.name!r}", stmt.span)
            )

    for obj in module.objects:
        if obj.placement.reference is not None:
            ref = obj.placement.reference
            if ref not in object_set or ref == obj.name:
                diagnostics.append(
                    compile_error(
                        "sem.undefined_object",
                        f"placement of {obj.name!r} references undefined object {ref!r}",
                        obj.span,
                    )
                )
        if obj.behavior_ref is not None:
            name = obj.behavior_ref.name
            if name not in behavior_defs and name not in BUILTIN_BEHAVIORS:
                diagnostics.append(
                    compile_error(
                        "sem.undefined_behavior",
                        f"object {obj.name!r} references undefined behavior {name!r}",
                        obj.span,
                    )
                )
            else:
                arity = (
                    len(behavior_defs[name].params)
                    if name in behavior_defs
                    else BUILTIN_BEHAVIORS[name]
                )
                if len(obj.behavior_ref.args) != arity:
                    diagnostics.append(
                        compile_error(
                            "sem.bad_arity",
                            f"behavior {name!r} takes {arity} argument(s), got {len(obj.behavior_ref.args)}",
                            obj.span,
                        )
                    )
            if obj.name == "ego" and name in behavior_defs:
                diagnostics.append(
                    compile_error(
                        "sem.ego_behavior",
                        "ego may only use built-in behaviors, not a scripted adversarial one",
                        obj.span,
                    )
                )

    for stmt in module.requirements:
        diagnostics.extend(
            _check_condition(stmt.condition, object_set, param_names, stmt.span, in_behavior=False)
        )

    for bdef in module.behaviors:
        local = param_names | {p.name for p in bdef.params}
        for item in bdef.body:
            if isinstance(item, InterruptClause):
                diagnostics.extend(
                    _check_condition(item.condition, object_set, local, item.span, in_behavior=True)
                )
                for action in item.actions:
                    diagnostics.extend(_check_action_refs(action.args, local, action.span))
            else:
                diagnostics.extend(_check_action_refs(item.args, local, item.span))

    return diagnostics


def _check_condition(
    condition: Condition,
    objects: Set[str],
    params: Set[str],
    span: SourceSpan,
    in_behavior: bool,
) -> list[Diagnostic]:
    diagnostics: list[Diagnostic] = []
    allowed = set(objects) | ({"self"} if in_behavior else set())

    def check_obj(name: str) -> None:
        if name not in allowed:
            diagnostics.append(
                compile_error(
                    "sem.undefined_object", f"condition references undefined object {name!r}", span
                )
            )

    if isinstance(condition, SpeedCond):
        check_obj(condition.obj)
        rhs: object = condition.rhs
    elif isinstance(condition, DistanceCond):
        check_obj(condition.a)
        check_obj(condition.b)
        rhs = condition.rhs
    elif isinstance(condition, LaneCond):
        check_obj(condition.obj)
        rhs = None
    else:
        rhs = None
    if isinstance(rhs, Ref) and rhs.name not in params:
        diagnostics.append(
            compile_error(
                "sem.undefined_param", f"condition references undefined parameter {rhs.name!r}", span
            )
        )
    return diagnostics


def _check_action_refs(
    args: Iterable[object], params: Set[str], span: SourceSpan
) -> list[Diagnostic]:
    diagnostics: list[Diagnostic] = []
    for arg in args:
        if isinstance(arg, Ref) and arg.name not in params and arg.name not in ("left", "right"):
            diagnostics.append(
                compile_error(
                    "sem.undefined_param", f"action references undefined parameter {arg.name!r}", span
                )
            )
    return diagnostics
