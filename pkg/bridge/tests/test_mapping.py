"""Error-mapping table tests: Scenic/CARLA error strings to stable codes."""

import pytest

from carla_bridge.mapping import map_compile_error, map_execute_error, status_for_execute_code


@pytest.mark.parametrize(
    "text, code",
    [
        ("InvalidScenarioError: no model statement found", "parse.missing_model"),
        ("ScenicSyntaxError: invalid syntax (line 3)", "parse.unexpected_token"),
        ("SyntaxError: unexpected EOF", "parse.unexpected_token"),
        ("IndentationError: unexpected indent (line 7)", "parse.bad_indent"),
        ("NameError: name 'ghostCar' is not defined", "sem.undefined_object"),
        ("behavior 'CutIn' is not defined", "sem.undefined_behavior"),
        ("object 'adv' is already defined", "sem.duplicate_name"),
        ("unknown town 'Town99'", "sem.unknown_map"),
        ("ego is not defined in the scenario", "sem.missing_ego"),
    ],
)
def test_compile_mapping(text, code):
    diagnostic = map_compile_error(text)
    assert diagnostic.code == code
    assert diagnostic.phase == "compile"
    assert diagnostic.line >= 1


def test_compile_mapping_extracts_line():
    diagnostic = map_compile_error("ScenicSyntaxError: bad token (line 12)")
    assert diagnostic.line == 12


def test_name_error_refined_by_usage_site():
    source = "model basic\nadv = new Car on lane(0), with behavior Ghost(9)\n"
    diagnostic = map_compile_error("NameError: name 'Ghost' is not defined (line 2)", source)
    assert diagnostic.code == "sem.undefined_behavior"
    diagnostic = map_compile_error("NameError: name 'phantom' is not defined", source)
    assert diagnostic.code == "sem.undefined_object"


@pytest.mark.parametrize(
    "text, code, status",
    [
        ("RejectionException: failed to sample scene", "exec.spawn_exhausted", "spawn_failure"),
        ("requirement (ego.speed > 0) falsified", "exec.require_failed", "requirement_violation"),
        ("RuntimeError: actor destroyed", "exec.behavior_error", "runtime_error"),
        ("CARLA server timeout in tick", "exec.behavior_error", "runtime_error"),
    ],
)
def test_execute_mapping(text, code, status):
    diagnostic = map_execute_error(text)
    assert diagnostic.code == code
    assert diagnostic.phase == "execute"
    assert diagnostic.trace  # execute diagnostics always carry a trace
    assert status_for_execute_code(diagnostic.code) == status


def test_wire_shape_of_diagnostics():
    compile_diag = map_compile_error("SyntaxError: x (line 4)")
    wire = compile_diag.to_wire()
    assert wire["span"]["line"] == 4
    assert "trace" not in wire
    execute_diag = map_execute_error("RuntimeError: boom", trace=("frame a", "tick 3"))
    wire = execute_diag.to_wire()
    assert wire["trace"] == ["frame a", "tick 3"]
    assert "span" not in wire
