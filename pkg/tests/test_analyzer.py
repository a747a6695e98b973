"""Semantic analyzer tests: the five mechanical fault classes plus corpus
cleanliness."""

import pytest

from scengen.dsl.analyzer import analyze
from scengen.dsl.parser import compile_source

CATALOG = {"straight2", "t_junction", "fourway_signal"}

PASSING = """\
model basic
map "straight2"
behavior Cut(speed):
    follow_lane(speed)
    lane_change(right)
ego = new Car on lane(0) at 30, with behavior FollowLane(9)
adv = new Car on lane(1) at 40, with behavior Cut(11)
require distance(ego, adv) > 0.1
"""


def _analyze(source: str):
    module, diagnostics = compile_source(source)
    assert diagnostics == [], diagnostics
    return analyze(module, CATALOG)


def test_passing_script_clean():
    assert _analyze(PASSING) == []


def test_corpus_analyzes_clean(corpus):
    for name, source in corpus.items():
        module, parse_diags = compile_source(source)
        assert parse_diags == [], name
        assert analyze(module, CATALOG) == [], name


# The five seeded fault classes, each injected mechanically into PASSING.

def test_fault_undefined_behavior():
    source = PASSING + "ghost = new Car on lane(1) at 80, with behavior FollowGhost(1)\n"
    diagnostics = _analyze(source)
    assert any(d.code == "sem.undefined_behavior" for d in diagnostics)


def test_fault_undefined_object():
    source = PASSING + "tail = new Car behind phantom by 5\n"
    diagnostics = _analyze(source)
    assert any(d.code == "sem.undefined_object" for d in diagnostics)


def test_fault_unknown_map():
    source = PASSING.replace('map "straight2"', 'map "atlantis"')
    diagnostics = _analyze(source)
    assert any(d.code == "sem.unknown_map" for d in diagnostics)


def test_fault_duplicate_name():
    source = PASSING + "adv = new Car on lane(1) at 90\n"
    diagnostics = _analyze(source)
    assert any(d.code == "sem.duplicate_name" for d in diagnostics)


def test_fault_missing_ego():
    source = PASSING.replace("ego = new Car on lane(0) at 30, with behavior FollowLane(9)\n", "")
    diagnostics = _analyze(source)
    assert any(d.code == "sem.missing_ego" for d in diagnostics)


@pytest.mark.parametrize(
    "fault, code",
    [
        ("ghost = new Car on lane(1) at 80, with behavior FollowGhost(1)\n", "sem.undefined_behavior"),
        ("tail = new Car behind phantom by 5\n", "sem.undefined_object"),
        ("adv = new Car on lane(1) at 90\n", "sem.duplicate_name"),
    ],
)
def test_single_fault_yields_matching_code_only(fault, code):
    diagnostics = _analyze(PASSING + fault)
    assert [d.code for d in diagnostics] == [code]


def test_arity_mismatch():
    source = PASSING.replace("with behavior Cut(11)", "with behavior Cut(11, 3)")
    diagnostics = _analyze(source)
    assert any(d.code == "sem.bad_arity" for d in diagnostics)


def test_ego_with_scripted_behavior_flagged():
    source = PASSING.replace("with behavior FollowLane(9)", "with behavior Cut(9)")
    diagnostics = _analyze(source)
    assert any(d.code == "sem.ego_behavior" for d in diagnostics)


def test_interrupt_condition_undefined_object():
    source = """\
model basic
behavior B(speed):
    follow_lane(speed)
    interrupt when distance(self, wraith) < 5:
        brake(0.5)
ego = new Car on lane(0), with behavior FollowLane(8)
adv = new Car on lane(1), with behavior B(9)
"""
    diagnostics = _analyze(source)
    assert any(d.code == "sem.undefined_object" for d in diagnostics)


def test_interrupt_condition_accepts_self_and_params():
    source = """\
model basic
param gap = 6
behavior B(speed):
    follow_lane(speed)
    interrupt when distance(self, ego) < gap:
        brake(0.5)
ego = new Car on lane(0), with behavior FollowLane(8)
adv = new Car on lane(1), with behavior B(9)
"""
    assert _analyze(source) == []


def test_undefined_action_param():
    source = """\
model basic
behavior B(speed):
    follow_lane(velocity)
ego = new Car on lane(0), with behavior FollowLane(8)
adv = new Car on lane(1), with behavior B(9)
"""
    diagnostics = _analyze(source)
    assert any(d.code == "sem.undefined_param" for d in diagnostics)


def test_diagnostics_do_not_abort():
    source = PASSING.replace('map "straight2"', 'map "atlantis"') + (
        "ghost = new Car on lane(1) at 80, with behavior FollowGhost(1)\n"
        "adv = new Car on lane(1) at 90\n"
    )
    diagnostics = _analyze(source)
    codes = {d.code for d in diagnostics}
    assert {"sem.unknown_map", "sem.undefined_behavior", "sem.duplicate_name"} <= codes
