"""Parser tests: grammar coverage, diagnostics, and token-level mutation
fuzzing over the seed corpus (the parser must never crash)."""

import random

from hypothesis import given, settings
from hypothesis import strategies as st

from scengen.dsl.ast import Anchor, ObjectKind, Relation, ScriptModule
from scengen.dsl.diagnostics import Diagnostic
from scengen.dsl.lexer import tokenize
from scengen.dsl.parser import Parser, compile_source, parse

MINIMAL = "model basic\nego = new Car on lane(0)\n"


def test_minimal_script():
    module, diagnostics = compile_source(MINIMAL)
    assert diagnostics == []
    assert len(module.objects) == 1
    assert len(module.behaviors) == 0
    assert module.objects[0].name == "ego"
    assert module.objects[0].kind is ObjectKind.CAR
    assert module.objects[0].placement.anchor is Anchor.ON_LANE


def test_missing_model_diagnostic():
    module, diagnostics = compile_source("ego = new Car on lane(0)\n")
    assert module is None
    assert any(d.code == "parse.missing_model" for d in diagnostics)


def test_statements_before_marker_form_defaults_region():
    module, _ = compile_source(MINIMAL)
    assert [r.label for r in module.regions] == ["defaults"]
    assert module.regions[0].start == 0
    assert module.regions[0].end == 2


def test_every_statement_in_exactly_one_region(corpus):
    for name, source in corpus.items():
        module, diagnostics = compile_source(source)
        assert module is not None, (name, diagnostics)
        covered = []
        for region in module.regions:
            covered.extend(range(region.start, region.end))
        assert sorted(covered) == list(range(len(module.statements))), name
        assert len(covered) == len(set(covered)), name
        labels = [r.label for r in module.regions]
        assert len(labels) == len(set(labels)), name


def test_duplicate_region_diagnostic():
    source = "#-- region: geometry\n#-- region: geometry\nmodel basic\n"
    module, diagnostics = compile_source(source)
    assert module is None
    assert any(d.code == "parse.duplicate_region" for d in diagnostics)


def test_unknown_region_diagnostic():
    source = "#-- region: nonsense\nmodel basic\nego = new Car on lane(0)\n"
    module, diagnostics = compile_source(source)
    assert module is None
    assert any(d.code == "parse.unknown_region" for d in diagnostics)


def test_bad_indent_diagnostic():
    source = "model basic\n    ego = new Car on lane(0)\n"
    module, diagnostics = compile_source(source)
    assert module is None
    assert any(d.code == "parse.bad_indent" for d in diagnostics)


def test_unknown_action_diagnostic():
    source = "model basic\nbehavior B():\n    teleport(3)\nego = new Car on lane(0)\n"
    module, diagnostics = compile_source(source)
    assert any(d.code == "parse.unknown_action" for d in diagnostics)


def test_negative_relative_distance_rejected():
    source = "model basic\nego = new Car on lane(0)\nadv = new Car ahead of ego by -5\n"
    module, diagnostics = compile_source(source)
    assert module is None
    assert any(d.code == "parse.bad_distance" for d in diagnostics)


def test_relative_placement_fields():
    source = "model basic\nego = new Car on lane(0)\nadv = new Car ahead of ego by 7.5\n"
    module, diagnostics = compile_source(source)
    assert diagnostics == []
    placement = module.objects[1].placement
    assert placement.anchor is Anchor.RELATIVE
    assert placement.relation is Relation.AHEAD_OF
    assert placement.reference == "ego"
    assert placement.distance == 7.5


def test_multiple_diagnostics_reported():
    source = "model basic\nego = new Spaceship on lane(0)\nadv = new Car ahead of ego by -1\n"
    module, diagnostics = compile_source(source)
    assert module is None
    assert len(diagnostics) >= 2


def test_diagnostic_spans_within_source_bounds(corpus):
    rng = random.Random(5)
    for name, source in corpus.items():
        broken = _mutate_source(source, rng)
        module, diagnostics = compile_source(broken)
        lines = broken.split("\n")
        for diagnostic in diagnostics:
            assert diagnostic.span is not None
            assert 1 <= diagnostic.span.line <= len(lines) + 1, name
            assert diagnostic.span.column >= 1


def _mutate_source(source: str, rng: random.Random) -> str:
    lines = source.split("\n")
    index = rng.randrange(len(lines))
    lines[index] = lines[index][: max(0, len(lines[index]) - 3)]
    return "\n".join(lines)


def test_token_deletion_fuzz_never_crashes(corpus):
    """Delete one token at every position of every corpus script; parse must
    return a module or diagnostics."""
    total = 0
    for source in corpus.values():
        tokens = tokenize(source)
        assert isinstance(tokens, list)
        for index in range(len(tokens)):
            mutant = tokens[:index] + tokens[index + 1 :]
            result = parse(list(mutant))
            assert isinstance(result, (ScriptModule, list))
            if isinstance(result, list):
                assert result, "empty diagnostics on failure"
                assert all(isinstance(d, Diagnostic) for d in result)
            total += 1
    assert total > 1000


@settings(max_examples=200, deadline=None)
@given(st.text(max_size=1000))
def test_parse_total_on_arbitrary_text(source):
    module, diagnostics = compile_source(source)
    assert (module is None) == bool(diagnostics)


def test_fragment_mode_accepts_bare_statements():
    tokens = tokenize("require ego.speed < 30\n")
    statements, diagnostics = Parser(tokens).parse_statement_list()
    assert diagnostics == []
    assert len(statements) == 1
