"""Canonical formatter tests: round-trip, idempotence, byte determinism."""

from scengen.dsl.formatter import format_module, format_number
from scengen.dsl.parser import compile_source

MINIMAL = "model basic\nego = new Car on lane(0)\n"


def test_minimal_roundtrip():
    module, _ = compile_source(MINIMAL)
    text = format_module(module)
    module2, diagnostics = compile_source(text)
    assert diagnostics == []
    assert module2 == module


def test_corpus_roundtrip_structural(corpus):
    for name, source in corpus.items():
        module, _ = compile_source(source)
        reparsed, diagnostics = compile_source(format_module(module))
        assert diagnostics == [], name
        assert reparsed == module, name


def test_corpus_format_idempotent(corpus):
    for name, source in corpus.items():
        module, _ = compile_source(source)
        once = format_module(module)
        module2, _ = compile_source(once)
        assert format_module(module2) == once, name


def test_corpus_roundtrip_byte_stable(corpus):
    """format(parse(s)) is a fixpoint for the bundled corpus (it is stored in
    canonical form)."""
    for name, source in corpus.items():
        module, _ = compile_source(source)
        assert format_module(module) == source, name


def test_format_deterministic(corpus):
    for source in corpus.values():
        module, _ = compile_source(source)
        assert format_module(module) == format_module(module)


def test_region_markers_emitted_before_each_region():
    module, _ = compile_source("#-- region: defaults\nmodel basic\nego = new Car on lane(0)\n")
    text = format_module(module)
    assert text.startswith("#-- region: defaults\n")


def test_empty_regions_preserved():
    source = (
        "#-- region: geometry\nmap \"straight2\"\n\n#-- region: other_objects\n\n"
        "#-- region: defaults\nmodel basic\nego = new Car on lane(0)\n"
    )
    module, diagnostics = compile_source(source)
    assert diagnostics == []
    text = format_module(module)
    assert "#-- region: other_objects" in text
    module2, _ = compile_source(text)
    assert module2 == module


def test_number_rendering():
    assert format_number(10.0) == "10"
    assert format_number(10.5) == "10.5"
    assert format_number(-3.0) == "-3"
    assert format_number(0.1) == "0.1"


def test_number_values_survive_roundtrip():
    source = "model basic\nparam x = 10.0\nparam y = 0.25\nego = new Car at(12.75, -3.5) facing 90\n"
    module, _ = compile_source(source)
    module2, _ = compile_source(format_module(module))
    assert module2 == module
    assert module2.params[0].value == 10.0
    assert module2.params[1].value == 0.25
