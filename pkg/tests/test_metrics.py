"""Metrics tests: formula oracles (brute-force recomputation), table-anchor
values, mode dominance, rendering, and run-log IO."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scengen.metrics import (
    MetricsError,
    RunLogWriter,
    RunRecord,
    esr,
    load_run_log,
    population_std,
    rcr,
    record_from_json,
    record_to_json,
    render_percent,
    render_rate,
    report,
    scs,
    scs_stats,
)
from scengen.pipeline import CATEGORIES


def make_record(rng: random.Random, category: str, index: int) -> RunRecord:
    roll = rng.random()
    if roll < 0.3:
        first, success, attempts = True, True, 0
    elif roll < 0.7:
        first, success, attempts = False, True, rng.randint(1, 10)
    else:
        first, success, attempts = False, False, rng.randint(0, 10)
    return RunRecord(
        scenario_id=f"{category}-1",
        category=category,
        run_index=index,
        first_attempt_success=first,
        repair_attempts=attempts,
        success=success,
    )


def random_log(count: int, seed: int) -> list[RunRecord]:
    rng = random.Random(seed)
    return [make_record(rng, rng.choice(CATEGORIES), i) for i in range(count)]


# -- ESR --

def test_esr_direct_ratio():
    records = [
        RunRecord("c-1", "lane_changing", i, False, 1 if i < 7 else 2, i < 7)
        for i in range(10)
    ]
    per_cat, avg = esr(records, "total")
    assert per_cat["lane_changing"] == 0.7
    assert avg == 0.7


def test_esr_boundaries():
    records = [RunRecord("c-1", "right_turn", i, False, 0, False) for i in range(5)]
    per_cat, _ = esr(records, "total")
    assert per_cat["right_turn"] == 0.0
    records = [RunRecord("c-1", "right_turn", i, True, 0, True) for i in range(5)]
    per_cat, _ = esr(records, "total")
    assert per_cat["right_turn"] == 1.0


def test_esr_single_vs_total():
    records = [
        RunRecord("c-1", "straight_obstacle", 0, True, 0, True),
        RunRecord("c-1", "straight_obstacle", 1, False, 3, True),
        RunRecord("c-1", "straight_obstacle", 2, False, 10, False),
    ]
    single, _ = esr(records, "single")
    total, _ = esr(records, "total")
    assert single["straight_obstacle"] == pytest.approx(1 / 3)
    assert total["straight_obstacle"] == pytest.approx(2 / 3)


def test_esr_paper_anchor_250_runs():
    """241 successes of 250 reproduces the best straight-obstacle cell."""
    records = [
        RunRecord("straight_obstacle-1", "straight_obstacle", i, False, 1 if i < 241 else 5, i < 241)
        for i in range(250)
    ]
    per_cat, avg = esr(records, "total")
    assert per_cat["straight_obstacle"] == 0.964
    assert render_rate(per_cat["straight_obstacle"]) == "0.964"


def test_esr_empty_log_rejected():
    with pytest.raises(MetricsError) as excinfo:
        esr([], "total")
    assert excinfo.value.code == "metrics.empty_category"


def test_esr_unknown_mode():
    with pytest.raises(ValueError):
        esr([RunRecord("a-1", "right_turn", 0, True, 0, True)], "both")


def test_esr_brute_force_oracle_10k():
    records = random_log(10_000, seed=99)
    for mode in ("single", "total"):
        per_cat, avg = esr(records, mode)
        for category, rate in per_cat.items():
            runs = [r for r in records if r.category == category]
            wins = 0
            for r in runs:
                wins += int(r.first_attempt_success if mode == "single" else r.success)
            assert abs(rate - wins / len(runs)) < 1e-12
        assert abs(avg - math.fsum(per_cat.values()) / len(per_cat)) < 1e-12


def test_esr_mode_dominance_property():
    for seed in range(5):
        records = random_log(2_000, seed=seed)
        single, savg = esr(records, "single")
        total, tavg = esr(records, "total")
        for category in single:
            assert total[category] >= single[category]
        assert tavg >= savg


# -- RCR --

def test_rcr_arithmetic_mean():
    records = [
        RunRecord("c-1", "lane_changing", i, False, a, True) for i, a in enumerate((2, 3, 4))
    ]
    per_cat, avg = rcr(records)
    assert per_cat["lane_changing"] == 3.0
    assert avg == 3.0


def test_rcr_na_when_all_first_attempt():
    records = [RunRecord("c-1", "right_turn", i, True, 0, True) for i in range(5)]
    per_cat, avg = rcr(records)
    assert per_cat["right_turn"] is None
    assert avg is None


def test_rcr_na_when_all_fail():
    records = [RunRecord("c-1", "right_turn", i, False, 10, False) for i in range(5)]
    per_cat, _ = rcr(records)
    assert per_cat["right_turn"] is None


def test_rcr_excludes_failures_and_first_attempts():
    records = [
        RunRecord("c-1", "right_turn", 0, True, 0, True),
        RunRecord("c-1", "right_turn", 1, False, 4, True),
        RunRecord("c-1", "right_turn", 2, False, 10, False),
        RunRecord("c-1", "right_turn", 3, False, 6, True),
    ]
    per_cat, _ = rcr(records)
    assert per_cat["right_turn"] == 5.0


def test_rcr_brute_force_oracle_10k():
    records = random_log(10_000, seed=7)
    per_cat, avg = rcr(records)
    defined = []
    for category, value in per_cat.items():
        qualifying = [
            r.repair_attempts
            for r in records
            if r.category == category and r.success and not r.first_attempt_success
        ]
        if not qualifying:
            assert value is None
            continue
        expected = math.fsum(qualifying) / len(qualifying)
        assert abs(value - expected) < 1e-12
        defined.append(expected)
    assert abs(avg - math.fsum(defined) / len(defined)) < 1e-12


def test_rcr_average_over_defined_categories_only():
    records = [
        RunRecord("a-1", "right_turn", 0, True, 0, True),  # N/A category
        RunRecord("b-1", "lane_changing", 0, False, 4, True),
    ]
    per_cat, avg = rcr(records)
    assert per_cat["right_turn"] is None
    assert avg == 4.0


# -- SCS --

def test_scs_maximum():
    assert scs([10] * 7) == 1.0


def test_scs_paper_anchor_65():
    value = scs([10, 10, 10, 10, 10, 10, 5])
    assert value == pytest.approx(65 / 70)
    assert render_percent(value * 100) == "92.86"


def test_scs_paper_anchor_62():
    value = scs([10, 10, 10, 10, 10, 7, 5])
    assert sum([10, 10, 10, 10, 10, 7, 5]) == 62
    assert render_percent(value * 100) == "88.57"


def test_scs_bad_count():
    with pytest.raises(MetricsError) as excinfo:
        scs([10] * 6)
    assert excinfo.value.code == "metrics.bad_criteria_count"


def test_scs_bad_range():
    with pytest.raises(MetricsError) as excinfo:
        scs([10, 10, 10, 10, 10, 10, 11])
    assert excinfo.value.code == "metrics.bad_score_range"


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=10), min_size=7, max_size=7))
def test_scs_bounds_and_oracle(scores):
    value = scs(scores)
    assert 0.0 <= value <= 1.0
    assert abs(value - math.fsum(scores) / 70.0) < 1e-12


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.integers(min_value=0, max_value=10), min_size=7, max_size=7),
    st.integers(min_value=0, max_value=6),
)
def test_scs_monotone_in_each_criterion(scores, index):
    if scores[index] == 10:
        return
    bumped = list(scores)
    bumped[index] += 1
    assert scs(bumped) >= scs(scores)


def test_rcr_exclusion_invariance():
    """Perturbing A_i of first-attempt successes (illegal but injected by
    bypassing validation) never changes RCR."""
    records = [
        RunRecord("a-1", "lane_changing", 0, False, 3, True),
        RunRecord("a-1", "lane_changing", 1, True, 0, True),
    ]
    baseline, _ = rcr(records)
    tampered = RunRecord("a-1", "lane_changing", 1, True, 0, True)
    object.__setattr__(tampered, "repair_attempts", 7)  # bypass the invariant
    perturbed, _ = rcr([records[0], tampered])
    assert perturbed == baseline


# -- rendering and report --

def test_render_percent_round_half_up():
    assert render_percent(92.857142857) == "92.86"
    assert render_percent(88.571428571) == "88.57"
    assert render_percent(0.125) == "0.13"  # half-up, not bankers
    assert render_percent(100.0) == "100.00"


def test_population_std():
    assert population_std([2.0, 2.0, 2.0]) == 0.0
    assert population_std([1.0, 3.0]) == 1.0


def test_scs_stats():
    stats = scs_stats([90.0, 95.0, 100.0])
    assert stats.minimum == 90.0
    assert stats.maximum == 100.0
    assert stats.mean == 95.0
    assert stats.count == 3


def test_report_shapes_and_partial_scs():
    records = [
        RunRecord("a-1", "straight_obstacle", 0, True, 0, True),
        RunRecord("b-1", "lane_changing", 0, False, 2, True),
    ]
    rep, table = report(records)
    assert "SCS" not in table  # empty SCS input: section omitted
    assert "ESR (single)" in table and "ESR (total)" in table and "RCR" in table
    rep, table = report(records, {"lane_changing": [92.86, 88.57]})
    assert "SCS" in table
    machine = rep.to_machine()
    assert machine["esr"]["total"]["average"] == 1.0
    assert machine["scs"]["lane_changing"]["count"] == 2


def test_report_renders_na():
    records = [RunRecord("a-1", "right_turn", 0, True, 0, True)]
    _, table = report(records)
    assert "N/A" in table


def test_golden_report_for_fixture_log():
    records = [
        RunRecord("straight_obstacle-1", "straight_obstacle", 0, True, 0, True),
        RunRecord("straight_obstacle-1", "straight_obstacle", 1, False, 2, True),
        RunRecord("lane_changing-1", "lane_changing", 0, False, 3, True),
        RunRecord("lane_changing-1", "lane_changing", 1, False, 10, False),
    ]
    _, table = report(records, {"straight_obstacle": [94.29, 100.0, 98.86]})
    expected = (
        "Metric        straight_obstacle  lane_changing  Average\n"
        "------        -----------------  -------------  -------\n"
        "ESR (single)  0.500              0.000          0.250\n"
        "ESR (total)   1.000              0.500          0.750\n"
        "RCR           2.000              3.000          2.500\n"
        "\n"
        "SCS           Min %         Max %         Avg %         Std (pp)      n\n"
        "---           -----         -----         -----         --------      -\n"
        "straight_obstacle  94.29         100.00        97.72         2.47          3\n"
    )
    assert table == expected


# -- run log IO --

def test_record_json_roundtrip():
    record = RunRecord("a-1", "right_turn", 3, False, 4, True, ("exec.spawn_exhausted",), {"total_ms": 12.5})
    parsed = record_from_json(record_to_json(record))
    assert parsed == record  # timings excluded from equality but parsed back
    assert parsed.timings == {"total_ms": 12.5}


def test_run_log_writer_and_loader(tmp_path):
    path = tmp_path / "run.log"
    writer = RunLogWriter(path)
    records = [
        RunRecord("a-1", "right_turn", 0, True, 0, True),
        RunRecord("a-1", "right_turn", 1, False, 2, True),
    ]
    for record in records:
        writer.append(record)
    loaded = load_run_log(path)
    assert loaded == records
    header = path.read_text(encoding="utf-8").splitlines()[0]
    assert "run-log/1" in header


def test_run_record_invariants():
    with pytest.raises(ValueError):
        RunRecord("a-1", "right_turn", 0, True, 3, True)  # first attempt with repairs
    with pytest.raises(ValueError):
        RunRecord("a-1", "right_turn", 0, False, 0, True)  # repaired success without repairs
