"""Batch runner tests: artifact layout, replay-based goldens, exit codes,
and the bridge executor integration."""

import importlib.util
import json
import sys

import pytest

from scengen.cli import EXIT_INFRA, EXIT_OK, main
from scengen.config import RunConfig
from scengen.gateway import ReplayProvider
from scengen.pipeline import SemanticDecomposition, extract_components
from scengen.runner import run_seed


def test_run_seed_deterministic_and_distinct():
    assert run_seed(11, "lane_changing-1", 0) == run_seed(11, "lane_changing-1", 0)
    seeds = {run_seed(11, "lane_changing-1", i) for i in range(50)}
    assert len(seeds) == 50
    assert run_seed(11, "a-1", 0) != run_seed(12, "a-1", 0)


GOLDEN_DECOMPS = {
    "straight_obstacle-1": SemanticDecomposition(
        behavior="brakes hard ahead of the ego vehicle",
        geometry="a straight two-lane road",
        spawn_relation="the adversary starts ahead of the ego vehicle in the same lane",
        adversarial_object="an adversarial car",
    ),
    "turning_obstacle-1": SemanticDecomposition(
        behavior="turns right at the junction into traffic",
        geometry="a signalized four-way intersection",
        spawn_relation="the adversary starts ahead of the ego vehicle in the same lane",
        adversarial_object="an adversarial truck",
    ),
    "lane_changing-1": SemanticDecomposition(
        behavior="cuts into the ego lane and brakes",
        geometry="a straight two-lane road",
        spawn_relation="the adversary starts in the adjacent lane beside the ego vehicle",
        adversarial_object="an adversarial car",
    ),
    "vehicle_passing-1": SemanticDecomposition(
        behavior="overtakes the ego vehicle at speed",
        geometry="a straight two-lane road",
        spawn_relation="the adversary starts behind the ego vehicle",
        adversarial_object="an adversarial car",
    ),
    "red_light_running-1": SemanticDecomposition(
        behavior="runs a red light across the junction",
        geometry="a signalized four-way intersection",
        spawn_relation="the adversary approaches the junction from the right of the ego vehicle",
        adversarial_object="an adversarial car",
    ),
    "unprotected_left_turn-1": SemanticDecomposition(
        behavior="turns left across the oncoming ego path",
        geometry="a signalized four-way intersection",
        spawn_relation="the adversary approaches from the opposite direction",
        adversarial_object="an adversarial car",
    ),
    "right_turn-1": SemanticDecomposition(
        behavior="turns right at the junction into traffic",
        geometry="a T junction with a side road",
        spawn_relation="the adversary approaches the junction from the left of the ego vehicle",
        adversarial_object="an adversarial car",
    ),
    "crossing_negotiation-1": SemanticDecomposition(
        behavior="crosses the road in front of the ego vehicle",
        geometry="a signalized four-way intersection",
        spawn_relation="the adversary starts ahead of the ego vehicle in the same lane",
        adversarial_object="an adversarial pedestrian",
    ),
}


def test_replay_extraction_goldens(prompts, replay_dir):
    """Pinned decompositions replayed from the recorded fixtures for the
    first scenario of every category."""
    provider = ReplayProvider(replay_dir)
    for prompt in prompts:
        golden = GOLDEN_DECOMPS.get(prompt.id)
        if golden is None:
            continue
        assert extract_components(prompt, provider) == golden, prompt.id


def test_attempt_artifacts_saved(tmp_path):
    code = main(
        [
            "generate",
            "--provider", "replay",
            "--runs", "1",
            "--seed", "11",
            "--workers", "1",
            "--out", str(tmp_path),
            "--scenario", "lane_changing-1",
        ]
    )
    assert code == EXIT_OK
    run_dir = tmp_path / "lane_changing-1" / "0"
    assert (run_dir / "assembled.sdsl").exists()
    assert (run_dir / "attempt-1.sdsl").exists()  # one repair in the fixtures
    assert (run_dir / "final.sdsl").exists()
    attempts = [
        json.loads(line)
        for line in (run_dir / "attempts.jsonl").read_text(encoding="utf-8").splitlines()
    ]
    assert [a["iteration"] for a in attempts] == [1]
    assert attempts[0]["outcome"] == "success"
    assert attempts[0]["diagnostics_in"]


def test_missing_fixtures_exit_infra(tmp_path):
    fixtures = tmp_path / "empty-fixtures"
    fixtures.mkdir()
    code = main(
        [
            "generate",
            "--provider", "replay",
            "--fixtures", str(fixtures),
            "--runs", "1",
            "--workers", "1",
            "--out", str(tmp_path / "out"),
            "--scenario", "lane_changing-1",
        ]
    )
    assert code == EXIT_INFRA


@pytest.mark.skipif(
    importlib.util.find_spec("carla_bridge") is None,
    reason="carla-bridge package not installed",
)
def test_bridge_executor_integration(tmp_path):
    """The pipeline consumes the secondary bridge purely over stdio."""
    code = main(
        [
            "generate",
            "--provider", "mock",
            "--runs", "1",
            "--workers", "1",
            "--seed", "3",
            "--out", str(tmp_path),
            "--executor", "bridge",
            "--bridge-cmd", f"{sys.executable} -m carla_bridge --stub",
            "--scenario", "straight_obstacle-1",
        ]
    )
    assert code == EXIT_OK
    log_lines = (tmp_path / "run.log").read_text(encoding="utf-8").splitlines()
    record = json.loads(log_lines[1])
    assert record["success"] is True


def test_config_resolved_paths_point_to_bundled_data():
    config = RunConfig().resolved()
    assert config.kb.endswith("kb.jsonl")
    assert config.prompts.endswith("prompts.jsonl")
