#!/usr/bin/env python3
"""Offline experiment: the full generation pipeline over the first scenario
of each category (5 runs each) using the recorded replay fixtures, followed
by a metrics report and an evaluator-consistency check.

Everything is deterministic and network-free; see scripts/record_fixtures.py
to refresh the fixtures after changing prompts, KB, or pipeline code.
"""

from __future__ import annotations

import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from scengen.config import RunConfig, data_dir  # noqa: E402
from scengen.evaluator import consistency_stats, load_reference_material, prime, score  # noqa: E402
from scengen.gateway import ReplayProvider  # noqa: E402
from scengen.kb import load_kb  # noqa: E402
from scengen.metrics import render_percent, report  # noqa: E402
from scengen.runner import RunDeps, generate_batch, load_prompts, load_repair_exemplars  # noqa: E402
from scengen.sim import load_map_catalog  # noqa: E402


def main() -> None:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="replay-exp-"))
    fixtures = data_dir() / "fixtures" / "replay"
    provider = ReplayProvider(fixtures)
    kb = load_kb(data_dir() / "kb.jsonl", cache_path=data_dir() / "kb.embcache.json")
    maps = load_map_catalog(data_dir() / "maps")
    prompts = [p for p in load_prompts(data_dir() / "prompts.jsonl") if p.id.endswith("-1")]
    config = RunConfig(provider="replay", runs=5, workers=2, seed=11)
    deps = RunDeps(
        kb=kb, provider=provider, maps=maps, config=config, exemplars=load_repair_exemplars()
    )

    records = generate_batch(prompts, deps, out_dir)
    _, table = report(records)
    print(f"run log: {out_dir / 'run.log'}\n")
    print(table)

    # Evaluator consistency: the same script scored 10 times (replay is
    # deterministic, so the spread collapses to zero).
    session = prime(provider, load_reference_material(data_dir() / "eval"))
    prompt = next(p for p in load_prompts(data_dir() / "prompts.jsonl") if p.id == "lane_changing-1")
    script = (data_dir() / "scripts" / "lane_changing-1.sdsl").read_text(encoding="utf-8")
    values = [score(session, prompt.text, script).scs_percent() for _ in range(10)]
    stats = consistency_stats(values)
    print("repeated evaluation of the same script (10 scoring passes):")
    print(
        f"  min {render_percent(stats.minimum)}%  max {render_percent(stats.maximum)}%  "
        f"avg {render_percent(stats.mean)}%  std {render_percent(stats.std)} pp"
    )


if __name__ == "__main__":
    main()
