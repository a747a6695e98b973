#!/usr/bin/env python3
"""Record the bundled replay fixtures.

Runs the full pipeline (8 scenarios x 5 runs) plus one evaluator session
against the deterministic scripted responder, recording every request/response
pair into src/scengen/data/fixtures/replay/. The replay provider then serves
the exact same traffic with zero network use.
"""

from __future__ import annotations

import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from scengen.config import RunConfig, data_dir  # noqa: E402
from scengen.evaluator import load_reference_material, prime, score  # noqa: E402
from scengen.gateway import MockProvider, record  # noqa: E402
from scengen.kb import load_kb  # noqa: E402
from scengen.runner import RunDeps, generate_batch, load_prompts, load_repair_exemplars  # noqa: E402
from scengen.scripted import scripted_responder  # noqa: E402
from scengen.sim import load_map_catalog  # noqa: E402

FIXTURES = data_dir() / "fixtures" / "replay"
RUNS_PER_SCENARIO = 5
BASE_SEED = 11


def main() -> None:
    if FIXTURES.exists():
        shutil.rmtree(FIXTURES)
    FIXTURES.mkdir(parents=True)

    provider = record(MockProvider(responder=scripted_responder), FIXTURES)
    kb = load_kb(data_dir() / "kb.jsonl", cache_path=data_dir() / "kb.embcache.json")
    maps = load_map_catalog(data_dir() / "maps")
    prompts = [p for p in load_prompts(data_dir() / "prompts.jsonl") if p.id.endswith("-1")]
    config = RunConfig(provider="mock", runs=RUNS_PER_SCENARIO, workers=1, seed=BASE_SEED)
    deps = RunDeps(
        kb=kb, provider=provider, maps=maps, config=config, exemplars=load_repair_exemplars()
    )
    out = Path(tempfile.mkdtemp(prefix="record-fixtures-"))
    records = generate_batch(prompts, deps, out)
    successes = sum(1 for r in records if r.success)

    # One evaluator exchange: scoring a bundled seed script against its prompt.
    session = prime(provider, load_reference_material(data_dir() / "eval"))
    prompt = next(p for p in load_prompts(data_dir() / "prompts.jsonl") if p.id == "lane_changing-1")
    script = (data_dir() / "scripts" / "lane_changing-1.sdsl").read_text(encoding="utf-8")
    scores = score(session, prompt.text, script)

    shutil.rmtree(out)
    count = len(list(FIXTURES.glob("*.json")))
    print(f"recorded {count} fixtures; batch {successes}/{len(records)} ok; eval scs {scores.scs_percent():.2f}%")


if __name__ == "__main__":
    main()
