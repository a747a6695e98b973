"""Batch orchestration: dispatch scenario runs to a worker pool, persist
attempt artifacts and run records.

Records are written through the single RunLogWriter in submission order, so
two invocations with the same inputs produce byte-identical logs apart from
the timing fields.
"""

from __future__ import annotations

import json
import logging
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .config import RunConfig, data_dir
from .dsl.analyzer import analyze
from .dsl.diagnostics import Diagnostic
from .dsl.parser import compile_source
from .gateway import GatewayError, Provider
from .kb import KnowledgeBase
from .metrics import RunLogWriter, RunRecord
from .pipeline import (
    DEFAULT_MAPS,
    PipelineConfig,
    PipelineError,
    ScenarioPrompt,
    assemble,
    extract_components,
    generate_snippets,
)
from .protocol import ProtocolError
from .repair import RepairAttempt, TrlLlmError, run_trl
from .sim.executor import ExecutionLimits, ExecutionResult, execute
from .sim.roadnet import RoadNetwork

log = logging.getLogger("scengen.runner")


def load_prompts(path: str | Path) -> list[ScenarioPrompt]:
    prompts = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        prompts.append(ScenarioPrompt(record["id"], record["category"], record["text"]))
    return prompts


def load_repair_exemplars() -> tuple[str, ...]:
    path = data_dir() / "repair_exemplars.json"
    if not path.exists():
        return ()
    return tuple(json.loads(path.read_text(encoding="utf-8")))


class BuiltinValidator:
    """Analyze-then-execute gate against the bundled maps."""

    def __init__(self, maps: dict[str, RoadNetwork], default_map: str, limits: ExecutionLimits):
        self.maps = maps
        self.default_map = default_map
        self.limits = limits

    def __call__(self, source: str) -> tuple[list[Diagnostic], ExecutionResult | None]:
        module, diagnostics = compile_source(source)
        if module is None:
            return diagnostics, None
        compile_diags = analyze(module, set(self.maps))
        if compile_diags:
            return compile_diags, None
        network = self.maps.get(module.map_name or self.default_map, self.maps[self.default_map])
        return [], execute(module, network, self.limits)


def run_seed(base_seed: int, scenario_id: str, run_index: int) -> int:
    """Deterministic per-run seed derivation."""
    return zlib.crc32(f"{base_seed}:{scenario_id}:{run_index}".encode("utf-8"))


@dataclass
class RunDeps:
    kb: KnowledgeBase
    provider: Provider
    maps: dict[str, RoadNetwork]
    config: RunConfig
    exemplars: tuple[str, ...] = ()
    validator_factory: object | None = None  # callable(default_map, limits) -> Validator


def _make_validator(deps: RunDeps, default_map: str, limits: ExecutionLimits):
    if deps.validator_factory is not None:
        return deps.validator_factory(default_map, limits)
    return BuiltinValidator(deps.maps, default_map, limits)


def run_one(prompt: ScenarioPrompt, run_index: int, deps: RunDeps, out_dir: Path) -> RunRecord:
    config = deps.config
    run_dir = out_dir / prompt.id / str(run_index)
    run_dir.mkdir(parents=True, exist_ok=True)
    attempts_log = run_dir / "attempts.jsonl"
    started = time.monotonic()
    pipeline_config = PipelineConfig(
        temperature=config.temperature, model=config.model, top_k=config.top_k
    )
    limits = ExecutionLimits(
        max_spawn_attempts=config.spawn_attempts,
        sim_steps=config.sim_steps,
        step_dt=config.step_dt,
        seed=run_seed(config.seed, prompt.id, run_index),
    )
    validator = _make_validator(deps, DEFAULT_MAPS[prompt.category], limits)

    def persist_attempt(attempt: RepairAttempt) -> None:
        (run_dir / f"attempt-{attempt.iteration}.sdsl").write_text(
            attempt.output_script, encoding="utf-8"
        )
        with attempts_log.open("a", encoding="utf-8") as handle:
            handle.write(
                json.dumps(
                    {
                        "iteration": attempt.iteration,
                        "outcome": attempt.outcome.value,
                        "prompt_hash": attempt.prompt_hash,
                        "diagnostics_in": [d.code for d in attempt.diagnostics_in],
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
            handle.flush()

    failure_codes: tuple[str, ...] = ()
    try:
        decomp = extract_components(prompt, deps.provider, pipeline_config)
        snippets = generate_snippets(decomp, deps.kb, deps.provider, pipeline_config)
        source = assemble(snippets, map_hint=DEFAULT_MAPS[prompt.category])
        (run_dir / "assembled.sdsl").write_text(source, encoding="utf-8")
        outcome = run_trl(
            source,
            prompt.text,
            validator,
            deps.provider,
            max_iterations=config.max_repairs,
            exemplars=deps.exemplars,
            temperature=config.temperature,
            model=config.model,
            on_attempt=persist_attempt,
        )
        (run_dir / "final.sdsl").write_text(outcome.final_script, encoding="utf-8")
        success = outcome.success
        first = outcome.first_attempt_success
        repair_attempts = len(outcome.attempts)
        if not success:
            final_diags, final_result = validator(outcome.final_script)
            codes = [d.code for d in final_diags]
            if final_result is not None:
                codes.extend(d.code for d in final_result.diagnostics)
            failure_codes = tuple(codes)
    except (PipelineError, GatewayError, TrlLlmError, ProtocolError) as exc:
        success = False
        first = False
        if isinstance(exc, TrlLlmError):
            repair_attempts = len(exc.attempts)
            (run_dir / "final.sdsl").write_text(exc.final_script, encoding="utf-8")
            failure_codes = (exc.code, exc.cause.code)
        else:
            repair_attempts = 0
            failure_codes = (getattr(exc, "code", "error"),)
        log.warning("run %s/%d failed: %s", prompt.id, run_index, exc)
    elapsed_ms = (time.monotonic() - started) * 1000
    return RunRecord(
        scenario_id=prompt.id,
        category=prompt.category,
        run_index=run_index,
        first_attempt_success=first,
        repair_attempts=repair_attempts if not first else 0,
        success=success,
        diagnostics_summary=failure_codes,
        timings={"total_ms": elapsed_ms},
    )


def generate_batch(
    prompts: list[ScenarioPrompt],
    deps: RunDeps,
    out_dir: str | Path,
    log_name: str = "run.log",
) -> list[RunRecord]:
    """Run every (prompt, run_index) job; records land in the run log in
    submission order regardless of completion order."""
    out_path = Path(out_dir)
    out_path.mkdir(parents=True, exist_ok=True)
    writer = RunLogWriter(out_path / log_name)
    jobs = [
        (prompt, run_index)
        for prompt in prompts
        for run_index in range(deps.config.runs)
    ]
    records: list[RunRecord] = []
    workers = max(1, deps.config.workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_one, prompt, run_index, deps, out_path) for prompt, run_index in jobs]
        for future in futures:
            record = future.result()
            writer.append(record)
            records.append(record)
    return records
