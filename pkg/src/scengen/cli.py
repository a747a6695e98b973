"""Operator command line: batch generation, metrics, evaluation, repair-only
runs, and knowledge-base validation.

Exit codes: 0 on success, 2 on configuration errors, 3 on provider or
infrastructure errors. Generation failures are data (recorded in the run
log), not process errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import ConfigError, RunConfig, data_dir, merge_config, parse_config_file
from .gateway import (
    BUILTIN_PROVIDERS,
    GatewayError,
    Provider,
    ProviderKind,
    make_provider,
    record,
)
from .kb import KbError, load_kb, validate_kb
from .metrics import MetricsError, load_run_log, report
from .runner import (
    BuiltinValidator,
    RunDeps,
    generate_batch,
    load_prompts,
    load_repair_exemplars,
)
from .scripted import scripted_responder
from .sim import ExecutionLimits, load_map_catalog

log = logging.getLogger("scengen.cli")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFRA = 3


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key/value config file; flags override it")
    parser.add_argument("--provider", help="provider name (openai, gemini, deepseek, mock, replay)")
    parser.add_argument("--temperature", type=float, help="sampling temperature (default 1.0)")
    parser.add_argument("--top-k", type=int, dest="top_k", help="retrieval exemplars per region (default 2)")
    parser.add_argument("--max-repairs", type=int, dest="max_repairs", help="repair-loop budget (default 10)")
    parser.add_argument("--spawn-attempts", type=int, dest="spawn_attempts", help="spawn budget per run (default 15)")
    parser.add_argument("--runs", type=int, help="runs per scenario (default 50)")
    parser.add_argument("--seed", type=int, help="base seed for run derivation (default 0)")
    parser.add_argument("--workers", type=int, help="concurrent runs (default 4)")
    parser.add_argument("--model", help="provider model id override")
    parser.add_argument("--kb", help="knowledge-base file (default: bundled)")
    parser.add_argument("--maps", help="maps directory (default: bundled)")
    parser.add_argument("--prompts", help="prompts file (default: bundled)")
    parser.add_argument("--out", help="output directory (default: out)")
    parser.add_argument("--executor", choices=["builtin", "bridge"], help="executability gate backend")
    parser.add_argument("--bridge-cmd", dest="bridge_cmd", help="command line of the external executor")
    parser.add_argument("--fixtures", help="fixture directory for replay/record providers")
    parser.add_argument("--record", action="store_const", const=True, default=None, help="record provider traffic into --fixtures")


_CONFIG_KEYS = (
    "provider", "temperature", "top_k", "max_repairs", "spawn_attempts", "runs",
    "seed", "workers", "model", "kb", "maps", "prompts", "out", "executor",
    "bridge_cmd", "fixtures", "record",
)


def _build_config(args: argparse.Namespace) -> RunConfig:
    file_values = parse_config_file(args.config) if args.config else None
    flag_values = {key: getattr(args, key, None) for key in _CONFIG_KEYS}
    return merge_config(file_values, flag_values)


def _build_provider(config: RunConfig) -> Provider:
    base = BUILTIN_PROVIDERS.get(config.provider)
    if base is None:
        raise ConfigError(f"unknown provider {config.provider!r}")
    if base.kind is ProviderKind.MOCK:
        provider: Provider = make_provider(base, responder=scripted_responder)
    elif base.kind is ProviderKind.REPLAY:
        fixtures = config.fixtures or str(data_dir() / "fixtures" / "replay")
        provider = make_provider(base, fixtures_dir=fixtures)
    else:
        provider = make_provider(base, name=config.provider)
    if config.record:
        if not config.fixtures:
            raise ConfigError("--record needs --fixtures")
        provider = record(provider, config.fixtures)
    return provider


def _make_deps(config: RunConfig) -> RunDeps:
    kb = load_kb(config.kb, cache_path=_cache_path(config.kb))
    maps = load_map_catalog(config.maps)
    provider = _build_provider(config)
    validator_factory = None
    if config.executor == "bridge":
        from .protocol import BridgeValidatorFactory

        if not config.bridge_cmd:
            raise ConfigError("--executor bridge needs --bridge-cmd")
        validator_factory = BridgeValidatorFactory(config.bridge_cmd)
    return RunDeps(
        kb=kb,
        provider=provider,
        maps=maps,
        config=config,
        exemplars=load_repair_exemplars(),
        validator_factory=validator_factory,
    )


def _cache_path(kb_path: str) -> str | None:
    candidate = Path(kb_path).with_suffix(".embcache.json")
    return str(candidate) if candidate.exists() else None


def cmd_generate(args: argparse.Namespace) -> int:
    try:
        config = _build_config(args)
        deps = _make_deps(config)
    except (ConfigError, KbError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    prompts = load_prompts(config.prompts)
    if args.scenario:
        wanted = set(args.scenario)
        known = {p.id for p in prompts}
        missing = wanted - known
        if missing:
            print(f"error: unknown scenario id(s): {', '.join(sorted(missing))}", file=sys.stderr)
            return EXIT_CONFIG
        prompts = [p for p in prompts if p.id in wanted]
    try:
        records = generate_batch(prompts, deps, config.out)
    except GatewayError as exc:
        print(f"provider error: {exc}", file=sys.stderr)
        return EXIT_INFRA
    successes = sum(1 for r in records if r.success)
    print(f"{len(records)} runs, {successes} successful; log at {Path(config.out) / 'run.log'}")
    infra = [r for r in records if any(c.startswith("llm.") for c in r.diagnostics_summary)]
    if infra and len(infra) == len(records):
        return EXIT_INFRA
    return EXIT_OK


def cmd_metrics(args: argparse.Namespace) -> int:
    try:
        records = load_run_log(args.log)
    except (OSError, MetricsError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    scs_scores = None
    if args.scs:
        scs_scores = json.loads(Path(args.scs).read_text(encoding="utf-8"))
    rep, table = report(records, scs_scores)
    print(table, end="")
    if args.summary:
        Path(args.summary).write_text(json.dumps(rep.to_machine(), indent=1), encoding="utf-8")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    from .evaluator import consistency_stats, load_reference_material, prime, score

    try:
        config = _build_config(args)
        provider = _build_provider(config)
        reference = load_reference_material(data_dir() / "eval")
        session = prime(provider, reference, temperature=config.temperature, model=config.model)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        lines = Path(args.pairs).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    values: list[float] = []
    outputs: list[str] = []
    try:
        for line in lines:
            if not line.strip():
                continue
            pair = json.loads(line)
            description = Path(pair["description_path"]).read_text(encoding="utf-8")
            script = Path(pair["script_path"]).read_text(encoding="utf-8")
            result = score(session, description, script)
            percent = result.scs_percent()
            values.append(percent)
            outputs.append(
                json.dumps(
                    {"pair": pair, "scores": result.scores, "scs_percent": percent},
                    ensure_ascii=False,
                )
            )
    except GatewayError as exc:
        print(f"provider error: {exc}", file=sys.stderr)
        return EXIT_INFRA
    for line in outputs:
        print(line)
    if len(values) >= 2:
        stats = consistency_stats(values)
        print(
            json.dumps(
                {
                    "summary": {
                        "min": stats.minimum,
                        "max": stats.maximum,
                        "mean": stats.mean,
                        "std_pp": stats.std,
                        "count": stats.count,
                    }
                }
            )
        )
    return EXIT_OK


def cmd_repair(args: argparse.Namespace) -> int:
    from .repair import TrlLlmError, run_trl

    try:
        config = _build_config(args)
        deps = _make_deps(config)
        source = Path(args.script).read_text(encoding="utf-8")
        description = Path(args.description).read_text(encoding="utf-8")
    except (ConfigError, KbError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    limits = ExecutionLimits(
        max_spawn_attempts=config.spawn_attempts,
        sim_steps=config.sim_steps,
        step_dt=config.step_dt,
        seed=config.seed,
    )
    validator = BuiltinValidator(deps.maps, "straight2", limits)
    try:
        outcome = run_trl(
            source,
            description,
            validator,
            deps.provider,
            max_iterations=config.max_repairs,
            exemplars=deps.exemplars,
            temperature=config.temperature,
            model=config.model,
        )
    except TrlLlmError as exc:
        print(f"provider error: {exc}", file=sys.stderr)
        return EXIT_INFRA
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    final = out / "final.sdsl"
    final.write_text(outcome.final_script, encoding="utf-8")
    print(
        f"success={outcome.success} repairs={len(outcome.attempts)} "
        f"first_attempt={outcome.first_attempt_success} final={final}"
    )
    return EXIT_OK


def cmd_kb_validate(args: argparse.Namespace) -> int:
    try:
        kb = load_kb(args.kb or str(data_dir() / "kb.jsonl"))
    except (KbError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    problems = validate_kb(kb)
    for diagnostic in problems:
        print(diagnostic.render())
    print(f"{len(kb)} entries, {len(problems)} problem(s)")
    return EXIT_OK if not problems else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scengen",
        description="Generate, repair, evaluate, and measure traffic-scenario scripts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="run the full pipeline over scenario prompts")
    _add_run_flags(p_gen)
    p_gen.add_argument("--scenario", action="append", help="restrict to scenario id (repeatable)")
    p_gen.set_defaults(func=cmd_generate)

    p_metrics = sub.add_parser("metrics", help="render a metrics report from a run log")
    p_metrics.add_argument("log", help="run log path")
    p_metrics.add_argument("--scs", help="JSON file of per-category SCS percent lists")
    p_metrics.add_argument("--summary", help="write machine-readable summary JSON here")
    p_metrics.set_defaults(func=cmd_metrics)

    p_eval = sub.add_parser("eval", help="score description/script pairs with the LLM evaluator")
    _add_run_flags(p_eval)
    p_eval.add_argument("pairs", help="JSONL file of {description_path, script_path} pairs")
    p_eval.set_defaults(func=cmd_eval)

    p_repair = sub.add_parser("repair", help="run the repair loop on one script")
    _add_run_flags(p_repair)
    p_repair.add_argument("script", help="script file to repair")
    p_repair.add_argument("description", help="scenario description file")
    p_repair.set_defaults(func=cmd_repair)

    p_kb = sub.add_parser("kb-validate", help="validate every knowledge-base snippet")
    p_kb.add_argument("--kb", help="knowledge-base file (default: bundled)")
    p_kb.set_defaults(func=cmd_kb_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
