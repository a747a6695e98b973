"""Run configuration: defaults, config-file parsing, flag precedence.

Precedence is flag > config file > default. Credentials never appear here,
only provider env-var names (resolved by the gateway at call time).
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path


def data_dir() -> Path:
    return Path(resources.files("scengen") / "data")


@dataclass(frozen=True)
class RunConfig:
    provider: str = "mock"
    temperature: float = 1.0
    top_k: int = 2
    max_repairs: int = 10
    spawn_attempts: int = 15
    runs: int = 50
    seed: int = 0
    workers: int = 4
    sim_steps: int = 200
    step_dt: float = 0.1
    model: str = ""
    executor: str = "builtin"  # builtin | bridge
    bridge_cmd: str = ""
    kb: str = ""
    maps: str = ""
    prompts: str = ""
    out: str = "out"
    fixtures: str = ""
    record: bool = False

    def resolved(self) -> "RunConfig":
        data = data_dir()
        updates = {}
        if not self.kb:
            updates["kb"] = str(data / "kb.jsonl")
        if not self.maps:
            updates["maps"] = str(data / "maps")
        if not self.prompts:
            updates["prompts"] = str(data / "prompts.jsonl")
        return replace(self, **updates) if updates else self


class ConfigError(Exception):
    pass


_BOOL_TRUE = ("1", "true", "yes", "on")
_BOOL_FALSE = ("0", "false", "no", "off")


def parse_config_file(path: str | Path) -> dict[str, object]:
    """Key/value config text: one `key = value` per line, `#` comments."""
    known = {f.name: f.type for f in fields(RunConfig)}
    out: dict[str, object] = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key not in known:
            raise ConfigError(f"{path}:{line_no}: unknown key {key!r}")
        out[key] = _coerce(key, value, line_no, str(path))
    return out


def _coerce(key: str, value: str, line_no: int, path: str) -> object:
    proto = getattr(RunConfig(), key)
    try:
        if isinstance(proto, bool):
            lowered = value.lower()
            if lowered in _BOOL_TRUE:
                return True
            if lowered in _BOOL_FALSE:
                return False
            raise ValueError(f"not a boolean: {value!r}")
        if isinstance(proto, int):
            return int(value)
        if isinstance(proto, float):
            return float(value)
        return value
    except ValueError as exc:
        raise ConfigError(f"{path}:{line_no}: bad value for {key}: {exc}") from exc


def merge_config(
    file_values: dict[str, object] | None, flag_values: dict[str, object]
) -> RunConfig:
    config = RunConfig()
    if file_values:
        config = replace(config, **file_values)
    flags = {k: v for k, v in flag_values.items() if v is not None}
    if flags:
        config = replace(config, **flags)
    return config.resolved()
