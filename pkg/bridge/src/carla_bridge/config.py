"""Bridge configuration: simulator endpoint, artifact-map-id to town mapping,
request timeout. Plain key/value file; `town.<id> = <name>` rows populate the
map table."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

ARTIFACT_MAP_IDS = ("straight2", "t_junction", "fourway_signal")

DEFAULT_TOWNS = {
    "straight2": "Town04",
    "t_junction": "Town07",
    "fourway_signal": "Town05",
}


class BridgeConfigError(Exception):
    pass


@dataclass(frozen=True)
class BridgeConfig:
    host: str = "127.0.0.1"
    port: int = 2000
    request_timeout: float = 120.0
    town_map: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_TOWNS))

    def __post_init__(self) -> None:
        missing = [map_id for map_id in ARTIFACT_MAP_IDS if map_id not in self.town_map]
        if missing:
            raise BridgeConfigError(f"no town mapping for artifact map id(s): {missing}")


def load_config(path: str | Path) -> BridgeConfig:
    host = "127.0.0.1"
    port = 2000
    timeout = 120.0
    towns = dict(DEFAULT_TOWNS)
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise BridgeConfigError(f"{path}:{line_no}: expected 'key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key == "host":
            host = value
        elif key == "port":
            port = int(value)
        elif key == "request_timeout":
            timeout = float(value)
        elif key.startswith("town."):
            towns[key[len("town.") :]] = value
        else:
            raise BridgeConfigError(f"{path}:{line_no}: unknown key {key!r}")
    return BridgeConfig(host=host, port=port, request_timeout=timeout, town_map=towns)
