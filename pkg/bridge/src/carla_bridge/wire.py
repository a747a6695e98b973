"""Wire contract of the executor protocol (version arise-exec/1).

One JSON record per line, canonical serialization: sorted keys, compact
separators. Requests carry kind/id (+script/limits); responses echo the id
and carry status, diagnostics, and spawn_attempts_used where applicable.
This module is the bridge's own implementation of the published contract;
it deliberately shares no code with the pipeline side.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

PROTOCOL_VERSION = "arise-exec/1"

# Response statuses: execution outcomes plus the protocol-level pair.
STATUSES = (
    "ok",
    "success",
    "spawn_failure",
    "runtime_error",
    "requirement_violation",
    "protocol_error",
)


def encode(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


@dataclass(frozen=True)
class DiagnosticRecord:
    phase: str  # compile | execute
    code: str
    message: str
    line: int | None = None
    column: int | None = None
    trace: tuple[str, ...] = ()

    def to_wire(self) -> dict:
        record: dict = {"phase": self.phase, "code": self.code, "message": self.message}
        if self.line is not None:
            record["span"] = {"line": self.line, "column": self.column or 1, "length": 0}
        if self.trace:
            record["trace"] = list(self.trace)
        return record


@dataclass(frozen=True)
class ExecOutcome:
    status: str  # success | spawn_failure | runtime_error | requirement_violation
    spawn_attempts_used: int
    diagnostics: tuple[DiagnosticRecord, ...] = ()


@dataclass(frozen=True)
class Limits:
    max_spawn_attempts: int = 15
    sim_steps: int = 200
    step_dt: float = 0.1
    seed: int = 0

    @classmethod
    def from_wire(cls, record: dict) -> "Limits":
        return cls(
            max_spawn_attempts=int(record.get("max_spawn_attempts", 15)),
            sim_steps=int(record.get("sim_steps", 200)),
            step_dt=float(record.get("step_dt", 0.1)),
            seed=int(record.get("seed", 0)),
        )
