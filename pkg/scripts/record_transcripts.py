#!/usr/bin/env python3
"""Pin the golden executor-protocol transcripts.

The transcript drives the builtin server through hello / compile / execute /
shutdown over a set of fixture scripts and records the canonical response
line for each request. The same request sequence (with engine-specific
diagnostics) is the conformance suite for external bridges.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from scengen.config import data_dir  # noqa: E402
from scengen.protocol import PROTOCOL_VERSION, BuiltinExecutorServer, encode  # noqa: E402
from scengen.sim import load_map_catalog  # noqa: E402

TRANSCRIPT_PATH = data_dir() / "fixtures" / "transcripts" / "builtin.jsonl"


def transcript_requests() -> list[dict]:
    scripts_dir = data_dir() / "scripts"
    ok_script = (scripts_dir / "straight_obstacle-1.sdsl").read_text(encoding="utf-8")
    junction_script = (scripts_dir / "red_light_running-1.sdsl").read_text(encoding="utf-8")
    missing_model = 'ego = new Car on lane(0)\n'
    undefined_behavior = (
        'model basic\nmap "straight2"\n'
        "ego = new Car on lane(0) at 30, with behavior Ghost(9)\n"
    )
    overlap = (
        'model basic\nmap "straight2"\n'
        "ego = new Car on lane(0) at 50, with behavior FollowLane(8)\n"
        "adv = new Car ahead of ego by 0.1\n"
    )
    limits = {"max_spawn_attempts": 15, "sim_steps": 200, "step_dt": 0.1, "seed": 7}
    requests = [
        {"kind": "hello", "id": "1", "version": PROTOCOL_VERSION},
        {"kind": "compile", "id": "2", "script": ok_script},
        {"kind": "compile", "id": "3", "script": missing_model},
        {"kind": "compile", "id": "4", "script": undefined_behavior},
        {"kind": "execute", "id": "5", "script": ok_script, "limits": limits},
        {"kind": "execute", "id": "6", "script": junction_script, "limits": limits},
        {"kind": "execute", "id": "7", "script": overlap, "limits": limits},
        {"kind": "bogus", "id": "8"},
        {"kind": "shutdown", "id": "9"},
    ]
    return requests


def main() -> None:
    maps = load_map_catalog(data_dir() / "maps")
    server = BuiltinExecutorServer(maps)
    TRANSCRIPT_PATH.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for request in transcript_requests():
        response = server.handle(request)
        lines.append(encode({"send": request, "expect": response}))
    TRANSCRIPT_PATH.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(lines)} transcript steps to {TRANSCRIPT_PATH}")


if __name__ == "__main__":
    main()
