#!/usr/bin/env python3
"""Pin the bridge conformance transcripts.

Copies the published builtin-executor transcript (the protocol's conformance
suite) into the test data, then records this bridge's own golden responses to
the same request sequence against the stubbed Scenic frontend.
"""

from __future__ import annotations

import json
import shutil
import sys
from pathlib import Path

BRIDGE_ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(BRIDGE_ROOT / "src"))

from carla_bridge.frontend import StubScenicFrontend  # noqa: E402
from carla_bridge.server import handle_request  # noqa: E402
from carla_bridge.wire import encode  # noqa: E402

BUILTIN_TRANSCRIPT = (
    BRIDGE_ROOT.parent / "src" / "scengen" / "data" / "fixtures" / "transcripts" / "builtin.jsonl"
)
DATA_DIR = BRIDGE_ROOT / "tests" / "data"


def main() -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    shutil.copy(BUILTIN_TRANSCRIPT, DATA_DIR / "builtin.jsonl")

    frontend = StubScenicFrontend()
    lines = []
    for raw in (DATA_DIR / "builtin.jsonl").read_text(encoding="utf-8").splitlines():
        step = json.loads(raw)
        response = handle_request(step["send"], frontend)
        lines.append(encode({"send": step["send"], "expect": response}))
    (DATA_DIR / "bridge.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(lines)} golden steps to {DATA_DIR / 'bridge.jsonl'}")


if __name__ == "__main__":
    main()
