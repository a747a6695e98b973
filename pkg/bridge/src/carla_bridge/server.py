"""Protocol server loop.

Single-request-at-a-time: read a line, answer it, repeat until shutdown or
EOF. Scenario errors never crash the loop; they become diagnostics in the
response. Only a broken pipe ends the process abnormally.
"""

from __future__ import annotations

import json
import sys

from .frontend import ScenicFrontend
from .wire import PROTOCOL_VERSION, Limits, encode


def handle_request(request: dict, frontend: ScenicFrontend) -> dict:
    kind = request.get("kind")
    rid = request.get("id", "?")
    if kind == "hello":
        if request.get("version") not in (None, PROTOCOL_VERSION):
            return {
                "id": rid,
                "status": "protocol_error",
                "diagnostics": [],
                "error": f"unsupported version {request.get('version')!r}",
            }
        return {"id": rid, "status": "ok", "version": PROTOCOL_VERSION, "diagnostics": []}
    if kind == "compile":
        try:
            diagnostics = frontend.compile(request.get("script", ""))
        except Exception as exc:  # frontend bug: report, keep serving
            return {
                "id": rid,
                "status": "protocol_error",
                "diagnostics": [],
                "error": f"frontend failure: {exc}",
            }
        return {"id": rid, "status": "ok", "diagnostics": [d.to_wire() for d in diagnostics]}
    if kind == "execute":
        try:
            outcome = frontend.execute(
                request.get("script", ""), Limits.from_wire(request.get("limits", {}))
            )
        except Exception as exc:
            return {
                "id": rid,
                "status": "protocol_error",
                "diagnostics": [],
                "error": f"frontend failure: {exc}",
            }
        return {
            "id": rid,
            "status": outcome.status,
            "diagnostics": [d.to_wire() for d in outcome.diagnostics],
            "spawn_attempts_used": outcome.spawn_attempts_used,
        }
    if kind == "shutdown":
        return {"id": rid, "status": "ok", "diagnostics": []}
    return {
        "id": rid,
        "status": "protocol_error",
        "diagnostics": [],
        "error": f"unknown request kind {kind!r}",
    }


def serve(frontend: ScenicFrontend, stdin=None, stdout=None) -> None:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
        except json.JSONDecodeError:
            stdout.write(
                encode({"id": "?", "status": "protocol_error", "diagnostics": [], "error": "bad json"})
                + "\n"
            )
            stdout.flush()
            continue
        response = handle_request(request, frontend)
        stdout.write(encode(response) + "\n")
        stdout.flush()
        if request.get("kind") == "shutdown":
            break
