"""Line-delimited stdio protocol between the pipeline and external executors.

Version string: ``arise-exec/1``. One JSON record per line, canonical
serialization (sorted keys, compact separators) so transcripts compare
byte-for-byte. Requests: hello, compile, execute, shutdown; every request is
answered exactly once, matched by id.

Running ``python -m scengen.protocol`` serves the builtin executor behind
this protocol; external bridges implement the same wire contract.
"""

from __future__ import annotations

import argparse
import json
import queue
import subprocess
import sys
import threading
from pathlib import Path

from .config import data_dir
from .dsl.analyzer import analyze
from .dsl.diagnostics import Diagnostic
from .dsl.parser import compile_source
from .sim.executor import (
    ExecStatus,
    ExecutionLimits,
    ExecutionResult,
    diagnostic_from_record,
    diagnostic_to_record,
    execute,
)
from .sim.roadnet import RoadNetwork, load_map_catalog

PROTOCOL_VERSION = "arise-exec/1"
DEFAULT_REQUEST_TIMEOUT = 120.0


def encode(record: dict) -> str:
    """Canonical single-line serialization used by both sides."""
    return json.dumps(record, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


class ProtocolError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


# -- server: the builtin executor behind the protocol --


class BuiltinExecutorServer:
    def __init__(self, maps: dict[str, RoadNetwork], default_map: str = "straight2"):
        self.maps = maps
        self.default_map = default_map

    def handle(self, request: dict) -> dict:
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
            diagnostics = self._compile(request.get("script", ""))
            return {
                "id": rid,
                "status": "ok",
                "diagnostics": [diagnostic_to_record(d) for d in diagnostics],
            }
        if kind == "execute":
            result = self._execute(request.get("script", ""), request.get("limits", {}))
            return {
                "id": rid,
                "status": result.status.value,
                "diagnostics": [diagnostic_to_record(d) for d in result.diagnostics],
                "spawn_attempts_used": result.spawn_attempts_used,
            }
        if kind == "shutdown":
            return {"id": rid, "status": "ok", "diagnostics": []}
        return {
            "id": rid,
            "status": "protocol_error",
            "diagnostics": [],
            "error": f"unknown request kind {kind!r}",
        }

    def _compile(self, script: str) -> list[Diagnostic]:
        module, diagnostics = compile_source(script)
        if module is None:
            return diagnostics
        return analyze(module, set(self.maps))

    def _execute(self, script: str, limits_record: dict) -> ExecutionResult:
        module, diagnostics = compile_source(script)
        if module is None:
            raise ProtocolError("exec.protocol_error", "execute request with uncompilable script")
        limits = ExecutionLimits(
            max_spawn_attempts=int(limits_record.get("max_spawn_attempts", 15)),
            sim_steps=int(limits_record.get("sim_steps", 200)),
            step_dt=float(limits_record.get("step_dt", 0.1)),
            seed=int(limits_record.get("seed", 0)),
        )
        network = self.maps.get(module.map_name or self.default_map, self.maps[self.default_map])
        return execute(module, network, limits)


def serve(stdin=None, stdout=None, maps_dir: str | Path | None = None) -> None:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    maps = load_map_catalog(maps_dir or data_dir() / "maps")
    server = BuiltinExecutorServer(maps)
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
        try:
            response = server.handle(request)
        except ProtocolError as exc:
            response = {
                "id": request.get("id", "?"),
                "status": "protocol_error",
                "diagnostics": [],
                "error": exc.message,
            }
        stdout.write(encode(response) + "\n")
        stdout.flush()
        if request.get("kind") == "shutdown":
            break


# -- client: session over a child process --


class ExecutorSession:
    """One child process speaking the protocol; single-owner, not shared."""

    def __init__(self, cmd: list[str] | str, timeout: float = DEFAULT_REQUEST_TIMEOUT):
        if isinstance(cmd, str):
            cmd = cmd.split()
        self.timeout = timeout
        self._next_id = 0
        self._pending: dict[str, dict] = {}
        self._queue: queue.Queue[str | None] = queue.Queue()
        try:
            self.child = subprocess.Popen(
                cmd,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise ProtocolError("exec.bridge_crash", f"cannot start executor: {exc}") from exc
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()
        hello = self.request({"kind": "hello", "version": PROTOCOL_VERSION})
        if hello.get("status") != "ok" or hello.get("version") != PROTOCOL_VERSION:
            self.close(send_shutdown=False)
            raise ProtocolError(
                "exec.protocol_error",
                f"hello failed: status={hello.get('status')!r} version={hello.get('version')!r}",
            )

    def _read_loop(self) -> None:
        assert self.child.stdout is not None
        for line in self.child.stdout:
            self._queue.put(line)
        self._queue.put(None)  # EOF marker

    def request(self, payload: dict) -> dict:
        self._next_id += 1
        rid = str(self._next_id)
        record = dict(payload)
        record["id"] = rid
        try:
            assert self.child.stdin is not None
            self.child.stdin.write(encode(record) + "\n")
            self.child.stdin.flush()
        except (OSError, ValueError) as exc:
            raise ProtocolError("exec.bridge_crash", f"executor pipe closed: {exc}") from exc
        while rid not in self._pending:
            try:
                line = self._queue.get(timeout=self.timeout)
            except queue.Empty:
                raise ProtocolError(
                    "exec.bridge_timeout", f"no response to request {rid} in {self.timeout}s"
                )
            if line is None:
                raise ProtocolError("exec.bridge_crash", "executor exited mid-request")
            try:
                response = json.loads(line)
            except json.JSONDecodeError:
                raise ProtocolError("exec.protocol_error", f"unparseable response line: {line!r}")
            self._pending[str(response.get("id"))] = response
        return self._pending.pop(rid)

    def compile(self, script: str) -> list[Diagnostic]:
        response = self.request({"kind": "compile", "script": script})
        if response.get("status") == "protocol_error":
            raise ProtocolError("exec.protocol_error", response.get("error", "protocol error"))
        return [diagnostic_from_record(r) for r in response.get("diagnostics", [])]

    def execute(self, script: str, limits: ExecutionLimits) -> ExecutionResult:
        response = self.request(
            {
                "kind": "execute",
                "script": script,
                "limits": {
                    "max_spawn_attempts": limits.max_spawn_attempts,
                    "sim_steps": limits.sim_steps,
                    "step_dt": limits.step_dt,
                    "seed": limits.seed,
                },
            }
        )
        if response.get("status") == "protocol_error":
            raise ProtocolError("exec.protocol_error", response.get("error", "protocol error"))
        return ExecutionResult(
            status=ExecStatus(response["status"]),
            spawn_attempts_used=int(response.get("spawn_attempts_used", 0)),
            diagnostics=tuple(diagnostic_from_record(r) for r in response.get("diagnostics", [])),
            trajectory_summary=(),
        )

    def validate(
        self, source: str, limits: ExecutionLimits
    ) -> tuple[list[Diagnostic], ExecutionResult | None]:
        diagnostics = self.compile(source)
        if diagnostics:
            return diagnostics, None
        return [], self.execute(source, limits)

    def close(self, send_shutdown: bool = True) -> None:
        try:
            if send_shutdown and self.child.poll() is None:
                self.request({"kind": "shutdown"})
        except ProtocolError:
            pass
        finally:
            if self.child.poll() is None:
                try:
                    self.child.terminate()
                    self.child.wait(timeout=5)
                except (OSError, subprocess.TimeoutExpired):
                    self.child.kill()

    def __enter__(self) -> "ExecutorSession":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


class _SessionValidator:
    def __init__(self, factory: "BridgeValidatorFactory", limits: ExecutionLimits):
        self.factory = factory
        self.limits = limits

    def __call__(self, source: str) -> tuple[list[Diagnostic], ExecutionResult | None]:
        session = self.factory.session()
        try:
            return session.validate(source, self.limits)
        except ProtocolError:
            self.factory.discard()  # crashed child: next call restarts it
            raise


class BridgeValidatorFactory:
    """Per-worker sessions against an external executor command; a crashed
    child is replaced on the next validation."""

    def __init__(self, cmd: str, timeout: float = DEFAULT_REQUEST_TIMEOUT):
        self.cmd = cmd
        self.timeout = timeout
        self._local = threading.local()

    def session(self) -> ExecutorSession:
        session = getattr(self._local, "session", None)
        if session is None or session.child.poll() is not None:
            session = ExecutorSession(self.cmd, timeout=self.timeout)
            self._local.session = session
        return session

    def discard(self) -> None:
        session = getattr(self._local, "session", None)
        if session is not None:
            session.close(send_shutdown=False)
            self._local.session = None

    def __call__(self, default_map: str, limits: ExecutionLimits) -> _SessionValidator:
        return _SessionValidator(self, limits)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="Serve the builtin executor over stdio.")
    parser.add_argument("--maps", help="maps directory (default: bundled)")
    args = parser.parse_args(argv)
    serve(maps_dir=args.maps)
    return 0


if __name__ == "__main__":
    sys.exit(main())
