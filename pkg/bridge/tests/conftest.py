import json
import queue
import subprocess
import sys
import threading
from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"

STUB_SERVER_CMD = [sys.executable, "-m", "carla_bridge", "--stub"]


class MiniClient:
    """Minimal protocol client for fault-injection tests (independent of the
    pipeline side's client)."""

    def __init__(self, cmd, timeout=10.0):
        self.timeout = timeout
        self.child = subprocess.Popen(
            cmd, stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True, bufsize=1
        )
        self._lines: queue.Queue = queue.Queue()
        threading.Thread(target=self._pump, daemon=True).start()

    def _pump(self):
        for line in self.child.stdout:
            self._lines.put(line)
        self._lines.put(None)

    def send(self, record: dict) -> None:
        self.child.stdin.write(json.dumps(record) + "\n")
        self.child.stdin.flush()

    def recv(self):
        line = self._lines.get(timeout=self.timeout)
        return None if line is None else json.loads(line)

    def close(self):
        if self.child.poll() is None:
            self.child.kill()
        self.child.wait(timeout=5)


@pytest.fixture
def client():
    c = MiniClient(STUB_SERVER_CMD)
    yield c
    c.close()


@pytest.fixture(scope="session")
def builtin_transcript():
    return [json.loads(l) for l in (DATA_DIR / "builtin.jsonl").read_text().splitlines()]


@pytest.fixture(scope="session")
def bridge_transcript():
    return [json.loads(l) for l in (DATA_DIR / "bridge.jsonl").read_text().splitlines()]
