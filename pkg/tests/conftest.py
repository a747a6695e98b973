import json
from pathlib import Path

import pytest

from scengen.config import data_dir
from scengen.kb import load_kb
from scengen.runner import load_prompts
from scengen.sim import load_map_catalog

TESTS_DIR = Path(__file__).parent
DATA_DIR = data_dir()


@pytest.fixture(scope="session")
def data_path() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def corpus() -> dict[str, str]:
    """The 40 bundled seed scripts, keyed by scenario id."""
    scripts = {}
    for path in sorted((DATA_DIR / "scripts").glob("*.sdsl")):
        scripts[path.stem] = path.read_text(encoding="utf-8")
    assert len(scripts) == 40
    return scripts


@pytest.fixture(scope="session")
def maps():
    return load_map_catalog(DATA_DIR / "maps")


@pytest.fixture(scope="session")
def kb():
    return load_kb(DATA_DIR / "kb.jsonl", cache_path=DATA_DIR / "kb.embcache.json")


@pytest.fixture(scope="session")
def prompts():
    return load_prompts(DATA_DIR / "prompts.jsonl")


@pytest.fixture(scope="session")
def replay_dir() -> Path:
    return DATA_DIR / "fixtures" / "replay"


@pytest.fixture(scope="session")
def transcript_steps() -> list[dict]:
    path = DATA_DIR / "fixtures" / "transcripts" / "builtin.jsonl"
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]
