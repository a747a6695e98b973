"""Knowledge base of description-snippet pairs with top-k cosine retrieval.

Embeddings are pluggable: the default is a deterministic local character
3-gram hashed term-frequency vector (dimension 512, L2-normalized), so the
whole test suite runs offline. A remote embedding client with the same
interface lives in the gateway module.
"""

from __future__ import annotations

import hashlib
import json
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol

import numpy as np

from .dsl.ast import KB_CATEGORIES
from .dsl.diagnostics import Diagnostic, SourceSpan, compile_error
from .dsl.fragments import parse_fragment

EMBED_DIM = 512


class KbError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


class Embedder(Protocol):
    def __call__(self, text: str) -> np.ndarray: ...


def embed(text: str) -> np.ndarray:
    """Deterministic local embedding: hashed character 3-gram counts."""
    if not text:
        raise KbError("embed.empty_text", "cannot embed empty text")
    padded = f" {text.lower()} "
    vector = np.zeros(EMBED_DIM, dtype=np.float64)
    for i in range(len(padded) - 2):
        gram = padded[i : i + 3]
        slot = zlib.crc32(gram.encode("utf-8")) % EMBED_DIM
        vector[slot] += 1.0
    norm = float(np.linalg.norm(vector))
    if norm == 0.0:
        raise KbError("embed.empty_text", "text has no embeddable content")
    return vector / norm


@dataclass(frozen=True)
class KbEntry:
    id: str
    category: str
    description: str
    snippet: str
    embedding: np.ndarray = field(compare=False, repr=False)


@dataclass(frozen=True)
class RetrievalHit:
    entry: KbEntry
    score: float


class KnowledgeBase:
    def __init__(self, entries: list[KbEntry], embedder: Embedder = embed):
        self.entries = list(entries)
        self._embedder = embedder
        self._by_category: dict[str, list[KbEntry]] = {c: [] for c in KB_CATEGORIES}
        for entry in self.entries:
            self._by_category.setdefault(entry.category, []).append(entry)

    def __len__(self) -> int:
        return len(self.entries)

    def categories(self) -> list[str]:
        return list(self._by_category)

    def retrieve(self, query: str, category: str, k: int) -> list[RetrievalHit]:
        """Top-k entries of ``category`` by cosine similarity, ties broken by
        insertion order."""
        if k < 1:
            raise ValueError("k must be >= 1")
        if category not in self._by_category:
            raise KbError("kb.unknown_category", f"unknown category {category!r}")
        query_vec = self._embedder(query)
        scored = [
            (entry, float(np.dot(query_vec, entry.embedding)))
            for entry in self._by_category[category]
        ]
        # Stable sort on descending score keeps insertion order among ties.
        scored.sort(key=lambda pair: -pair[1])
        return [RetrievalHit(entry, score) for entry, score in scored[:k]]


def content_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def load_kb(
    path: str | Path,
    embedder: Embedder = embed,
    cache_path: str | Path | None = None,
) -> KnowledgeBase:
    """Load a line-delimited KB file; embeddings come from the sidecar cache
    when the content hash matches, otherwise they are computed (and the cache
    rewritten when a path was given)."""
    path = Path(path)
    cache: dict[str, list[float]] = {}
    if cache_path is not None and Path(cache_path).exists():
        try:
            cache = json.loads(Path(cache_path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError):
            cache = {}

    entries: list[KbEntry] = []
    seen_ids: set[str] = set()
    cache_dirty = False
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise KbError("kb.parse_error", f"line {line_no}: invalid record ({exc})") from exc
        missing = {"id", "category", "description", "snippet"} - set(record)
        if missing:
            raise KbError("kb.parse_error", f"line {line_no}: missing fields {sorted(missing)}")
        if record["id"] in seen_ids:
            raise KbError("kb.parse_error", f"line {line_no}: duplicate entry id {record['id']!r}")
        seen_ids.add(record["id"])
        key = content_hash(record["description"])
        if key in cache:
            vector = np.asarray(cache[key], dtype=np.float64)
        else:
            vector = embedder(record["description"])
            cache[key] = [float(v) for v in vector]
            cache_dirty = True
        entries.append(
            KbEntry(
                id=record["id"],
                category=record["category"],
                description=record["description"],
                snippet=record["snippet"],
                embedding=vector,
            )
        )
    if cache_path is not None and cache_dirty:
        Path(cache_path).write_text(json.dumps(cache), encoding="utf-8")
    return KnowledgeBase(entries, embedder)


def validate_kb(kb: KnowledgeBase) -> list[Diagnostic]:
    """Every snippet must parse in its region's fragment grammar; unknown
    categories and broken snippets are reported with their entry ids."""
    diagnostics: list[Diagnostic] = []
    for index, entry in enumerate(kb.entries, start=1):
        span = SourceSpan(index, 1, 0)
        if entry.category not in KB_CATEGORIES:
            diagnostics.append(
                compile_error(
                    "kb.parse_error",
                    f"entry {entry.id!r}: unknown category {entry.category!r}",
                    span,
                )
            )
            continue
        _, errors = parse_fragment(entry.snippet, entry.category)
        for error in errors:
            diagnostics.append(
                compile_error(
                    "kb.bad_snippet",
                    f"entry {entry.id!r}: {error.code}: {error.message}",
                    span,
                )
            )
    return diagnostics


def save_kb(entries: list[dict], path: str | Path) -> None:
    """Write KB records as line-delimited JSON (used by the corpus builder)."""
    lines = [json.dumps(record, ensure_ascii=False) for record in entries]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
