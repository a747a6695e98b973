"""LLM-based semantic conformity evaluator.

Two stages: a session is first primed with a condensed DSL reference and
scored exemplar pairs, then scores description/script pairs against seven
rubric criteria (0..10 each). Parsing is strict with a single format-reminder
retry, mirroring the extraction stage.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from .gateway import ChatRequest, Provider, RequestTag
from .metrics import population_std, scs

CRITERIA = (
    "adversarial_type",
    "behavior",
    "geometry",
    "weather",
    "elements",
    "spawn",
    "requirements",
)

PRIMING_CHAR_BUDGET = 32_000

RUBRIC_SYSTEM = """\
You evaluate how faithfully a traffic-scenario script reflects its natural
language description. Score seven criteria from 0 (absent or contradicted)
to 10 (fully and precisely realized):

adversarial_type, behavior, geometry, weather, elements, spawn, requirements

Reply with exactly seven lines, one per criterion, formatted as
'<criterion>: <integer 0-10> - <one short justification>'. No other text."""

_EVAL_FORMAT_REMINDER = (
    "Your previous reply did not match the required format. Reply with exactly "
    "seven '<criterion>: <integer> - <justification>' lines for "
    + ", ".join(CRITERIA)
    + ", and nothing else."
)


class EvalError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


@dataclass(frozen=True)
class CriteriaScores:
    scores: dict[str, int]
    rationale: dict[str, str]

    def __post_init__(self) -> None:
        if set(self.scores) != set(CRITERIA):
            raise EvalError("eval.unparseable", f"need exactly the criteria {CRITERIA}")
        for name, value in self.scores.items():
            if not 0 <= value <= 10:
                raise EvalError("eval.unparseable", f"{name} score {value} outside 0..10")

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(self.scores[name] for name in CRITERIA)

    def scs_percent(self) -> float:
        return scs(list(self.as_tuple())) * 100.0


@dataclass(frozen=True)
class ConsistencyStats:
    minimum: float
    maximum: float
    mean: float
    std: float  # percentage points
    count: int


@dataclass(frozen=True)
class EvaluatorSession:
    provider: Provider
    priming: tuple[tuple[str, str], ...]  # leading messages reused per score call
    temperature: float = 0.3
    model: str = ""


def load_reference_material(eval_dir: str | Path) -> str:
    """Render the bundled condensed DSL reference plus scored exemplar pairs
    into the priming text."""
    eval_dir = Path(eval_dir)
    parts = [(eval_dir / "reference.md").read_text(encoding="utf-8").rstrip()]
    exemplar_path = eval_dir / "exemplars.jsonl"
    for line in exemplar_path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        block = [
            "Scored example:",
            f"Description: {record['description']}",
            f"Script:\n```sdsl\n{record['script'].rstrip()}\n```",
            "Scores:",
        ]
        for name in CRITERIA:
            block.append(f"{name}: {record['scores'][name]} - {record['rationale'][name]}")
        parts.append("\n".join(block))
    return "\n\n".join(parts)


def prime(
    provider: Provider,
    reference_material: str,
    temperature: float = 0.3,
    model: str = "",
) -> EvaluatorSession:
    if len(reference_material) + len(RUBRIC_SYSTEM) > PRIMING_CHAR_BUDGET:
        raise EvalError("eval.priming_too_large", "reference material exceeds the prompt budget")
    priming = (
        ("system", RUBRIC_SYSTEM),
        ("user", reference_material),
        ("assistant", "Understood. Send a description and script to score."),
    )
    return EvaluatorSession(provider=provider, priming=priming, temperature=temperature, model=model)


def _parse_scores(content: str) -> CriteriaScores | None:
    scores: dict[str, int] = {}
    rationale: dict[str, str] = {}
    for raw in content.strip().splitlines():
        line = raw.strip()
        if not line:
            continue
        match = re.match(r"^([a-z_]+)\s*:\s*(\d+)\s*(?:-\s*(.*))?$", line)
        if not match or match.group(1) not in CRITERIA:
            return None
        name = match.group(1)
        if name in scores:
            return None
        value = int(match.group(2))
        if value > 10:
            return None
        scores[name] = value
        rationale[name] = (match.group(3) or "").strip()
    if set(scores) != set(CRITERIA):
        return None
    return CriteriaScores(scores=scores, rationale=rationale)


def score(session: EvaluatorSession, description: str, script: str) -> CriteriaScores:
    body = (
        f"Description: {description}\n\n"
        f"Script:\n```sdsl\n{script.rstrip()}\n```\n\n"
        "Score the seven criteria."
    )
    request = ChatRequest(
        messages=session.priming + (("user", body),),
        temperature=session.temperature,
        model=session.model,
        tag=RequestTag.EVALUATE,
    )
    response = session.provider.complete(request)
    parsed = _parse_scores(response.content)
    if parsed is None:
        retry = ChatRequest(
            messages=request.messages
            + (("assistant", response.content), ("user", _EVAL_FORMAT_REMINDER)),
            temperature=session.temperature,
            model=session.model,
            tag=RequestTag.EVALUATE,
        )
        response = session.provider.complete(retry)
        parsed = _parse_scores(response.content)
        if parsed is None:
            raise EvalError("eval.unparseable", "evaluator reply did not match the rubric format")
    return parsed


def consistency_stats(scs_values: list[float]) -> ConsistencyStats:
    """Population statistics (percent units) over repeated SCS measurements."""
    if len(scs_values) < 2:
        raise EvalError("eval.too_few_samples", "need at least 2 SCS values")
    return ConsistencyStats(
        minimum=min(scs_values),
        maximum=max(scs_values),
        mean=sum(scs_values) / len(scs_values),
        std=population_std(scs_values),
        count=len(scs_values),
    )
