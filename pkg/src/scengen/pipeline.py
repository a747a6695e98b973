"""Generation pipeline: semantic extraction, retrieval-guided snippet
generation, and region-structured script assembly.

Each scenario run flows extraction -> retrieval/snippets -> assembly; the
assembled source then goes to the validate gate (and, on failure, the repair
loop). All LLM traffic goes through the gateway with stage tags.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

from .dsl.ast import CANONICAL_REGION_ORDER
from .dsl.fragments import parse_fragment
from .gateway import ChatRequest, ChatResponse, Provider, RequestTag
from .kb import KnowledgeBase, RetrievalHit

log = logging.getLogger("scengen.pipeline")

CATEGORIES = (
    "straight_obstacle",
    "turning_obstacle",
    "lane_changing",
    "vehicle_passing",
    "red_light_running",
    "unprotected_left_turn",
    "right_turn",
    "crossing_negotiation",
)

# Intersection maps for the turning-flavored categories, straight otherwise.
DEFAULT_MAPS = {
    "straight_obstacle": "straight2",
    "turning_obstacle": "fourway_signal",
    "lane_changing": "straight2",
    "vehicle_passing": "straight2",
    "red_light_running": "fourway_signal",
    "unprotected_left_turn": "fourway_signal",
    "right_turn": "t_junction",
    "crossing_negotiation": "fourway_signal",
}

MANDATORY_FIELDS = ("behavior", "geometry", "spawn_relation", "adversarial_object")
OPTIONAL_FIELDS = ("requirements", "other_objects", "weather")
ALL_FIELDS = MANDATORY_FIELDS + OPTIONAL_FIELDS

FIELD_TO_REGION = {
    "behavior": "behavior",
    "geometry": "geometry",
    "spawn_relation": "spawn",
    "adversarial_object": "adversarial_object",
    "requirements": "requirements",
    "other_objects": "other_objects",
    "weather": "weather",
}

DEFAULT_COMPONENTS = {
    "behavior": "the adversarial vehicle follows its lane ahead of the ego vehicle",
    "geometry": "a straight two-lane road",
    "spawn_relation": "the adversary starts ahead of the ego vehicle in the same lane",
    "adversarial_object": "an adversarial car",
}

DEFAULT_WEATHER_SNIPPET = 'param weather = "clear"\nparam time_of_day = "noon"'
DEFAULT_DEFAULTS_SNIPPET = "model basic"
DEFAULT_SPAWN_SNIPPET = "ego = new Car on lane(0), with behavior FollowLane(8)"

_ABSENT = ("-", "", "none", "n/a")


class PipelineError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


@dataclass(frozen=True)
class ScenarioPrompt:
    id: str
    category: str
    text: str

    def __post_init__(self) -> None:
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown category {self.category!r}")
        if not self.text.strip():
            raise ValueError("prompt text must be non-empty")


@dataclass(frozen=True)
class SemanticDecomposition:
    behavior: str
    geometry: str
    spawn_relation: str
    adversarial_object: str
    requirements: str | None = None
    other_objects: str | None = None
    weather: str | None = None

    def populated_fields(self) -> list[tuple[str, str]]:
        out = [(name, getattr(self, name)) for name in MANDATORY_FIELDS]
        for name in OPTIONAL_FIELDS:
            value = getattr(self, name)
            if value is not None:
                out.append((name, value))
        return out


@dataclass(frozen=True)
class SnippetSet:
    snippets: dict[str, str] = field(default_factory=dict)  # region label -> fragment
    fallback_regions: frozenset[str] = frozenset()

    def get(self, region: str) -> str | None:
        return self.snippets.get(region)


@dataclass(frozen=True)
class PipelineConfig:
    temperature: float = 1.0
    model: str = ""
    top_k: int = 2
    max_tokens: int = 2048


# -- extraction (few-shot prompted component decomposition) --

EXTRACT_SYSTEM = """\
You decompose traffic scenario descriptions into semantic components.
Reply with exactly seven lines, one per component, in this format:

behavior: <how the adversarial agent behaves>
geometry: <road layout>
spawn_relation: <initial relative positions of ego and adversary>
adversarial_object: <what the adversarial agent is>
requirements: <explicit constraints, or ->
other_objects: <objects besides ego and adversary, or ->
weather: <weather or lighting conditions, or ->

Write '-' for requirements, other_objects, or weather when the description
gives no cue for them. No other text."""

EXTRACT_FEWSHOT_INPUT = (
    "During a rainy evening the ego vehicle approaches a junction while a "
    "delivery truck suddenly runs the red light from the left; a cyclist "
    "waits at the corner. The ego must keep at least 2 meters of clearance."
)
EXTRACT_FEWSHOT_OUTPUT = """\
behavior: suddenly runs the red light from the left
geometry: a signalized four-way junction
spawn_relation: the adversary approaches the junction from the left of the ego vehicle
adversarial_object: a delivery truck
requirements: keep at least 2 meters of clearance
other_objects: a cyclist waiting at the corner
weather: rainy evening"""

_FORMAT_REMINDER = (
    "Your previous reply did not match the required format. Reply with exactly "
    "the seven 'key: value' lines (behavior, geometry, spawn_relation, "
    "adversarial_object, requirements, other_objects, weather) and nothing else."
)


def _parse_extraction(content: str) -> dict[str, str] | None:
    fields: dict[str, str] = {}
    for raw in content.strip().splitlines():
        line = raw.strip()
        if not line:
            continue
        match = re.match(r"^([a-z_]+)\s*:\s*(.*)$", line)
        if not match or match.group(1) not in ALL_FIELDS:
            return None
        key = match.group(1)
        if key in fields:
            return None
        fields[key] = match.group(2).strip()
    if any(name not in fields for name in MANDATORY_FIELDS):
        return None
    return fields


def extract_components(
    prompt: ScenarioPrompt, provider: Provider, config: PipelineConfig = PipelineConfig()
) -> SemanticDecomposition:
    messages = [
        ("system", EXTRACT_SYSTEM),
        ("user", EXTRACT_FEWSHOT_INPUT),
        ("assistant", EXTRACT_FEWSHOT_OUTPUT),
        ("user", prompt.text),
    ]
    request = ChatRequest(
        messages=tuple(messages),
        temperature=config.temperature,
        model=config.model,
        max_tokens=config.max_tokens,
        tag=RequestTag.EXTRACT,
    )
    response = provider.complete(request)
    fields = _parse_extraction(response.content)
    if fields is None:
        retry = ChatRequest(
            messages=request.messages
            + (("assistant", response.content), ("user", _FORMAT_REMINDER)),
            temperature=config.temperature,
            model=config.model,
            max_tokens=config.max_tokens,
            tag=RequestTag.EXTRACT,
        )
        response = provider.complete(retry)
        fields = _parse_extraction(response.content)
        if fields is None:
            raise PipelineError("extract.unparseable", f"unusable extraction for {prompt.id}")

    def mandatory(name: str) -> str:
        value = fields.get(name, "")
        return DEFAULT_COMPONENTS[name] if value.lower() in _ABSENT else value

    def optional(name: str) -> str | None:
        value = fields.get(name, "")
        return None if value.lower() in _ABSENT else value

    return SemanticDecomposition(
        behavior=mandatory("behavior"),
        geometry=mandatory("geometry"),
        spawn_relation=mandatory("spawn_relation"),
        adversarial_object=mandatory("adversarial_object"),
        requirements=optional("requirements"),
        other_objects=optional("other_objects"),
        weather=optional("weather"),
    )


# -- snippet generation (retrieval-guided few-shot) --

SNIPPET_SYSTEM = """\
You write fragments of a small traffic-scenario DSL. A fragment belongs to one
region of a script and may only use that region's statement forms. Reply with
one fenced code block containing only the fragment, nothing else."""


def strip_code_fences(content: str) -> str:
    """Recover a code fragment from prose-wrapped model output."""
    match = re.search(r"```[a-zA-Z0-9_-]*\n(.*?)```", content, flags=re.DOTALL)
    body = match.group(1) if match else content
    return body.strip("\n").rstrip() + "\n"


def _snippet_prompt(region: str, description: str, hits: list[RetrievalHit]) -> str:
    parts = [f"Region: {region}", ""]
    for index, hit in enumerate(hits, start=1):
        parts.append(f"Example {index}:")
        parts.append(f"Description: {hit.entry.description}")
        parts.append("Snippet:")
        parts.append(f"```sdsl\n{hit.entry.snippet.rstrip()}\n```")
        parts.append("")
    parts.append("Now write the snippet for:")
    parts.append(f"Description: {description}")
    parts.append("Snippet:")
    return "\n".join(parts)


def generate_snippets(
    decomp: SemanticDecomposition,
    kb: KnowledgeBase,
    provider: Provider,
    config: PipelineConfig = PipelineConfig(),
) -> SnippetSet:
    snippets: dict[str, str] = {}
    fallbacks: set[str] = set()
    for field_name, text in decomp.populated_fields():
        region = FIELD_TO_REGION[field_name]
        hits = kb.retrieve(text, region, config.top_k)
        if not hits:
            continue
        request = ChatRequest(
            messages=(("system", SNIPPET_SYSTEM), ("user", _snippet_prompt(region, text, hits))),
            temperature=config.temperature,
            model=config.model,
            max_tokens=config.max_tokens,
            tag=RequestTag.SNIPPET,
        )
        response = provider.complete(request)
        snippet = strip_code_fences(response.content)
        _, diagnostics = parse_fragment(snippet, region)
        if diagnostics:
            reminder = (
                f"The snippet failed to parse for region {region!r}:\n"
                + "\n".join(d.render() for d in diagnostics)
                + "\nReply with one fenced code block containing a corrected fragment."
            )
            retry = ChatRequest(
                messages=request.messages
                + (("assistant", response.content), ("user", reminder)),
                temperature=config.temperature,
                model=config.model,
                max_tokens=config.max_tokens,
                tag=RequestTag.SNIPPET,
            )
            response = provider.complete(retry)
            snippet = strip_code_fences(response.content)
            _, diagnostics = parse_fragment(snippet, region)
            if diagnostics:
                # Verbatim rank-1 fallback keeps the pipeline total.
                snippet = hits[0].entry.snippet.rstrip() + "\n"
                fallbacks.add(region)
                log.warning("snippet.fallback_used region=%s", region)
        snippets[region] = snippet
    return SnippetSet(snippets=snippets, fallback_regions=frozenset(fallbacks))


# -- assembly --


def assemble(
    snippets: SnippetSet,
    map_hint: str = "straight2",
    defaults_snippet: str = DEFAULT_DEFAULTS_SNIPPET,
) -> str:
    """Concatenate region snippets (or defaults) under region markers, in the
    canonical region order. Purely syntactic; the validate gate judges the
    result."""
    from .dsl.ast import MapDecl
    from .dsl.fragments import parse_fragment as _fragment

    blocks: list[str] = []
    for region in CANONICAL_REGION_ORDER:
        content = snippets.get(region)
        if region == "geometry":
            base = (content or "").rstrip()
            statements, errors = _fragment(base, "geometry") if base else ([], [])
            has_map = any(isinstance(s, MapDecl) for s in statements) and not errors
            if not has_map:
                base = f'map "{map_hint}"' + (f"\n{base}" if base else "")
            content = base
        elif region == "weather" and content is None:
            content = DEFAULT_WEATHER_SNIPPET
        elif region == "defaults":
            content = defaults_snippet
        elif region == "spawn" and content is None:
            content = DEFAULT_SPAWN_SNIPPET
        body = (content or "").rstrip()
        block = f"#-- region: {region}"
        if body:
            block += f"\n{body}"
        blocks.append(block)
    return "\n\n".join(blocks) + "\n"
