"""Deterministic rule-based responder for the mock provider.

Stands in for a remote model in offline runs, demos, and fixture recording:
keyword extraction, exemplar-echo snippet generation, one-diagnostic-per-call
script repair, and heuristic rubric scoring. Every reply is a pure function
of the request, so record/replay fixtures built on it are stable.
"""

from __future__ import annotations

import re

from .gateway import ChatRequest, RequestTag

# (pattern, canonical phrase) pairs; first match wins.
_WEATHER_CUES = (
    (r"nighttime with light fog", "nighttime with light fog"),
    (r"light fog", "light fog"),
    (r"heavy rain|rainy|pouring", "heavy rain"),
    (r"drizzle|wet road", "wet road after drizzle"),
    (r"night|dark", "nighttime"),
    (r"dusk|evening", "dusk light"),
    (r"snow", "light snow"),
    (r"sunny|clear sky|clear weather|bright", "clear and sunny"),
)

_GEOMETRY_CUES = (
    (r"four-way|signaliz|traffic light|crossroads", "a signalized four-way intersection"),
    (r"t[- ]junction|side road", "a T junction with a side road"),
    (r"intersection|junction", "a signalized four-way intersection"),
    (r"highway", "a two-lane highway stretch"),
    (r"straight|two-lane", "a straight two-lane road"),
)

_ADVERSARY_CUES = (
    (r"delivery truck|truck", "an adversarial truck"),
    (r"\bbus\b|\bvan\b", "an adversarial truck"),
    (r"bicycle|cyclist|bike", "an adversarial bicycle"),
    (r"pedestrian|jaywalk", "an adversarial pedestrian"),
    (r"car|vehicle|sedan|suv", "an adversarial car"),
)

_BEHAVIOR_CUES = (
    (r"runs? the red light|running the red|ignores? the signal", "runs a red light across the junction"),
    (r"cuts? in|merges? into|lane change|changes? lane", "cuts into the ego lane and brakes"),
    (r"unprotected left|turns? left across|left turn across", "turns left across the oncoming ego path"),
    (r"turns? right", "turns right at the junction into traffic"),
    (r"overtakes?|passes? the ego|passing", "overtakes the ego vehicle at speed"),
    (r"crosses|steps? (onto|into)|darts", "crosses the road in front of the ego vehicle"),
    (r"brakes? hard|sudden(ly)? brak|slams the brakes", "brakes hard ahead of the ego vehicle"),
    (r"blocks|broken[- ]down|stalls|stopped", "stalls and blocks the ego lane"),
    (r"creeps|inches forward|negotiat", "creeps forward to negotiate the crossing"),
)

_SPAWN_CUES = (
    (r"oncoming|opposite direction", "the adversary approaches from the opposite direction"),
    (r"from the left", "the adversary approaches the junction from the left of the ego vehicle"),
    (r"from the right|side road", "the adversary approaches the junction from the right of the ego vehicle"),
    (r"adjacent lane|next lane|neighboring lane", "the adversary starts in the adjacent lane beside the ego vehicle"),
    (r"behind", "the adversary starts behind the ego vehicle"),
    (r"ahead|in front", "the adversary starts ahead of the ego vehicle in the same lane"),
    (r"at the (intersection|junction)|waiting", "ego and adversary converge on the junction"),
)

_OTHER_OBJECT_CUES = (
    (r"cones?", "traffic cones on the roadside"),
    (r"parked (car|vehicle)s?|roadside[- ]parked", "a parked car at the roadside"),
    (r"debris|barrier", "debris near the lane edge"),
    (r"bystander|waits at the corner|onlooker", "a pedestrian waiting at the corner"),
    (r"second (car|vehicle)|another (car|vehicle)|background traffic", "a second vehicle in background traffic"),
)

_REQUIREMENT_CUES = (
    (r"at least ([0-9.]+) meters?", None),  # phrase built from the match
    (r"clearance|keep clear|safe distance", "keep a safe clearance from the adversary"),
    (r"below ([0-9.]+)|speed limit", "ego speed stays below the limit"),
    (r"stay in (its|the) lane|lane keeping", "the adversary ends in the ego lane"),
)


def _first_match(text: str, cues) -> str | None:
    for pattern, phrase in cues:
        match = re.search(pattern, text)
        if match:
            if phrase is None:
                return f"keep at least {match.group(1)} meters of clearance"
            return phrase
    return None


def extract_fields(text: str) -> dict[str, str]:
    lowered = text.lower().replace("ego vehicle", "ego").replace("ego car", "ego")
    return {
        "behavior": _first_match(lowered, _BEHAVIOR_CUES)
        or "drives ahead of the ego vehicle along the lane",
        "geometry": _first_match(lowered, _GEOMETRY_CUES) or "a straight two-lane road",
        "spawn_relation": _first_match(lowered, _SPAWN_CUES)
        or "the adversary starts ahead of the ego vehicle in the same lane",
        "adversarial_object": _first_match(lowered, _ADVERSARY_CUES) or "an adversarial car",
        "requirements": _first_match(lowered, _REQUIREMENT_CUES) or "-",
        "other_objects": _first_match(lowered, _OTHER_OBJECT_CUES) or "-",
        "weather": _first_match(lowered, _WEATHER_CUES) or "-",
    }


def _render_extraction(fields: dict[str, str]) -> str:
    order = (
        "behavior",
        "geometry",
        "spawn_relation",
        "adversarial_object",
        "requirements",
        "other_objects",
        "weather",
    )
    return "\n".join(f"{key}: {fields[key]}" for key in order)


_FENCE_RE = re.compile(r"```[a-zA-Z0-9_-]*\n(.*?)```", re.DOTALL)


def _respond_snippet(request: ChatRequest) -> str:
    """Echo the first exemplar's snippet from the few-shot prompt."""
    user = request.messages[1][1]
    match = _FENCE_RE.search(user)
    body = match.group(1).rstrip() if match else "ego = new Car on lane(0)"
    return f"```sdsl\n{body}\n```"


_DIAG_RE = re.compile(r"^\[(compile|execute)/([a-z_.]+)\] (.*?)(?: @ (\d+):(\d+))?$")


def _parse_repair_prompt(body: str) -> tuple[str, list[dict]]:
    match = _FENCE_RE.search(body)
    script = match.group(1) if match else ""
    diagnostics: list[dict] = []
    in_diags = False
    for line in body.splitlines():
        if line.startswith("Diagnostics:"):
            in_diags = True
            continue
        if in_diags:
            if line.startswith("Examples of fixes:"):
                break
            head = _DIAG_RE.match(line.strip()) if not line.startswith("    at ") else None
            if head:
                diagnostics.append(
                    {
                        "phase": head.group(1),
                        "code": head.group(2),
                        "message": head.group(3),
                        "line": int(head.group(4)) if head.group(4) else None,
                        "trace": [],
                    }
                )
            elif line.startswith("    at ") and diagnostics:
                diagnostics[-1]["trace"].append(line[len("    at ") :])
    return script, diagnostics


def repair_script(script: str, diagnostics: list[dict]) -> str:
    """Apply one targeted fix for the first diagnostic."""
    if not diagnostics:
        return script
    diag = diagnostics[0]
    code = diag["code"]
    lines = script.split("\n")
    line_idx = (diag["line"] - 1) if diag.get("line") else None

    def set_line(index: int, value: str | None) -> str:
        if value is None:
            del lines[index]
        else:
            lines[index] = value
        return "\n".join(lines)

    if code == "parse.missing_model":
        return script.rstrip("\n") + "\nmodel basic\n"
    if code == "sem.missing_ego":
        return script.rstrip("\n") + "\nego = new Car on lane(0), with behavior FollowLane(8)\n"
    if code == "sem.unknown_map" and line_idx is not None:
        return set_line(line_idx, re.sub(r'map\s+"[^"]*"', 'map "fourway_signal"', lines[line_idx]))
    if code in ("sem.undefined_behavior", "sem.ego_behavior") and line_idx is not None:
        fixed = re.sub(
            r"with behavior \w+\([^)]*\)", "with behavior FollowLane(8)", lines[line_idx]
        )
        return set_line(line_idx, fixed)
    if code == "sem.bad_arity" and line_idx is not None:
        match = re.search(r"behavior '(\w+)' takes (\d+) argument", diag["message"])
        if match:
            name, arity = match.group(1), int(match.group(2))
            call = re.search(rf"with behavior {name}\(([^)]*)\)", lines[line_idx])
            if call:
                args = [a.strip() for a in call.group(1).split(",") if a.strip()]
                args = (args + ["0.7"] * arity)[:arity]
                fixed = lines[line_idx].replace(
                    call.group(0), f"with behavior {name}({', '.join(args)})"
                )
                return set_line(line_idx, fixed)
    if code == "sem.duplicate_name" and line_idx is not None:
        fixed = re.sub(r"^(\s*)(\w+)( = new| ?\()", r"\1\2_2\3", lines[line_idx], count=1)
        fixed = re.sub(r"^(\s*behavior )(\w+)", r"\1\2_2", fixed, count=1)
        return set_line(line_idx, fixed)
    if code == "sem.undefined_object" and line_idx is not None:
        return set_line(
            line_idx, re.sub(r"(= new \w+ )[^,\n]+", r"\1on lane(1)", lines[line_idx], count=1)
        )
    if code == "sem.undefined_param":
        match = re.search(r"parameter '(\w+)'", diag["message"])
        if match:
            return script.rstrip("\n") + f"\nparam {match.group(1)} = 5\n"
    if code.startswith("parse.") and line_idx is not None:
        return set_line(line_idx, None)
    if code == "exec.spawn_exhausted":
        reason = diag["trace"][-1] if diag["trace"] else diag["message"]
        return _fix_spawn(script, reason)
    if code == "exec.require_failed":
        match = re.search(r"requirement failed: (.*)$", diag["message"])
        needle = f"require {match.group(1).strip()}" if match else "require "
        for index, line in enumerate(lines):
            if line.strip().startswith(needle) or (not match and line.strip().startswith("require ")):
                return set_line(index, None)
        for index, line in enumerate(lines):
            if line.strip().startswith("require "):
                return set_line(index, None)
    if code == "exec.behavior_error":
        return _fix_behavior(script, diag)
    return script


def _fix_spawn(script: str, reason: str) -> str:
    lines = script.split("\n")
    obj = None
    named = re.search(r"object '(\w+)'", reason)
    if named:
        obj = named.group(1)

    def object_line() -> int | None:
        for index, line in enumerate(lines):
            if obj and re.match(rf"\s*{obj} = new ", line):
                return index
        return None

    if "not on map" in reason:
        index = object_line()
        if index is not None:
            target = "lane(0)" if obj == "ego" else "lane(1)"
            lines[index] = re.sub(r"lane\(\d+\)", target, lines[index], count=1)
            return "\n".join(lines)
    if "overlaps" in reason:
        index = object_line()
        if index is not None:
            by = re.search(r" by ([0-9.]+)", lines[index])
            if by:
                bumped = float(by.group(1)) + 6
                text = str(int(bumped)) if bumped.is_integer() else repr(bumped)
                lines[index] = lines[index].replace(by.group(0), f" by {text}", 1)
                return "\n".join(lines)
            at = re.search(r" at ([0-9.]+)", lines[index])
            if at:
                bumped = float(at.group(1)) + 12
                text = str(int(bumped)) if bumped.is_integer() else repr(bumped)
                lines[index] = lines[index].replace(at.group(0), f" at {text}", 1)
                return "\n".join(lines)
            lane = re.search(r"lane\(\d+\)(?! at)", lines[index])
            if lane:
                lines[index] = lines[index].replace(lane.group(0), lane.group(0) + " at 45", 1)
                return "\n".join(lines)
    if "off-road" in reason:
        index = object_line()
        if index is not None:
            lines[index] = re.sub(r"(= new \w+ )[^,\n]+", r"\1on lane(1) at 40", lines[index], count=1)
            return "\n".join(lines)
    if "requirement violated at spawn:" in reason:
        cond = reason.split("requirement violated at spawn:", 1)[1].strip()
        cond = cond.split(" (")[0]
        for index, line in enumerate(lines):
            if line.strip().startswith("require ") and cond in line:
                del lines[index]
                return "\n".join(lines)
        for index, line in enumerate(lines):
            if line.strip().startswith("require "):
                del lines[index]
                return "\n".join(lines)
    if "unresolvable placement references" in reason:
        named_obj = re.search(r"\((\w+)", reason)
        if named_obj:
            for index, line in enumerate(lines):
                if re.match(rf"\s*{named_obj.group(1)} = new ", line):
                    lines[index] = re.sub(
                        r"(= new \w+ )[^,\n]+", r"\1on lane(1) at 40", line, count=1
                    )
                    return "\n".join(lines)
    return script


def _fix_behavior(script: str, diag: dict) -> str:
    message = diag["message"]
    if "no lane to the" in message:
        side = "left" if "to the left" in message else "right"
        other = "right" if side == "left" else "left"
        return script.replace(f"lane_change({side})", f"lane_change({other})", 1)
    if "turn available" in message:
        if 'map "fourway_signal"' not in script:
            return re.sub(r'map\s+"[^"]*"', 'map "fourway_signal"', script)
        # Already on the intersection map: the turn is unreachable, drop it.
        side = "left" if "no left turn" in message else "right"
        lines = script.split("\n")
        for index, line in enumerate(lines):
            if line.strip() == f"turn({side})":
                del lines[index]
                return "\n".join(lines)
        return script
    if "brake intensity" in message:
        return re.sub(r"brake\(([0-9.]+)\)", _clamp_brake, script)
    if "unbound parameter" in message:
        match = re.search(r"unbound parameter '(\w+)'", message)
        if match:
            return script.rstrip("\n") + f"\nparam {match.group(1)} = 5\n"
    return script


def _clamp_brake(match: re.Match) -> str:
    try:
        value = float(match.group(1))
    except ValueError:
        return match.group(0)
    return match.group(0) if 0 < value <= 1 else "brake(0.8)"


def _respond_repair(request: ChatRequest) -> str:
    body = request.messages[-1][1]
    if "Most recent script:" not in body:  # format-reminder retry
        body = request.messages[1][1]
    script, diagnostics = _parse_repair_prompt(body)
    fixed = repair_script(script.rstrip() + "\n", diagnostics)
    return f"```sdsl\n{fixed.rstrip()}\n```"


def _respond_evaluate(request: ChatRequest) -> str:
    body = request.messages[-1][1]
    match = _FENCE_RE.search(body)
    script = match.group(1) if match else ""
    desc_match = re.search(r"Description: (.*)", body)
    description = desc_match.group(1).lower() if desc_match else ""

    def present(pattern: str) -> bool:
        return re.search(pattern, script) is not None

    scores = {
        "adversarial_type": 10 if present(r"adv\w* = new ") else 3,
        "behavior": 10 if present(r"behavior \w+\(") or present(r"with behavior ") else 4,
        "geometry": 10 if present(r'map "') else 5,
        "weather": 10
        if present(r'param weather = "')
        else (2 if _first_match(description, _WEATHER_CUES) else 8),
        "elements": 10
        if len(re.findall(r"^\w+ = new ", script, re.MULTILINE)) > 2
        else (4 if _first_match(description, _OTHER_OBJECT_CUES) else 9),
        "spawn": 10 if present(r"ego = new ") else 2,
        "requirements": 10
        if present(r"^require ", )
        or re.search(r"^require ", script, re.MULTILINE)
        else (5 if _first_match(description, _REQUIREMENT_CUES) else 9),
    }
    lines = [f"{name}: {value} - scripted heuristic" for name, value in scores.items()]
    return "\n".join(lines)


def scripted_responder(request: ChatRequest) -> str:
    """Route a chat request to the matching rule-based stage handler."""
    if request.tag is RequestTag.EXTRACT:
        text = request.messages[-1][1]
        if text.startswith("Your previous reply"):
            text = request.messages[-3][1]
        return _render_extraction(extract_fields(text))
    if request.tag is RequestTag.SNIPPET:
        return _respond_snippet(request)
    if request.tag is RequestTag.REPAIR:
        return _respond_repair(request)
    return _respond_evaluate(request)
