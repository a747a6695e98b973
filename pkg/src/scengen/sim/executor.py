"""Deterministic headless executor.

Implements the executability gate: seeded spawn sampling under a bounded
attempt budget (rejecting off-road, overlapping, or requirement-violating
placements), then fixed-step kinematic simulation of object behaviors with
requirement checks every tick. Everything is a pure function of
(module, network, limits); no wall clock, no global RNG.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from enum import Enum

from ..dsl.analyzer import analyze
from ..dsl.ast import (
    ActionCall,
    Anchor,
    Arg,
    BehaviorDef,
    Condition,
    DistanceCond,
    InterruptClause,
    LaneCond,
    ObjectDef,
    ObjectKind,
    Ref,
    Relation,
    ScriptModule,
    SignalCond,
    SpeedCond,
)
from ..dsl.diagnostics import Diagnostic, execute_error
from ..dsl.parser import compile_source
from .roadnet import Lane, RoadNetwork

# (length, width) in meters per object kind.
DIMENSIONS = {
    ObjectKind.CAR: (4.5, 2.0),
    ObjectKind.TRUCK: (8.0, 2.5),
    ObjectKind.BICYCLE: (1.8, 0.6),
    ObjectKind.PEDESTRIAN: (0.5, 0.5),
    ObjectKind.STATIC_PROP: (1.0, 1.0),
}

# Default initial speed (m/s) for objects that carry a behavior.
DEFAULT_SPEEDS = {
    ObjectKind.CAR: 5.0,
    ObjectKind.TRUCK: 5.0,
    ObjectKind.BICYCLE: 3.0,
    ObjectKind.PEDESTRIAN: 1.2,
    ObjectKind.STATIC_PROP: 0.0,
}

_VEHICLE_KINDS = (ObjectKind.CAR, ObjectKind.TRUCK, ObjectKind.BICYCLE)

_ACCEL = 3.0  # m/s^2 used by follow_lane / accelerate
_MAX_BRAKE = 8.0  # m/s^2 at brake intensity 1.0
_LANE_CHANGE_TIME = 2.0  # seconds of lateral blend
_SPAWN_INFLATE = 0.1  # meters added around rectangles at spawn
_ONROAD_SLACK = 0.2  # meters beyond half lane width still counted on-road
_TURN_THRESHOLD = math.radians(15.0)
_SIGNAL_PERIOD = (10.0, 2.0, 8.0)  # green, yellow, red seconds


class ExecStatus(Enum):
    SUCCESS = "success"
    SPAWN_FAILURE = "spawn_failure"
    RUNTIME_ERROR = "runtime_error"
    REQUIREMENT_VIOLATION = "requirement_violation"


@dataclass(frozen=True)
class ExecutionLimits:
    max_spawn_attempts: int = 15
    sim_steps: int = 200
    step_dt: float = 0.1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.max_spawn_attempts < 1 or self.sim_steps < 1 or self.step_dt <= 0:
            raise ValueError("invalid execution limits")


@dataclass(frozen=True)
class ObjectSummary:
    name: str
    final_x: float
    final_y: float
    min_distance: float | None
    collided: bool


@dataclass(frozen=True)
class ExecutionResult:
    status: ExecStatus
    spawn_attempts_used: int
    diagnostics: tuple[Diagnostic, ...]
    trajectory_summary: tuple[ObjectSummary, ...]


class _BehaviorError(Exception):
    def __init__(self, message: str, frame: str):
        super().__init__(message)
        self.message = message
        self.frame = frame


class _SpawnReject(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass
class _Program:
    """Runtime state of one object's behavior."""

    behavior_name: str
    actions: list[ActionCall]
    interrupts: list[InterruptClause]
    bindings: dict[str, float | str]
    index: int = 0
    elapsed: float = 0.0
    fired: set[int] = field(default_factory=set)
    pending: list[ActionCall] = field(default_factory=list)  # active interrupt actions
    resume: tuple[int, float] | None = None
    pending_turn: str | None = None


@dataclass
class _ObjState:
    name: str
    kind: ObjectKind
    length: float
    width: float
    x: float
    y: float
    heading: float  # radians
    speed: float
    lane: Lane | None
    s: float
    lat: float
    program: _Program | None
    min_distance: float = math.inf
    collided: bool = False

    def corners(self, inflate: float = 0.0) -> list[tuple[float, float]]:
        hl = self.length / 2 + inflate
        hw = self.width / 2 + inflate
        cos_h, sin_h = math.cos(self.heading), math.sin(self.heading)
        out = []
        for dx, dy in ((hl, hw), (hl, -hw), (-hl, -hw), (-hl, hw)):
            out.append((self.x + dx * cos_h - dy * sin_h, self.y + dx * sin_h + dy * cos_h))
        return out


def _rects_overlap(a: _ObjState, b: _ObjState, inflate: float = 0.0) -> bool:
    """Oriented-rectangle intersection via separating axes."""
    ca, cb = a.corners(inflate), b.corners(0.0)
    for rect in (ca, cb):
        for i in range(2):  # two edge directions per rectangle
            x0, y0 = rect[i]
            x1, y1 = rect[i + 1]
            ax, ay = y1 - y0, x0 - x1  # normal of the edge
            proj_a = [x * ax + y * ay for x, y in ca]
            proj_b = [x * ax + y * ay for x, y in cb]
            if max(proj_a) < min(proj_b) or max(proj_b) < min(proj_a):
                return False
    return True


def signal_state(sim_time: float) -> str:
    green, yellow, red = _SIGNAL_PERIOD
    phase = sim_time % (green + yellow + red)
    if phase < green:
        return "green"
    if phase < green + yellow:
        return "yellow"
    return "red"


class _Executor:
    def __init__(self, module: ScriptModule, network: RoadNetwork, limits: ExecutionLimits):
        self.module = module
        self.network = network
        self.limits = limits
        self.rng = random.Random(limits.seed)
        self.behaviors = {b.name: b for b in module.behaviors}
        self.params: dict[str, float | str] = {p.name: p.value for p in module.params}
        self.states: dict[str, _ObjState] = {}
        self.tick = 0

    # -- spawn phase --

    def spawn(self) -> tuple[int, str | None]:
        """Returns (attempts_used, rejection_reason); reason is None on success."""
        last_reason: str | None = None
        for attempt in range(1, self.limits.max_spawn_attempts + 1):
            try:
                self.states = self._place_all()
                self._check_requirements()
                return attempt, None
            except _SpawnReject as reject:
                last_reason = reject.reason
            except _RequireViolation as violation:
                last_reason = f"requirement violated at spawn: {violation.text}"
        return self.limits.max_spawn_attempts, last_reason or "no placement found"

    def _place_all(self) -> dict[str, _ObjState]:
        states: dict[str, _ObjState] = {}
        remaining = list(self.module.objects)
        # Dependency order: relative placements wait for their reference.
        progress = True
        while remaining and progress:
            progress = False
            for obj in list(remaining):
                ref = obj.placement.reference
                if ref is None or ref in states:
                    states[obj.name] = self._place_one(obj, states)
                    remaining.remove(obj)
                    progress = True
        if remaining:
            names = ", ".join(obj.name for obj in remaining)
            raise _SpawnReject(f"unresolvable placement references ({names})")
        return states

    def _place_one(self, obj: ObjectDef, placed: dict[str, _ObjState]) -> _ObjState:
        placement = obj.placement
        length, width = DIMENSIONS[obj.kind]
        lane: Lane | None = None
        s = 0.0
        lat = 0.0
        if placement.anchor is Anchor.ABSOLUTE_POINT:
            x, y = placement.x, placement.y
            heading = math.radians(placement.heading or 0.0)
        elif placement.anchor is Anchor.ON_LANE:
            if placement.lane_index >= len(self.network.lanes):
                raise _SpawnReject(
                    f"object {obj.name!r}: lane({placement.lane_index}) not on map "
                    f"{self.network.name!r} ({len(self.network.lanes)} lanes)"
                )
            lane = self.network.lanes[placement.lane_index]
            margin = length / 2 + 0.5
            if placement.at_s is not None:
                s = placement.at_s
            elif lane.length <= 2 * margin:
                s = lane.length / 2
            else:
                s = self.rng.uniform(margin, lane.length - margin)
            x, y = lane.point_at(s)
            heading = lane.heading_at(s)
            if placement.heading is not None:
                heading = math.radians(placement.heading)
        else:
            ref = placed[placement.reference]
            d = placement.distance
            offsets = {
                Relation.AHEAD_OF: (d, 0.0),
                Relation.BEHIND: (-d, 0.0),
                Relation.LEFT_OF: (0.0, d),
                Relation.RIGHT_OF: (0.0, -d),
            }[placement.relation]
            cos_h, sin_h = math.cos(ref.heading), math.sin(ref.heading)
            x = ref.x + offsets[0] * cos_h - offsets[1] * sin_h
            y = ref.y + offsets[0] * sin_h + offsets[1] * cos_h
            heading = math.radians(placement.heading) if placement.heading is not None else ref.heading

        if lane is None:
            lane, s, lat = self._bind_lane(x, y)
        if obj.kind in _VEHICLE_KINDS and lane is None:
            raise _SpawnReject(f"object {obj.name!r}: off-road placement at ({x:.2f}, {y:.2f})")

        attributes = dict(obj.attributes)
        if "speed" in attributes:
            speed = float(attributes["speed"])
        elif obj.behavior_ref is not None:
            speed = DEFAULT_SPEEDS[obj.kind]
        else:
            speed = 0.0

        state = _ObjState(
            name=obj.name,
            kind=obj.kind,
            length=length,
            width=width,
            x=x,
            y=y,
            heading=heading,
            speed=speed,
            lane=lane,
            s=s,
            lat=lat,
            program=self._bind_program(obj),
        )
        for other in placed.values():
            if _rects_overlap(state, other, _SPAWN_INFLATE):
                raise _SpawnReject(f"object {obj.name!r}: overlaps {other.name!r}")
        return state

    def _bind_lane(self, x: float, y: float) -> tuple[Lane | None, float, float]:
        best: tuple[Lane, float, float] | None = None
        best_dist = math.inf
        for lane in self.network.lanes:
            s, lat = lane.project(x, y)
            if abs(lat) < best_dist:
                best_dist = abs(lat)
                best = (lane, s, lat)
        if best is not None and best_dist <= best[0].width / 2 + _ONROAD_SLACK:
            return best
        return None, 0.0, 0.0

    def _bind_program(self, obj: ObjectDef) -> _Program | None:
        if obj.behavior_ref is None:
            return None
        name = obj.behavior_ref.name
        if name == "FollowLane":
            actions = [ActionCall("follow_lane", obj.behavior_ref.args)]
            return _Program(name, actions, [], {})
        if name == "Idle":
            actions = [ActionCall("wait", (math.inf,))]
            return _Program(name, actions, [], {})
        bdef: BehaviorDef = self.behaviors[name]
        bindings: dict[str, float | str] = {}
        for param, arg in zip(bdef.params, obj.behavior_ref.args):
            bindings[param.name] = self._resolve_arg(arg, {})
        actions = [item for item in bdef.body if isinstance(item, ActionCall)]
        interrupts = [item for item in bdef.body if isinstance(item, InterruptClause)]
        return _Program(name, actions, interrupts, bindings)

    def _resolve_arg(self, arg: Arg, bindings: dict[str, float | str]) -> float | str:
        if isinstance(arg, Ref):
            if arg.name in ("left", "right"):
                return arg.name
            if arg.name in bindings:
                return bindings[arg.name]
            if arg.name in self.params:
                return self.params[arg.name]
            raise _BehaviorError(f"unbound parameter {arg.name!r}", "argument resolution")
        return arg

    # -- simulation phase --

    def run(self) -> ExecutionResult:
        attempts, reason = self.spawn()
        if reason is not None:
            diag = execute_error(
                "exec.spawn_exhausted",
                f"no valid spawn in {attempts} attempts",
                trace=(f"spawn attempt {attempts}", reason),
            )
            return ExecutionResult(ExecStatus.SPAWN_FAILURE, attempts, (diag,), ())

        order = [obj.name for obj in self.module.objects]
        self._update_proximity()
        for self.tick in range(1, self.limits.sim_steps + 1):
            for name in order:
                state = self.states[name]
                try:
                    self._step_object(state)
                except _BehaviorError as err:
                    diag = execute_error(
                        "exec.behavior_error",
                        err.message,
                        trace=(
                            f"object {name!r}",
                            f"behavior {state.program.behavior_name!r}"
                            if state.program
                            else "no behavior",
                            err.frame,
                            f"tick {self.tick}",
                        ),
                    )
                    return ExecutionResult(
                        ExecStatus.RUNTIME_ERROR, attempts, (diag,), self._summaries()
                    )
            self._update_proximity()
            try:
                self._check_requirements()
            except _RequireViolation as violation:
                diag = execute_error(
                    "exec.require_failed",
                    f"requirement failed: {violation.text}",
                    trace=(f"require {violation.text}", f"tick {self.tick}"),
                )
                return ExecutionResult(
                    ExecStatus.REQUIREMENT_VIOLATION, attempts, (diag,), self._summaries()
                )
        return ExecutionResult(ExecStatus.SUCCESS, attempts, (), self._summaries())

    def _step_object(self, state: _ObjState) -> None:
        dt = self.limits.step_dt
        program = state.program
        if program is None:
            self._advance(state, dt)
            return
        for idx, clause in enumerate(program.interrupts):
            if idx in program.fired or program.pending:
                continue
            if self._eval_condition(clause.condition, self_name=state.name, program=program):
                program.fired.add(idx)
                program.pending = list(clause.actions)
                program.resume = (program.index, program.elapsed)
                program.index = 0
                program.elapsed = 0.0
                break

        sequence = program.pending if program.pending else program.actions
        if program.index >= len(sequence):
            self._advance(state, dt)  # body exhausted: hold current motion
            return
        action = sequence[program.index]
        done = self._run_action(state, program, action, dt)
        program.elapsed += dt
        if done:
            program.index += 1
            program.elapsed = 0.0
            if program.pending and program.index >= len(program.pending):
                program.pending = []
                program.index, program.elapsed = program.resume or (len(program.actions), 0.0)
                program.resume = None

    def _run_action(
        self, state: _ObjState, program: _Program, action: ActionCall, dt: float
    ) -> bool:
        frame = f"action {program.index} ({action.name})"

        def numeric(position: int) -> float:
            if len(action.args) <= position:
                raise _BehaviorError(f"{action.name} needs {position + 1} argument(s)", frame)
            value = self._resolve_arg(action.args[position], program.bindings)
            if not isinstance(value, float):
                raise _BehaviorError(f"{action.name} argument must be a number", frame)
            return value

        def direction(position: int) -> str:
            if len(action.args) <= position:
                raise _BehaviorError(f"{action.name} needs a direction", frame)
            value = self._resolve_arg(action.args[position], program.bindings)
            if value not in ("left", "right"):
                raise _BehaviorError(f"{action.name} direction must be left or right", frame)
            return value

        if action.name == "follow_lane":
            target = numeric(0)
            if target < 0:
                raise _BehaviorError("follow_lane speed must be >= 0", frame)
            state.speed = _approach(state.speed, target, _ACCEL * dt)
            self._advance(state, dt)
            return state.speed == target and program.elapsed > 0
        if action.name == "accelerate":
            target = numeric(0)
            if target < 0:
                raise _BehaviorError("accelerate target must be >= 0", frame)
            if state.speed < target:
                state.speed = min(target, state.speed + _ACCEL * dt)
            self._advance(state, dt)
            return state.speed >= target
        if action.name == "brake":
            intensity = numeric(0)
            if not 0 < intensity <= 1:
                raise _BehaviorError("brake intensity must be in (0, 1]", frame)
            state.speed = max(0.0, state.speed - _MAX_BRAKE * intensity * dt)
            self._advance(state, dt)
            return state.speed == 0.0
        if action.name == "wait":
            duration = numeric(0)
            if duration < 0:
                raise _BehaviorError("wait duration must be >= 0", frame)
            state.speed = 0.0
            return program.elapsed + dt >= duration
        if action.name == "lane_change":
            return self._lane_change(state, program, direction(0), dt, frame)
        if action.name == "turn":
            program.pending_turn = direction(0)
            entered = self._advance(state, dt, frame=frame)
            if entered:
                program.pending_turn = None
            return entered
        raise _BehaviorError(f"unknown action {action.name!r}", frame)

    def _lane_change(
        self, state: _ObjState, program: _Program, direction: str, dt: float, frame: str
    ) -> bool:
        if state.lane is None:
            raise _BehaviorError("lane_change requires a lane-bound object", frame)
        target = self._adjacent_lane(state, direction)
        if target is None:
            raise _BehaviorError(f"no lane to the {direction} of {state.lane.lane_id!r}", frame)
        sign = 1.0 if direction == "left" else -1.0
        px, py = state.lane.point_at(state.s)
        ts, _ = target.project(px, py)
        tx, ty = target.point_at(ts)
        gap = math.hypot(tx - px, ty - py)
        rate = gap / _LANE_CHANGE_TIME
        state.lat += sign * rate * dt
        self._advance(state, dt)
        if program.elapsed + dt >= _LANE_CHANGE_TIME:
            ns, nlat = target.project(state.x, state.y)
            state.lane, state.s, state.lat = target, ns, nlat
            return True
        return False

    def _adjacent_lane(self, state: _ObjState, direction: str) -> Lane | None:
        sign = 1.0 if direction == "left" else -1.0
        tangent = state.lane.tangent_at(state.s)
        nx, ny = -tangent[1], tangent[0]  # left normal
        # Probe from the centerline, not the (possibly drifting) object.
        cx, cy = state.lane.point_at(state.s)
        px = cx + sign * nx * state.lane.width
        py = cy + sign * ny * state.lane.width
        best: Lane | None = None
        best_dist = math.inf
        for lane in self.network.lanes:
            if lane is state.lane:
                continue
            _, lat = lane.project(px, py)
            if abs(lat) < best_dist:
                best_dist = abs(lat)
                best = lane
        if best is not None and best_dist <= best.width / 2 + _ONROAD_SLACK:
            return best
        return None

    def _advance(self, state: _ObjState, dt: float, frame: str | None = None) -> bool:
        """Move the object along its lane (or heading). Returns True when a
        pending turn's successor lane was entered this tick."""
        entered_turn = False
        if state.speed == 0.0:
            return False
        if state.lane is None:
            state.x += state.speed * dt * math.cos(state.heading)
            state.y += state.speed * dt * math.sin(state.heading)
            return False
        state.s += state.speed * dt
        while state.s > state.lane.length:
            turn = state.program.pending_turn if state.program else None
            successor = self._pick_successor(state.lane, turn, frame)
            if successor is None:
                state.s = state.lane.length
                state.speed = 0.0
                break
            if turn is not None:
                entered_turn = True
            state.s -= state.lane.length
            state.lane = successor
        px, py = state.lane.point_at(state.s)
        tangent = state.lane.tangent_at(state.s)
        state.x = px - tangent[1] * state.lat
        state.y = py + tangent[0] * state.lat
        state.heading = math.atan2(tangent[1], tangent[0])
        return entered_turn

    def _pick_successor(self, lane: Lane, turn: str | None, frame: str | None) -> Lane | None:
        successors = [self.network.lane_by_id(s) for s in lane.successors]
        if not successors:
            if turn is not None and frame is not None:
                raise _BehaviorError(f"no {turn} turn available at end of {lane.lane_id!r}", frame)
            return None
        if turn is None:
            return successors[0]
        end_heading = lane.heading_at(lane.length)
        for succ in successors:
            diff = _normalize_angle(succ.heading_at(0.0) - end_heading)
            if turn == "left" and diff > _TURN_THRESHOLD:
                return succ
            if turn == "right" and diff < -_TURN_THRESHOLD:
                return succ
        if frame is not None:
            raise _BehaviorError(f"no {turn} turn available at end of {lane.lane_id!r}", frame)
        return successors[0]

    # -- conditions and requirements --

    def _eval_condition(
        self, condition: Condition, self_name: str | None = None, program: _Program | None = None
    ) -> bool:
        bindings = program.bindings if program is not None else {}

        def resolve_obj(name: str) -> _ObjState:
            if name == "self" and self_name is not None:
                return self.states[self_name]
            state = self.states.get(name)
            if state is None:
                raise _BehaviorError(f"condition references unknown object {name!r}", "condition")
            return state

        def rhs_value(rhs: float | Ref) -> float:
            value = self._resolve_arg(rhs, bindings)
            if not isinstance(value, float):
                raise _BehaviorError("condition threshold must be a number", "condition")
            return value

        if isinstance(condition, SpeedCond):
            return _compare(resolve_obj(condition.obj).speed, condition.op, rhs_value(condition.rhs))
        if isinstance(condition, DistanceCond):
            a, b = resolve_obj(condition.a), resolve_obj(condition.b)
            dist = math.hypot(a.x - b.x, a.y - b.y)
            return _compare(dist, condition.op, rhs_value(condition.rhs))
        if isinstance(condition, LaneCond):
            state = resolve_obj(condition.obj)
            if condition.lane_index >= len(self.network.lanes):
                return False
            lane = self.network.lanes[condition.lane_index]
            if state.lane is not None:
                return state.lane.lane_id == lane.lane_id
            _, lat = lane.project(state.x, state.y)
            return abs(lat) <= lane.width / 2 + _ONROAD_SLACK
        if isinstance(condition, SignalCond):
            if condition.signal_index >= len(self.network.signals):
                return False
            signal = self.network.signals[condition.signal_index]
            if signal.kind == "stop_sign":
                return condition.state == "red"
            return signal_state(self.tick * self.limits.step_dt) == condition.state
        raise _BehaviorError(f"unknown condition {condition!r}", "condition")

    def _check_requirements(self) -> None:
        from ..dsl.formatter import format_condition

        for stmt in self.module.requirements:
            try:
                ok = self._eval_condition(stmt.condition)
            except _BehaviorError as err:
                raise _RequireViolation(f"{format_condition(stmt.condition)} ({err.message})")
            if not ok:
                raise _RequireViolation(format_condition(stmt.condition))

    def _update_proximity(self) -> None:
        states = list(self.states.values())
        for i, a in enumerate(states):
            for b in states[i + 1 :]:
                dist = math.hypot(a.x - b.x, a.y - b.y)
                a.min_distance = min(a.min_distance, dist)
                b.min_distance = min(b.min_distance, dist)
                if _rects_overlap(a, b):
                    a.collided = True
                    b.collided = True

    def _summaries(self) -> tuple[ObjectSummary, ...]:
        out = []
        for obj in self.module.objects:
            state = self.states[obj.name]
            out.append(
                ObjectSummary(
                    name=state.name,
                    final_x=state.x,
                    final_y=state.y,
                    min_distance=None if state.min_distance == math.inf else state.min_distance,
                    collided=state.collided,
                )
            )
        return tuple(out)


class _RequireViolation(Exception):
    def __init__(self, text: str):
        super().__init__(text)
        self.text = text


def _approach(value: float, target: float, max_step: float) -> float:
    delta = target - value
    if abs(delta) <= max_step:
        return target
    return value + math.copysign(max_step, delta)


def _compare(lhs: float, op: str, rhs: float) -> bool:
    if op == ">":
        return lhs > rhs
    if op == "<":
        return lhs < rhs
    if op == ">=":
        return lhs >= rhs
    return lhs <= rhs


def _normalize_angle(angle: float) -> float:
    while angle > math.pi:
        angle -= 2 * math.pi
    while angle < -math.pi:
        angle += 2 * math.pi
    return angle


def execute(module: ScriptModule, network: RoadNetwork, limits: ExecutionLimits) -> ExecutionResult:
    return _Executor(module, network, limits).run()


def validate(
    module_or_source: ScriptModule | str,
    network: RoadNetwork,
    limits: ExecutionLimits,
    map_catalog: frozenset[str] | set[str] | None = None,
) -> tuple[list[Diagnostic], ExecutionResult | None]:
    """The single gate the repair loop consumes: analyze first, execute only
    when compile diagnostics are empty."""
    if isinstance(module_or_source, str):
        module, diagnostics = compile_source(module_or_source)
        if module is None:
            return diagnostics, None
    else:
        module = module_or_source
    catalog = map_catalog if map_catalog is not None else {network.name}
    compile_diags = analyze(module, catalog)
    if compile_diags:
        return compile_diags, None
    return [], execute(module, network, limits)


def result_to_record(result: ExecutionResult, include_trajectory: bool = True) -> dict:
    """JSON-ready dict; the wire shape used by the run log and the executor
    protocol (which omits trajectory details)."""
    record: dict = {
        "status": result.status.value,
        "spawn_attempts_used": result.spawn_attempts_used,
        "diagnostics": [diagnostic_to_record(d) for d in result.diagnostics],
    }
    if include_trajectory:
        record["trajectory_summary"] = [
            {
                "name": s.name,
                "final_x": s.final_x,
                "final_y": s.final_y,
                "min_distance": s.min_distance,
                "collided": s.collided,
            }
            for s in result.trajectory_summary
        ]
    return record


def diagnostic_to_record(diagnostic: Diagnostic) -> dict:
    record: dict = {
        "phase": diagnostic.phase.value,
        "code": diagnostic.code,
        "message": diagnostic.message,
    }
    if diagnostic.span is not None:
        record["span"] = {
            "line": diagnostic.span.line,
            "column": diagnostic.span.column,
            "length": diagnostic.span.length,
        }
    if diagnostic.trace:
        record["trace"] = list(diagnostic.trace)
    return record


def diagnostic_from_record(record: dict) -> Diagnostic:
    from ..dsl.diagnostics import Phase, SourceSpan

    span = None
    if "span" in record:
        span = SourceSpan(record["span"]["line"], record["span"]["column"], record["span"]["length"])
    return Diagnostic(
        phase=Phase(record["phase"]),
        code=record["code"],
        message=record["message"],
        span=span,
        trace=tuple(record.get("trace", ())),
    )
