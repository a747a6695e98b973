"""AST for the scenario DSL.

Spans are carried for diagnostics but excluded from equality, so structural
comparison (round-trip tests, golden files) ignores layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .diagnostics import SourceSpan

REGION_LABELS = (
    "geometry",
    "spawn",
    "adversarial_object",
    "behavior",
    "weather",
    "other_objects",
    "requirements",
    "defaults",
)

# Order in which assembled scripts emit their regions.
CANONICAL_REGION_ORDER = (
    "geometry",
    "weather",
    "defaults",
    "adversarial_object",
    "spawn",
    "behavior",
    "other_objects",
    "requirements",
)

# KB categories are the region labels minus `defaults`.
KB_CATEGORIES = tuple(label for label in REGION_LABELS if label != "defaults")

BUILTIN_BEHAVIORS = {"FollowLane": 1, "Idle": 0}


class ObjectKind(Enum):
    CAR = "Car"
    TRUCK = "Truck"
    BICYCLE = "Bicycle"
    PEDESTRIAN = "Pedestrian"
    STATIC_PROP = "StaticProp"


class Anchor(Enum):
    ABSOLUTE_POINT = "absolute_point"
    ON_LANE = "on_lane"
    RELATIVE = "relative"


class Relation(Enum):
    AHEAD_OF = "ahead of"
    BEHIND = "behind"
    LEFT_OF = "left of"
    RIGHT_OF = "right of"


@dataclass(frozen=True)
class Ref:
    """Reference to a behavior parameter or a direction keyword."""

    name: str


# Argument / parameter-default values: number literal, string literal, or reference.
Value = float | str
Arg = float | str | Ref


@dataclass(frozen=True)
class MapDecl:
    name: str
    span: SourceSpan = field(compare=False, default=SourceSpan(1, 1))


@dataclass(frozen=True)
class ModelDecl:
    name: str
    span: SourceSpan = field(compare=False, default=SourceSpan(1, 1))


@dataclass(frozen=True)
class ParamDecl:
    name: str
    value: Value
    span: SourceSpan = field(compare=False, default=SourceSpan(1, 1))


@dataclass(frozen=True)
class SpeedCond:
    obj: str
    op: str  # one of > < >= <=
    rhs: float | Ref


@dataclass(frozen=True)
class DistanceCond:
    a: str
    b: str
    op: str
    rhs: float | Ref


@dataclass(frozen=True)
class LaneCond:
    obj: str
    lane_index: int


@dataclass(frozen=True)
class SignalCond:
    signal_index: int
    state: str  # red | yellow | green


Condition = SpeedCond | DistanceCond | LaneCond | SignalCond


@dataclass(frozen=True)
class ActionCall:
    name: str  # one of ACTION_NAMES
    args: tuple[Arg, ...]
    span: SourceSpan = field(compare=False, default=SourceSpan(1, 1))


@dataclass(frozen=True)
class InterruptClause:
    condition: Condition
    actions: tuple[ActionCall, ...]
    span: SourceSpan = field(compare=False, default=SourceSpan(1, 1))


@dataclass(frozen=True)
class BehaviorParam:
    name: str
    annotation: str | None = None


@dataclass(frozen=True)
class BehaviorDef:
    name: str
    params: tuple[BehaviorParam, ...]
    body: tuple[ActionCall | InterruptClause, ...]
    span: SourceSpan = field(compare=False, default=SourceSpan(1, 1))


@dataclass(frozen=True)
class PlacementExpr:
    anchor: Anchor
    x: float | None = None
    y: float | None = None
    lane_index: int | None = None
    at_s: float | None = None
    relation: Relation | None = None
    reference: str | None = None
    distance: float | None = None
    heading: float | None = None

    def __post_init__(self) -> None:
        if self.relation is not None and self.reference is None:
            raise ValueError("relation requires a reference object")
        if self.distance is not None and self.distance <= 0:
            raise ValueError("distance must be > 0")


@dataclass(frozen=True)
class BehaviorRef:
    name: str
    args: tuple[Arg, ...]


@dataclass(frozen=True)
class ObjectDef:
    name: str
    kind: ObjectKind
    placement: PlacementExpr
    behavior_ref: BehaviorRef | None = None
    attributes: tuple[tuple[str, Value], ...] = ()
    span: SourceSpan = field(compare=False, default=SourceSpan(1, 1))


@dataclass(frozen=True)
class RequireStmt:
    condition: Condition
    span: SourceSpan = field(compare=False, default=SourceSpan(1, 1))


Statement = MapDecl | ModelDecl | ParamDecl | BehaviorDef | ObjectDef | RequireStmt


@dataclass(frozen=True)
class Region:
    label: str
    start: int  # statement index range, end exclusive
    end: int


@dataclass(frozen=True)
class ScriptModule:
    statements: tuple[Statement, ...]
    regions: tuple[Region, ...]

    @property
    def map_name(self) -> str | None:
        for stmt in self.statements:
            if isinstance(stmt, MapDecl):
                return stmt.name
        return None

    @property
    def model_name(self) -> str | None:
        for stmt in self.statements:
            if isinstance(stmt, ModelDecl):
                return stmt.name
        return None

    @property
    def params(self) -> list[ParamDecl]:
        return [s for s in self.statements if isinstance(s, ParamDecl)]

    @property
    def behaviors(self) -> list[BehaviorDef]:
        return [s for s in self.statements if isinstance(s, BehaviorDef)]

    @property
    def objects(self) -> list[ObjectDef]:
        return [s for s in self.statements if isinstance(s, ObjectDef)]

    @property
    def requirements(self) -> list[RequireStmt]:
        return [s for s in self.statements if isinstance(s, RequireStmt)]

    def region_statements(self, label: str) -> list[Statement]:
        for region in self.regions:
            if region.label == label:
                return list(self.statements[region.start : region.end])
        return []
