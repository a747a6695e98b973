"""Road networks for the headless executor.

A network is a set of lanes (centerline polylines with width and successor
links), junction groupings, and signals, loaded from a small key/value map
file format:

    [lane l0]
    width = 3.5
    points = 0,0 200,0
    successors = l2 l3

    [junction j0]
    lanes = l2 l3

    [signal s0]
    at = 100,0
    kind = traffic_light
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path


class MapError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


@dataclass(frozen=True)
class Lane:
    lane_id: str
    width: float
    points: tuple[tuple[float, float], ...]
    successors: tuple[str, ...]
    cumulative: tuple[float, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        if len(self.points) < 2:
            raise MapError("map.parse_error", f"lane {self.lane_id!r} needs >= 2 points")
        if self.width <= 0:
            raise MapError("map.parse_error", f"lane {self.lane_id!r} width must be > 0")
        cum = [0.0]
        for (x0, y0), (x1, y1) in zip(self.points, self.points[1:]):
            cum.append(cum[-1] + math.hypot(x1 - x0, y1 - y0))
        object.__setattr__(self, "cumulative", tuple(cum))

    @property
    def length(self) -> float:
        return self.cumulative[-1]

    def _segment(self, s: float) -> tuple[int, float]:
        """Segment index and fraction along it for arclength ``s`` (clamped)."""
        s = min(max(s, 0.0), self.length)
        for i in range(len(self.points) - 1):
            seg_len = self.cumulative[i + 1] - self.cumulative[i]
            if s <= self.cumulative[i + 1] or i == len(self.points) - 2:
                t = 0.0 if seg_len == 0 else (s - self.cumulative[i]) / seg_len
                return i, min(max(t, 0.0), 1.0)
        return len(self.points) - 2, 1.0

    def point_at(self, s: float) -> tuple[float, float]:
        i, t = self._segment(s)
        (x0, y0), (x1, y1) = self.points[i], self.points[i + 1]
        return (x0 + (x1 - x0) * t, y0 + (y1 - y0) * t)

    def tangent_at(self, s: float) -> tuple[float, float]:
        i, _ = self._segment(s)
        (x0, y0), (x1, y1) = self.points[i], self.points[i + 1]
        length = math.hypot(x1 - x0, y1 - y0)
        if length == 0:
            return (1.0, 0.0)
        return ((x1 - x0) / length, (y1 - y0) / length)

    def heading_at(self, s: float) -> float:
        tx, ty = self.tangent_at(s)
        return math.atan2(ty, tx)

    def project(self, x: float, y: float) -> tuple[float, float]:
        """Closest-point projection: (arclength, signed lateral offset).

        Positive lateral offset is to the left of travel direction."""
        best_s = 0.0
        best_lat = math.inf
        best_dist = math.inf
        for i in range(len(self.points) - 1):
            (x0, y0), (x1, y1) = self.points[i], self.points[i + 1]
            dx, dy = x1 - x0, y1 - y0
            seg_len_sq = dx * dx + dy * dy
            if seg_len_sq == 0:
                continue
            t = ((x - x0) * dx + (y - y0) * dy) / seg_len_sq
            t = min(max(t, 0.0), 1.0)
            px, py = x0 + dx * t, y0 + dy * t
            dist = math.hypot(x - px, y - py)
            if dist < best_dist:
                seg_len = math.sqrt(seg_len_sq)
                cross = dx * (y - py) - dy * (x - px)
                best_dist = dist
                best_lat = math.copysign(dist, cross) if dist > 0 else 0.0
                best_s = self.cumulative[i] + seg_len * t
        return best_s, best_lat


@dataclass(frozen=True)
class Signal:
    position: tuple[float, float]
    kind: str  # traffic_light | stop_sign


@dataclass(frozen=True)
class RoadNetwork:
    name: str
    lanes: tuple[Lane, ...]
    junctions: tuple[frozenset[str], ...]
    signals: tuple[Signal, ...]

    def lane_by_id(self, lane_id: str) -> Lane:
        for lane in self.lanes:
            if lane.lane_id == lane_id:
                return lane
        raise KeyError(lane_id)

    def lane_index(self, lane_id: str) -> int:
        for i, lane in enumerate(self.lanes):
            if lane.lane_id == lane_id:
                return i
        raise KeyError(lane_id)


def load_map(map_file: str | Path) -> RoadNetwork:
    path = Path(map_file)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise MapError("map.parse_error", f"cannot read {path}: {exc}") from exc
    return parse_map(text, name=path.stem)


def parse_map(text: str, name: str = "map") -> RoadNetwork:
    sections: list[tuple[str, str, dict[str, str]]] = []
    current: dict[str, str] | None = None
    for line_no, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise MapError("map.parse_error", f"line {line_no}: unterminated section header")
            header = line[1:-1].split()
            if len(header) != 2 or header[0] not in ("lane", "junction", "signal"):
                raise MapError("map.parse_error", f"line {line_no}: bad section {line!r}")
            current = {}
            sections.append((header[0], header[1], current))
            continue
        if current is None or "=" not in line:
            raise MapError("map.parse_error", f"line {line_no}: expected 'key = value'")
        key, _, value = line.partition("=")
        current[key.strip()] = value.strip()

    lanes: list[Lane] = []
    junctions: list[frozenset[str]] = []
    signals: list[Signal] = []
    seen_ids: set[str] = set()
    for kind, ident, fields in sections:
        if ident in seen_ids:
            raise MapError("map.parse_error", f"duplicate id {ident!r}")
        seen_ids.add(ident)
        if kind == "lane":
            try:
                width = float(fields["width"])
                points = tuple(_parse_point(p) for p in fields["points"].split())
            except (KeyError, ValueError) as exc:
                raise MapError("map.parse_error", f"lane {ident!r}: {exc}") from exc
            successors = tuple(fields.get("successors", "").split())
            lanes.append(Lane(ident, width, points, successors))
        elif kind == "junction":
            junctions.append(frozenset(fields.get("lanes", "").split()))
        else:
            try:
                position = _parse_point(fields["at"])
                sig_kind = fields["kind"]
            except (KeyError, ValueError) as exc:
                raise MapError("map.parse_error", f"signal {ident!r}: {exc}") from exc
            if sig_kind not in ("traffic_light", "stop_sign"):
                raise MapError("map.parse_error", f"signal {ident!r}: unknown kind {sig_kind!r}")
            signals.append(Signal(position, sig_kind))

    lane_ids = {lane.lane_id for lane in lanes}
    for lane in lanes:
        for succ in lane.successors:
            if succ not in lane_ids:
                raise MapError(
                    "map.dangling_successor",
                    f"lane {lane.lane_id!r} lists missing successor {succ!r}",
                )
    for junction in junctions:
        for lane_id in junction:
            if lane_id not in lane_ids:
                raise MapError(
                    "map.dangling_successor",
                    f"junction references missing lane {lane_id!r}",
                )
    return RoadNetwork(name, tuple(lanes), tuple(junctions), tuple(signals))


def _parse_point(text: str) -> tuple[float, float]:
    x, _, y = text.partition(",")
    return (float(x), float(y))


def load_map_catalog(maps_dir: str | Path) -> dict[str, RoadNetwork]:
    """Load every ``*.map`` file in a directory, keyed by file stem."""
    catalog: dict[str, RoadNetwork] = {}
    for path in sorted(Path(maps_dir).glob("*.map")):
        catalog[path.stem] = load_map(path)
    return catalog
