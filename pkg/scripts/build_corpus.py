#!/usr/bin/env python3
"""Regenerate the bundled corpus: scenario prompts, seed scripts, knowledge
base, embedding cache, default script, and evaluator priming data.

The outputs are committed; rerun after editing the templates below. Every
seed script is checked to analyze cleanly and execute successfully before
anything is written.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from scengen.dsl import analyze, compile_source  # noqa: E402
from scengen.kb import content_hash, embed, load_kb, validate_kb  # noqa: E402
from scengen.pipeline import SnippetSet, assemble  # noqa: E402
from scengen.sim import ExecStatus, ExecutionLimits, execute, load_map_catalog  # noqa: E402

DATA = ROOT / "src" / "scengen" / "data"

PROMPTS: dict[str, list[str]] = {
    "straight_obstacle": [
        "The ego vehicle drives along a straight two-lane road when the car ahead suddenly brakes hard, forcing an emergency reaction.",
        "During heavy rain on a straight road, a truck ahead of the ego vehicle slams the brakes to avoid debris near the lane edge.",
        "A broken-down car blocks the ego lane on a straight two-lane road; traffic cones on the roadside mark the spot. The ego must keep at least 2 meters of clearance.",
        "At night, the ego vehicle follows a sedan on a straight road; the sedan ahead stalls without warning.",
        "On a sunny day the ego vehicle cruises a two-lane highway; a slow car ahead brakes hard when its driver spots an obstacle.",
    ],
    "turning_obstacle": [
        "At a signalized four-way intersection, a van ahead of the ego vehicle turns right and stalls across the ego path.",
        "The ego vehicle approaches a crossroads at dusk; a truck coming from the left turns and then stalls, blocking the box.",
        "While the ego vehicle crosses a junction during light fog, a bicycle ahead wobbles and brakes hard in the turning lane.",
        "A car entering the four-way intersection from the right turns into the ego lane and stalls; a pedestrian waits at the corner.",
        "The ego vehicle follows a truck into a signalized intersection; the truck stalls mid-turn. Keep a safe clearance from the adversary.",
    ],
    "lane_changing": [
        "On a straight two-lane road the adversarial car in the adjacent lane cuts into the ego lane and brakes sharply.",
        "During nighttime with light fog, a vehicle from the next lane merges into the same lane as the ego vehicle and subsequently brakes in front of an obstacle.",
        "A truck in the neighboring lane changes lane abruptly in front of the ego vehicle on a wet road after drizzle.",
        "The ego vehicle drives on a two-lane highway; a car behind accelerates, then cuts in and slows. The ego must keep at least 1.5 meters of clearance.",
        "A sedan merges into the ego lane from the adjacent lane and brakes; traffic cones on the roadside narrow the road.",
    ],
    "vehicle_passing": [
        "On a straight road a fast car approaches from behind, overtakes the ego vehicle, and returns to the lane too early.",
        "A bicycle passes the ego vehicle in the adjacent lane on a sunny straight two-lane road.",
        "During heavy rain a van overtakes the ego vehicle at speed and sprays water across the windshield.",
        "A car behind the ego vehicle overtakes on the two-lane road and brakes once it is ahead.",
        "On a two-lane highway an SUV overtakes the ego vehicle; a parked car sits at the roadside.",
    ],
    "red_light_running": [
        "The ego vehicle enters a signalized four-way intersection on green when a car from the right runs the red light.",
        "At dusk a delivery truck runs the red light from the right as the ego vehicle crosses the junction.",
        "A car ignores the signal at the crossroads and speeds through in front of the ego vehicle during light snow.",
        "The ego vehicle approaches a traffic light; a cyclist runs the red light across its path while a pedestrian waits at the corner.",
        "On a rainy evening, a van running the red light crosses the intersection just as the ego vehicle gets the green. The ego must keep at least 3 meters of clearance.",
    ],
    "unprotected_left_turn": [
        "At a four-way intersection an oncoming car turns left across the path of the ego vehicle without yielding.",
        "An oncoming truck makes an unprotected left turn in front of the ego vehicle at a signalized junction during light fog.",
        "The ego vehicle drives straight through a crossroads at night while an oncoming sedan turns left across its lane.",
        "A bicycle coming from the opposite direction turns left across the junction as the ego vehicle arrives; debris near the lane edge.",
        "An oncoming car turns left across the ego path at the crossroads; keep a safe distance at all times.",
    ],
    "right_turn": [
        "At a T-junction the ego vehicle turns right onto the main road while a car approaches fast from the left.",
        "The ego vehicle takes a right turn at a T junction with a side road; an oncoming van speeds toward the junction in heavy rain.",
        "Turning right at the T-junction during dusk, the ego vehicle crosses the path of a bicycle approaching fast from the left.",
        "The ego vehicle turns right at a side road while a car approaches fast; a parked car at the roadside limits visibility.",
        "Right turn at a T junction: an approaching truck speeds toward the junction. The ego must keep at least 2.5 meters of clearance.",
    ],
    "crossing_negotiation": [
        "At a four-way intersection a pedestrian steps onto the road in front of the ego vehicle to negotiate the crossing.",
        "A cyclist darts across the junction while the ego vehicle creeps forward; nighttime with light fog.",
        "The ego vehicle negotiates a crossing with a pedestrian who crosses the road slowly; a second vehicle waits in background traffic.",
        "During light snow a pedestrian crosses the intersection in front of the ego vehicle and hesitates mid-lane.",
        "A jaywalking pedestrian crosses at the crossroads as the ego vehicle arrives; keep a safe distance from the pedestrian.",
    ],
}

WEATHER = {
    "clear": 'param weather = "clear"\nparam time_of_day = "noon"',
    "rain": 'param weather = "heavy_rain"\nparam time_of_day = "noon"',
    "fog": 'param weather = "light_fog"\nparam time_of_day = "night"',
    "night": 'param weather = "clear"\nparam time_of_day = "night"',
    "dusk": 'param weather = "clear"\nparam time_of_day = "dusk"',
    "snow": 'param weather = "snow"\nparam time_of_day = "noon"',
    "wet": 'param weather = "wet"\nparam time_of_day = "noon"',
}


def _script(
    map_name: str,
    weather: str,
    adversarial_object: str,
    spawn: str,
    behavior: str,
    other_objects: str = "",
    requirements: str = "",
) -> str:
    regions = [
        ("geometry", f'map "{map_name}"'),
        ("weather", WEATHER[weather]),
        ("defaults", "model basic"),
        ("adversarial_object", adversarial_object),
        ("spawn", spawn),
        ("behavior", behavior),
        ("other_objects", other_objects),
        ("requirements", requirements),
    ]
    blocks = []
    for label, body in regions:
        block = f"#-- region: {label}"
        if body:
            block += "\n" + body.rstrip()
        blocks.append(block)
    return "\n\n".join(blocks) + "\n"


def _brake_behavior(trigger: float, arity2: bool = True) -> str:
    if arity2:
        return (
            "behavior AdvManeuver(speed, intensity):\n"
            "    follow_lane(speed)\n"
            f"    interrupt when distance(self, ego) < {trigger}:\n"
            "        brake(intensity)"
        )
    return (
        "behavior AdvManeuver(speed):\n"
        "    follow_lane(speed)\n"
        f"    interrupt when distance(self, ego) < {trigger}:\n"
        "        brake(0.9)"
    )


def seed_scripts() -> dict[str, str]:
    scripts: dict[str, str] = {}

    # straight_obstacle: adversary ahead on the straight road brakes or stalls
    so = [
        _script(
            "straight2", "clear",
            'adv = new Car on lane(0) at 70, with behavior AdvManeuver(9, 0.9), with blueprint "vehicle.ford.crown"',
            "ego = new Car behind adv by 18, with behavior FollowLane(11)",
            _brake_behavior(14),
            requirements="require adv.speed < 25",
        ),
        _script(
            "straight2", "rain",
            'adv = new Truck on lane(0) at 80, with behavior AdvManeuver(8), with blueprint "vehicle.carlamotors.carlacola"',
            "ego = new Car behind adv by 20, with behavior FollowLane(10)",
            _brake_behavior(16, arity2=False),
            other_objects="debris = new StaticProp at(95, -1.6)",
        ),
        _script(
            "straight2", "clear",
            "adv = new Car on lane(0) at 90, with behavior AdvManeuver(6, 1)",
            "ego = new Car behind adv by 25, with behavior FollowLane(9)",
            "behavior AdvManeuver(speed, intensity):\n    follow_lane(speed)\n    brake(intensity)\n    wait(600)",
            other_objects="cone1 = new StaticProp at(86, -4)\ncone2 = new StaticProp at(94, -4)",
            requirements="require ego.speed < 30",
        ),
        _script(
            "straight2", "night",
            'adv = new Car on lane(0) at 75, with behavior AdvManeuver(7, 0.8), with color "silver"',
            "ego = new Car behind adv by 16, with behavior FollowLane(10)",
            _brake_behavior(12),
        ),
        _script(
            "straight2", "clear",
            "adv = new Car on lane(0) at 65, with behavior AdvManeuver(6, 0.9)",
            "ego = new Car behind adv by 15, with behavior FollowLane(12)",
            _brake_behavior(15),
            requirements="require adv.speed < 25",
        ),
    ]

    # turning_obstacle: adversary turns at the junction and stalls
    turn_behavior = (
        "behavior AdvManeuver(speed, intensity):\n"
        "    follow_lane(speed)\n"
        "    turn(right)\n"
        "    brake(intensity)\n"
        "    wait(60)"
    )
    to = [
        _script(
            "fourway_signal", "clear",
            "adv = new Truck on lane(0) at 42, with behavior AdvManeuver(7, 0.9)",
            "ego = new Car behind adv by 14, with behavior FollowLane(8)",
            turn_behavior,
        ),
        _script(
            "fourway_signal", "dusk",
            "adv = new Truck on lane(2) at 35, with behavior AdvManeuver(8, 0.8)",
            "ego = new Car on lane(0) at 28, with behavior FollowLane(9)",
            "behavior AdvManeuver(speed, intensity):\n"
            "    follow_lane(speed)\n"
            "    turn(left)\n"
            "    brake(intensity)\n"
            "    wait(60)",
        ),
        _script(
            "fourway_signal", "fog",
            "adv = new Bicycle on lane(0) at 45, with behavior AdvManeuver(4, 0.7)",
            "ego = new Car behind adv by 12, with behavior FollowLane(7)",
            turn_behavior,
            requirements="require adv.speed < 25",
        ),
        _script(
            "fourway_signal", "clear",
            "adv = new Car on lane(4) at 34, with behavior AdvManeuver(9, 0.9)",
            "ego = new Car on lane(0) at 26, with behavior FollowLane(8)",
            "behavior AdvManeuver(speed, intensity):\n"
            "    follow_lane(speed)\n"
            "    turn(left)\n"
            "    brake(intensity)\n"
            "    wait(45)",
            other_objects="bystander = new Pedestrian at(8, 8)",
        ),
        _script(
            "fourway_signal", "clear",
            "adv = new Truck on lane(0) at 40, with behavior AdvManeuver(6, 1)",
            "ego = new Car behind adv by 13, with behavior FollowLane(7)",
            turn_behavior,
            requirements="require ego.speed < 30",
        ),
    ]

    # lane_changing: adversary cuts from the adjacent lane into the ego lane
    cut_behavior = (
        "behavior AdvManeuver(speed, intensity):\n"
        "    follow_lane(speed)\n"
        "    lane_change(right)\n"
        "    brake(intensity)"
    )
    lc = [
        _script(
            "straight2", "clear",
            "adv = new Car on lane(1) at 34, with behavior AdvManeuver(12, 0.7)",
            "ego = new Car on lane(0) at 30, with behavior FollowLane(10)",
            cut_behavior,
            requirements="require adv.speed < 25",
        ),
        _script(
            "straight2", "fog",
            'adv = new Car on lane(1) at 38, with behavior AdvManeuver(11, 0.8), with blueprint "vehicle.audi.tt"',
            "ego = new Car on lane(0) at 32, with behavior FollowLane(9)",
            cut_behavior,
            other_objects="obstacle = new StaticProp at(120, -0.4)",
        ),
        _script(
            "straight2", "wet",
            "adv = new Truck on lane(1) at 40, with behavior AdvManeuver(10, 0.6)",
            "ego = new Car on lane(0) at 34, with behavior FollowLane(9)",
            cut_behavior,
        ),
        _script(
            "straight2", "clear",
            "adv = new Car on lane(1) at 22, with behavior AdvManeuver(14, 0.5)",
            "ego = new Car on lane(0) at 36, with behavior FollowLane(8)",
            cut_behavior,
            requirements="require ego.speed < 30",
        ),
        _script(
            "straight2", "clear",
            'adv = new Car on lane(1) at 36, with behavior AdvManeuver(12, 0.9), with color "red"',
            "ego = new Car on lane(0) at 31, with behavior FollowLane(10)",
            cut_behavior,
            other_objects="cone1 = new StaticProp at(60, 5.6)\ncone2 = new StaticProp at(70, 5.6)",
        ),
    ]

    # vehicle_passing: adversary overtakes in the adjacent lane, then returns
    pass_behavior = (
        "behavior AdvManeuver(speed):\n"
        "    follow_lane(speed)\n"
        "    interrupt when distance(self, ego) < 7:\n"
        "        lane_change(left)"
    )
    vp = [
        _script(
            "straight2", "clear",
            "adv = new Car on lane(1) at 20, with behavior AdvManeuver(15)",
            "ego = new Car on lane(0) at 45, with behavior FollowLane(8)",
            "behavior AdvManeuver(speed):\n"
            "    follow_lane(speed)\n"
            "    lane_change(right)\n"
            "    follow_lane(speed)",
        ),
        _script(
            "straight2", "clear",
            "adv = new Bicycle on lane(1) at 30, with behavior AdvManeuver(7)",
            "ego = new Car on lane(0) at 38, with behavior FollowLane(5), with speed 3",
            "behavior AdvManeuver(speed):\n    accelerate(speed)\n    follow_lane(speed)",
        ),
        _script(
            "straight2", "rain",
            "adv = new Truck on lane(1) at 18, with behavior AdvManeuver(14), with speed 9",
            "ego = new Car on lane(0) at 40, with behavior FollowLane(8)",
            "behavior AdvManeuver(speed):\n    follow_lane(speed)",
            requirements="require adv.speed < 28",
        ),
        _script(
            "straight2", "clear",
            "adv = new Car behind ego by 22, with behavior AdvManeuver(15)",
            "ego = new Car on lane(0) at 50, with behavior FollowLane(9)",
            pass_behavior,
        ),
        _script(
            "straight2", "clear",
            'adv = new Car on lane(1) at 25, with behavior AdvManeuver(16), with blueprint "vehicle.bmw.grandtourer"',
            "ego = new Car on lane(0) at 52, with behavior FollowLane(9)",
            "behavior AdvManeuver(speed):\n    follow_lane(speed)",
            other_objects="parked = new Car on lane(1) at 150",
        ),
    ]

    # red_light_running: crossing adversary ignores the signal
    rr = [
        _script(
            "fourway_signal", "clear",
            "adv = new Car on lane(4) at 30, with behavior AdvManeuver(13)",
            "ego = new Car on lane(0) at 24, with behavior FollowLane(9)",
            "behavior AdvManeuver(speed):\n    follow_lane(speed)",
            requirements="require adv.speed < 25",
        ),
        _script(
            "fourway_signal", "dusk",
            "adv = new Truck on lane(4) at 26, with behavior AdvManeuver(12)",
            "ego = new Car on lane(0) at 22, with behavior FollowLane(8)",
            "behavior AdvManeuver(speed):\n    accelerate(speed)\n    follow_lane(speed)",
        ),
        _script(
            "fourway_signal", "snow",
            "adv = new Car on lane(6) at 28, with behavior AdvManeuver(14)",
            "ego = new Car on lane(0) at 25, with behavior FollowLane(9)",
            "behavior AdvManeuver(speed):\n    follow_lane(speed)",
        ),
        _script(
            "fourway_signal", "clear",
            "adv = new Bicycle on lane(4) at 35, with behavior AdvManeuver(6)",
            "ego = new Car on lane(0) at 27, with behavior FollowLane(8)",
            "behavior AdvManeuver(speed):\n    follow_lane(speed)",
            other_objects="bystander = new Pedestrian at(8, 8)",
        ),
        _script(
            "fourway_signal", "rain",
            "adv = new Truck on lane(4) at 24, with behavior AdvManeuver(11)",
            "ego = new Car on lane(0) at 20, with behavior FollowLane(9)",
            "behavior AdvManeuver(speed):\n"
            "    follow_lane(speed)\n"
            "    interrupt when signal(0) is red:\n"
            "        accelerate(16)",
            requirements="require adv.speed < 25",
        ),
    ]

    # unprotected_left_turn: oncoming adversary turns left across the ego path
    left_behavior = (
        "behavior AdvManeuver(speed):\n"
       "    follow_lane(speed)\n"
        "    turn(left)\n"
        "    follow_lane(speed)"
    )
    ul = [
        _script(
            "fourway_signal", "clear",
            "adv = new Car on lane(2) at 32, with behavior AdvManeuver(10)",
            "ego = new Car on lane(0) at 26, with behavior FollowLane(9)",
            left_behavior,
        ),
        _script(
            "fourway_signal", "fog",
            "adv = new Truck on lane(2) at 28, with behavior AdvManeuver(9)",
            "ego = new Car on lane(0) at 24, with behavior FollowLane(8)",
            left_behavior,
            requirements="require adv.speed < 25",
        ),
        _script(
            "fourway_signal", "night",
            'adv = new Car on lane(2) at 36, with behavior AdvManeuver(11), with color "black"',
            "ego = new Car on lane(0) at 28, with behavior FollowLane(9)",
            left_behavior,
        ),
        _script(
            "fourway_signal", "clear",
            "adv = new Bicycle on lane(2) at 30, with behavior AdvManeuver(5)",
            "ego = new Car on lane(0) at 26, with behavior FollowLane(7)",
            left_behavior,
            other_objects="debris = new StaticProp at(-10, 0.4)",
        ),
        _script(
            "fourway_signal", "clear",
            "adv = new Car on lane(2) at 30, with behavior AdvManeuver(10)",
            "ego = new Car on lane(0) at 25, with behavior FollowLane(8)",
            left_behavior,
            requirements="require ego.speed < 30",
        ),
    ]

    # right_turn: ego merges right at the T junction, adversary approaches
    rt = [
        _script(
            "t_junction", "clear",
            "adv = new Car on lane(2) at 22, with behavior AdvManeuver(12)",
            "ego = new Car on lane(4) at 32, with behavior FollowLane(7)",
            "behavior AdvManeuver(speed):\n    follow_lane(speed)",
        ),
        _script(
            "t_junction", "rain",
            "adv = new Truck on lane(2) at 18, with behavior AdvManeuver(11)",
            "ego = new Car on lane(4) at 30, with behavior FollowLane(6)",
            "behavior AdvManeuver(speed):\n    accelerate(speed)\n    follow_lane(speed)",
        ),
        _script(
            "t_junction", "dusk",
            "adv = new Bicycle on lane(2) at 26, with behavior AdvManeuver(6)",
            "ego = new Car on lane(4) at 34, with behavior FollowLane(7)",
            "behavior AdvManeuver(speed):\n    follow_lane(speed)",
            requirements="require ego.speed < 30",
        ),
        _script(
            "t_junction", "clear",
            "adv = new Car on lane(2) at 24, with behavior AdvManeuver(13)",
            "ego = new Car on lane(4) at 30, with behavior FollowLane(7)",
            "behavior AdvManeuver(speed):\n    follow_lane(speed)",
            other_objects="parked = new Car on lane(1) at 40",
        ),
        _script(
            "t_junction", "clear",
            "adv = new Truck on lane(2) at 20, with behavior AdvManeuver(12)",
            "ego = new Car on lane(4) at 28, with behavior FollowLane(6)",
            "behavior AdvManeuver(speed):\n    accelerate(speed)\n    follow_lane(speed)",
            requirements="require adv.speed < 25",
        ),
    ]

    # crossing_negotiation: pedestrian or cyclist crosses ahead of the ego
    cross_behavior = "behavior AdvManeuver(speed):\n    wait(2)\n    follow_lane(speed)"
    cn = [
        _script(
            "fourway_signal", "clear",
            "adv = new Pedestrian at(6, -7) facing 90, with behavior AdvManeuver(1.4)",
            "ego = new Car on lane(0) at 28, with behavior FollowLane(8)",
            cross_behavior,
        ),
        _script(
            "fourway_signal", "fog",
            "adv = new Bicycle on lane(4) at 40, with behavior AdvManeuver(5)",
            "ego = new Car on lane(0) at 30, with behavior FollowLane(7)",
            "behavior AdvManeuver(speed):\n    follow_lane(speed)",
        ),
        _script(
            "fourway_signal", "clear",
            "adv = new Pedestrian at(7, -8) facing 90, with behavior AdvManeuver(1.2)",
            "ego = new Car on lane(0) at 26, with behavior FollowLane(8)",
            cross_behavior,
            other_objects="background = new Car on lane(2) at 45, with behavior FollowLane(6)",
        ),
        _script(
            "fourway_signal", "snow",
            "adv = new Pedestrian at(5, -6) facing 90, with behavior AdvManeuver(1.5)",
            "ego = new Car on lane(0) at 24, with behavior FollowLane(7)",
            "behavior AdvManeuver(speed):\n"
            "    wait(2)\n"
            "    follow_lane(speed)\n"
            "    interrupt when distance(self, ego) < 5:\n"
            "        wait(1)",
        ),
        _script(
            "fourway_signal", "clear",
            "adv = new Pedestrian at(6, -6) facing 90, with behavior AdvManeuver(1.3)",
            "ego = new Car on lane(0) at 27, with behavior FollowLane(8)",
            cross_behavior,
            requirements="require ego.speed < 30",
        ),
    ]

    for category, bodies in (
        ("straight_obstacle", so),
        ("turning_obstacle", to),
        ("lane_changing", lc),
        ("vehicle_passing", vp),
        ("red_light_running", rr),
        ("unprotected_left_turn", ul),
        ("right_turn", rt),
        ("crossing_negotiation", cn),
    ):
        for index, body in enumerate(bodies, start=1):
            scripts[f"{category}-{index}"] = body
    return scripts


def kb_entries() -> list[dict]:
    entries: list[tuple[str, str, str]] = []

    def add(category: str, description: str, snippet: str) -> None:
        entries.append((category, description, snippet))

    add("geometry", "a straight two-lane road", 'map "straight2"')
    add("geometry", "a two-lane highway stretch", 'map "straight2"\nparam road_type = "highway"')
    add("geometry", "a signalized four-way intersection", 'map "fourway_signal"')
    add("geometry", "a T junction with a side road", 'map "t_junction"')
    add("geometry", "a crossroads controlled by a traffic light", 'map "fourway_signal"')
    add("geometry", "an urban intersection with crosswalks", 'map "fourway_signal"\nparam crosswalks = 1')
    add("geometry", "a rural straight road", 'map "straight2"\nparam road_type = "rural"')
    add("geometry", "a junction approach with a merge from the right", 'map "t_junction"')
    add("geometry", "a multi-lane arterial road", 'map "straight2"\nparam lanes = 2')

    add("weather", "clear and sunny", WEATHER["clear"])
    add("weather", "nighttime with light fog", WEATHER["fog"])
    add("weather", "heavy rain", WEATHER["rain"])
    add("weather", "dusk light", WEATHER["dusk"])
    add("weather", "light snow", WEATHER["snow"])
    add("weather", "wet road after drizzle", WEATHER["wet"])
    add("weather", "nighttime", WEATHER["night"])
    add("weather", "morning glare", 'param weather = "clear"\nparam time_of_day = "morning"')

    add(
        "adversarial_object", "an adversarial car",
        'adv = new Car on lane(0) at 60, with behavior AdvManeuver(9, 0.9), with blueprint "vehicle.ford.crown"',
    )
    add(
        "adversarial_object", "an adversarial truck",
        'adv = new Truck on lane(0) at 65, with behavior AdvManeuver(8), with blueprint "vehicle.carlamotors.carlacola"',
    )
    add("adversarial_object", "an adversarial bicycle", "adv = new Bicycle on lane(0) at 55, with behavior AdvManeuver(5, 0.6)")
    add("adversarial_object", "an adversarial pedestrian", "adv = new Pedestrian at(6, -7) facing 90, with behavior AdvManeuver(1.4)")
    add("adversarial_object", "a car waiting in the adjacent lane", "adv = new Car on lane(1) at 30, with behavior AdvManeuver(12, 0.7)")
    add("adversarial_object", "an oncoming car at the junction", "adv = new Car on lane(2) at 30, with behavior AdvManeuver(10)")
    add("adversarial_object", "a crossing car from the side road", "adv = new Car on lane(4) at 25, with behavior AdvManeuver(13)")
    add("adversarial_object", "a fast car approaching from behind", "adv = new Car on lane(1) at 15, with behavior AdvManeuver(15, 0.5)")
    add("adversarial_object", "a delivery truck near the junction", 'adv = new Truck on lane(2) at 35, with behavior AdvManeuver(9), with color "white"')

    add("behavior", "brakes hard ahead of the ego vehicle", _brake_behavior(14))
    add(
        "behavior", "stalls and blocks the ego lane",
        "behavior AdvManeuver(speed):\n    follow_lane(speed)\n    brake(0.9)\n    wait(600)",
    )
    add(
        "behavior", "cuts into the ego lane and brakes",
        "behavior AdvManeuver(speed, intensity):\n    follow_lane(speed)\n    lane_change(right)\n    brake(intensity)",
    )
    add(
        "behavior", "overtakes the ego vehicle at speed",
        "behavior AdvManeuver(speed):\n    follow_lane(speed)\n    lane_change(right)\n    follow_lane(speed)",
    )
    add("behavior", "runs a red light across the junction", "behavior AdvManeuver(speed):\n    follow_lane(speed)")
    add(
        "behavior", "turns left across the oncoming ego path",
        "behavior AdvManeuver(speed):\n    follow_lane(speed)\n    turn(left)\n    follow_lane(speed)",
    )
    add(
        "behavior", "turns right at the junction into traffic",
        "behavior AdvManeuver(speed, intensity):\n    follow_lane(speed)\n    turn(right)\n    brake(intensity)",
    )
    add("behavior", "crosses the road in front of the ego vehicle", "behavior AdvManeuver(speed):\n    wait(2)\n    follow_lane(speed)")
    add("behavior", "approaches the junction at speed", "behavior AdvManeuver(speed):\n    accelerate(speed)\n    follow_lane(speed)")
    add(
        "behavior", "creeps forward to negotiate the crossing",
        "behavior AdvManeuver(speed, intensity):\n    follow_lane(speed)\n    interrupt when distance(self, ego) < 8:\n        brake(intensity)",
    )

    add("spawn", "the adversary starts ahead of the ego vehicle in the same lane", "ego = new Car behind adv by 18, with behavior FollowLane(11)")
    add("spawn", "the adversary starts behind the ego vehicle", "ego = new Car ahead of adv by 20, with behavior FollowLane(8)")
    add("spawn", "the adversary starts in the adjacent lane beside the ego vehicle", "ego = new Car on lane(0) at 28, with behavior FollowLane(10)")
    add("spawn", "the adversary approaches from the opposite direction", "ego = new Car on lane(0) at 20, with behavior FollowLane(9)")
    add("spawn", "the adversary approaches the junction from the left of the ego vehicle", "ego = new Car on lane(0) at 22, with behavior FollowLane(9)")
    add("spawn", "the adversary approaches the junction from the right of the ego vehicle", "ego = new Car on lane(4) at 30, with behavior FollowLane(7)")
    add("spawn", "ego and adversary converge on the junction", "ego = new Car on lane(0) at 25, with behavior FollowLane(8)")
    add("spawn", "the ego follows the adversary closely", "ego = new Car behind adv by 9, with behavior FollowLane(12)")
    add("spawn", "the ego cruises in the right lane", 'ego = new Car on lane(0) at 35, with behavior FollowLane(10), with blueprint "vehicle.tesla.model3"')

    add("other_objects", "traffic cones on the roadside", "cone1 = new StaticProp at(48, -4)\ncone2 = new StaticProp at(52, -4)")
    add("other_objects", "a parked car at the roadside", "parked = new Car on lane(1) at 110")
    add("other_objects", "debris near the lane edge", "debris = new StaticProp at(70, -1.6)")
    add("other_objects", "a pedestrian waiting at the corner", "bystander = new Pedestrian at(8, 8)")
    add("other_objects", "a second vehicle in background traffic", "background = new Car on lane(1) at 90, with behavior FollowLane(7)")
    add("other_objects", "a roadside barrier", "barrier = new StaticProp at(40, 6)")
    add("other_objects", "a stopped bus at the roadside", "bus = new Truck on lane(1) at 100")
    add("other_objects", "an onlooker near the crossing", "onlooker = new Pedestrian at(-6, 7)")

    add("requirements", "keep at least 2 meters of clearance", "require distance(ego, adv) > 2")
    add("requirements", "keep a safe clearance from the adversary", "require distance(ego, adv) > 0.2")
    add("requirements", "keep at least 1.5 meters of clearance", "require distance(ego, adv) > 1.5")
    add("requirements", "keep at least 2.5 meters of clearance", "require distance(ego, adv) > 2.5")
    add("requirements", "keep at least 3 meters of clearance", "require distance(ego, adv) > 3")
    add("requirements", "ego speed stays below the limit", "require ego.speed < 30")
    add("requirements", "the adversary stays under the speed limit", "require adv.speed < 25")
    add("requirements", "keep a safe distance from the pedestrian", "require distance(ego, adv) > 0.3")

    counters: dict[str, int] = {}
    records = []
    for category, description, snippet in entries:
        counters[category] = counters.get(category, 0) + 1
        records.append(
            {
                "id": f"{category}-{counters[category]:03d}",
                "category": category,
                "description": description,
                "snippet": snippet,
            }
        )
    return records


EVAL_REFERENCE = """\
# Scenario DSL quick reference (for scoring)

A script is a sequence of regions, each introduced by `#-- region: <label>`:
geometry, weather, defaults, adversarial_object, spawn, behavior,
other_objects, requirements.

Statements:
- `map "<name>"` selects the road network (geometry region).
- `model basic` declares the simulator model (defaults region).
- `param <name> = <number|string>` sets a named parameter; weather lives in
  `param weather` / `param time_of_day`.
- `<name> = new <Kind> <placement>[, with behavior <B>(<args>)][, with <attr> <value>]`
  declares an object. Kinds: Car, Truck, Bicycle, Pedestrian, StaticProp.
  Placements: `at(x, y) [facing deg]`, `on lane(i) [at s]`, or relative
  (`ahead of <obj> by d`, `behind <obj> by d`, `left of ...`, `right of ...`).
- `behavior <Name>(<params>):` opens an indented body of actions
  (follow_lane, lane_change, brake, wait, accelerate, turn) and optional
  `interrupt when <condition>:` clauses.
- `require <condition>` constrains the run (object speed, pairwise distance,
  lane membership, signal state).

Scoring guidance: judge whether each rubric criterion of the description is
realized by the script's corresponding region(s), not by prose similarity.
"""


def eval_exemplars(seed: dict[str, str]) -> list[dict]:
    perfect = seed["lane_changing-1"]
    return [
        {
            "description": PROMPTS["lane_changing"][0],
            "script": perfect,
            "scores": {
                "adversarial_type": 10, "behavior": 10, "geometry": 10, "weather": 8,
                "elements": 9, "spawn": 10, "requirements": 9,
            },
            "rationale": {
                "adversarial_type": "adversarial car present",
                "behavior": "cut-in plus braking matches",
                "geometry": "straight two-lane map",
                "weather": "defaults used, none described",
                "elements": "no extra elements described or present",
                "spawn": "adjacent-lane start matches",
                "requirements": "clearance requirement present",
            },
        },
        {
            "description": PROMPTS["straight_obstacle"][0],
            "script": seed["right_turn-1"],
            "scores": {
                "adversarial_type": 8, "behavior": 2, "geometry": 2, "weather": 8,
                "elements": 7, "spawn": 3, "requirements": 6,
            },
            "rationale": {
                "adversarial_type": "car used where car described",
                "behavior": "no braking ahead of ego",
                "geometry": "junction instead of straight road",
                "weather": "defaults are acceptable",
                "elements": "nothing contradicts",
                "spawn": "not ahead of the ego",
                "requirements": "no explicit requirement realized",
            },
        },
    ]


REPAIR_EXEMPLARS = [
    """Broken:
adv = new Car on lane(0) at 40, with behavior Ghost(9)
Diagnostic:
[compile/sem.undefined_behavior] object 'adv' references undefined behavior 'Ghost' @ 1:1
Fixed:
adv = new Car on lane(0) at 40, with behavior FollowLane(9)""",
    """Broken:
require distance(ego, adv) > 2
Diagnostic:
[execute/exec.require_failed] requirement failed: distance(ego, adv) > 2
    at require distance(ego, adv) > 2
    at tick 57
Fixed (constraint relaxed by removing the line):
""",
]


def main() -> None:
    maps = load_map_catalog(DATA / "maps")
    catalog = set(maps)

    scripts = seed_scripts()
    assert len(scripts) == 40, f"expected 40 seed scripts, got {len(scripts)}"
    limits = ExecutionLimits(seed=7)
    failures = []
    for name, source in scripts.items():
        module, diags = compile_source(source)
        if module is None:
            failures.append((name, "parse", diags))
            continue
        sem = analyze(module, catalog)
        if sem:
            failures.append((name, "analyze", sem))
            continue
        result = execute(module, maps[module.map_name], limits)
        if result.status is not ExecStatus.SUCCESS:
            failures.append((name, result.status.value, result.diagnostics))
    if failures:
        for name, stage, info in failures:
            print(f"FAIL {name} [{stage}]")
            for diag in info:
                print("   ", getattr(diag, "code", diag), getattr(diag, "message", ""))
        raise SystemExit(1)

    scripts_dir = DATA / "scripts"
    scripts_dir.mkdir(parents=True, exist_ok=True)
    for name, source in scripts.items():
        (scripts_dir / f"{name}.sdsl").write_text(source, encoding="utf-8")

    prompt_lines = []
    for category, texts in PROMPTS.items():
        for index, text in enumerate(texts, start=1):
            prompt_lines.append(
                json.dumps(
                    {"id": f"{category}-{index}", "category": category, "text": text},
                    ensure_ascii=False,
                )
            )
    (DATA / "prompts.jsonl").write_text("\n".join(prompt_lines) + "\n", encoding="utf-8")

    records = kb_entries()
    (DATA / "kb.jsonl").write_text(
        "\n".join(json.dumps(r, ensure_ascii=False) for r in records) + "\n", encoding="utf-8"
    )
    cache = {content_hash(r["description"]): [float(v) for v in embed(r["description"])] for r in records}
    (DATA / "kb.embcache.json").write_text(json.dumps(cache), encoding="utf-8")

    kb = load_kb(DATA / "kb.jsonl", cache_path=DATA / "kb.embcache.json")
    problems = validate_kb(kb)
    if problems:
        for diag in problems:
            print("KB:", diag.render())
        raise SystemExit(1)

    (DATA / "default_script.sdsl").write_text(assemble(SnippetSet()), encoding="utf-8")

    eval_dir = DATA / "eval"
    eval_dir.mkdir(parents=True, exist_ok=True)
    (eval_dir / "reference.md").write_text(EVAL_REFERENCE, encoding="utf-8")
    (eval_dir / "exemplars.jsonl").write_text(
        "\n".join(json.dumps(e, ensure_ascii=False) for e in eval_exemplars(scripts)) + "\n",
        encoding="utf-8",
    )
    (DATA / "repair_exemplars.json").write_text(
        json.dumps(REPAIR_EXEMPLARS, ensure_ascii=False, indent=1), encoding="utf-8"
    )

    print(f"wrote {len(scripts)} scripts, {len(prompt_lines)} prompts, {len(records)} KB entries")


if __name__ == "__main__":
    main()
