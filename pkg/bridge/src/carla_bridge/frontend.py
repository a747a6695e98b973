"""Compile/execute frontends.

``RealScenicFrontend`` drives the actual Scenic 3 compiler and a CARLA
simulator (both imported lazily; only needed when serving for real).
``StubScenicFrontend`` mimics the compiler's observable behavior on a small
rule set so the whole conformance suite runs without Scenic or CARLA.
"""

from __future__ import annotations

import re
from typing import Protocol

from .config import BridgeConfig
from .mapping import map_compile_error, map_execute_error, status_for_execute_code
from .wire import DiagnosticRecord, ExecOutcome, Limits


class ScenicFrontend(Protocol):
    def compile(self, source: str) -> list[DiagnosticRecord]: ...

    def execute(self, source: str, limits: Limits) -> ExecOutcome: ...


class StubScenicFrontend:
    """Deterministic stand-in reproducing Scenic-compiler-shaped outcomes.

    Compile rules: a script without a ``model`` line raises the no-model
    error; references to behaviors that are never defined (and are not the
    built-ins) raise NameError-style messages; `# stub:` marker comments
    force specific failures.
    """

    BUILTIN_BEHAVIORS = ("FollowLane", "Idle")

    def compile(self, source: str) -> list[DiagnosticRecord]:
        marker = _marker(source)
        if marker == "syntax-error":
            return [map_compile_error("ScenicSyntaxError: invalid syntax (line 3)", source)]
        diagnostics: list[DiagnosticRecord] = []
        if not re.search(r"^model ", source, re.MULTILINE):
            diagnostics.append(
                map_compile_error("InvalidScenarioError: no model statement found", source)
            )
        defined = set(re.findall(r"^behavior (\w+)\(", source, re.MULTILINE))
        defined.update(self.BUILTIN_BEHAVIORS)
        for line_no, line in enumerate(source.splitlines(), start=1):
            used = re.search(r"with behavior (\w+)\(", line)
            if used and used.group(1) not in defined:
                diagnostics.append(
                    map_compile_error(
                        f"NameError: name '{used.group(1)}' is not defined (line {line_no})",
                        source,
                    )
                )
        return diagnostics

    def execute(self, source: str, limits: Limits) -> ExecOutcome:
        marker = _marker(source)
        if marker == "runtime":
            diagnostic = map_execute_error(
                "RuntimeError: actor destroyed during step",
                trace=("simulation step", "tick 42"),
            )
            return ExecOutcome("runtime_error", 1, (diagnostic,))
        if marker == "spawn-fail" or re.search(r"ahead of \w+ by 0\.\d+", source):
            diagnostic = map_execute_error(
                f"RejectionException: failed to sample scene in {limits.max_spawn_attempts} attempts",
                trace=(f"spawn attempt {limits.max_spawn_attempts}", "rejected sample"),
            )
            return ExecOutcome("spawn_failure", limits.max_spawn_attempts, (diagnostic,))
        if marker == "require-fail":
            diagnostic = map_execute_error(
                "requirement (distance to adv) falsified",
                trace=("require distance", "tick 10"),
            )
            return ExecOutcome("requirement_violation", 1, (diagnostic,))
        return ExecOutcome("success", 1, ())


def _marker(source: str) -> str | None:
    match = re.search(r"^# stub: ([a-z-]+)$", source, re.MULTILINE)
    return match.group(1) if match else None


class RealScenicFrontend:
    """Real Scenic 3 compilation and CARLA execution.

    Requires the ``carla`` extra. Map ids from the artifact are translated to
    CARLA town names through the bridge config.
    """

    def __init__(self, config: BridgeConfig):
        self.config = config

    def _translate_maps(self, source: str) -> str:
        out = source
        for map_id, town in self.config.town_map.items():
            out = out.replace(f'map "{map_id}"', f"param map = localPath('{town}.xodr')")
        return out

    def compile(self, source: str) -> list[DiagnosticRecord]:
        import scenic  # deferred: only needed when actually serving

        try:
            scenic.scenarioFromString(self._translate_maps(source), mode2D=True)
        except Exception as exc:  # Scenic raises a zoo of error types
            return [map_compile_error(f"{type(exc).__name__}: {exc}", source)]
        return []

    def execute(self, source: str, limits: Limits) -> ExecOutcome:
        import scenic
        from scenic.simulators.carla import CarlaSimulator

        try:
            scenario = scenic.scenarioFromString(self._translate_maps(source), mode2D=True)
        except Exception as exc:
            # Should have been caught at the compile step; map defensively.
            diagnostic = map_execute_error(f"{type(exc).__name__}: {exc}")
            return ExecOutcome("runtime_error", 0, (diagnostic,))
        try:
            scene, used = scenario.generate(maxIterations=limits.max_spawn_attempts)
        except Exception as exc:
            diagnostic = map_execute_error(
                f"RejectionException: {exc}", trace=(f"spawn attempt {limits.max_spawn_attempts}",)
            )
            return ExecOutcome("spawn_failure", limits.max_spawn_attempts, (diagnostic,))
        simulator = CarlaSimulator(
            carla_map=None, map_path="", address=self.config.host, port=self.config.port
        )
        try:
            simulator.simulate(scene, maxSteps=limits.sim_steps)
        except Exception as exc:
            diagnostic = map_execute_error(
                f"{type(exc).__name__}: {exc}", trace=(f"{type(exc).__name__}", "simulation")
            )
            return ExecOutcome(status_for_execute_code(diagnostic.code), used, (diagnostic,))
        finally:
            simulator.destroy()
        return ExecOutcome("success", used, ())
