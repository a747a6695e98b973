"""Test-and-Repair Loop: validate -> diagnose -> repair prompt -> revised
script, until success or the iteration budget runs out.

Every attempt is handed to the persistence hook before the loop continues, so
a crash between attempts loses nothing. The final script is kept whether or
not the loop succeeded.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Protocol

from .dsl.diagnostics import Diagnostic
from .gateway import ChatRequest, GatewayError, Provider, RequestTag, request_hash
from .pipeline import strip_code_fences
from .sim.executor import ExecStatus, ExecutionResult

log = logging.getLogger("scengen.repair")

PROMPT_CHAR_BUDGET = 32_000  # ~8000 tokens at 4 chars/token

REPAIR_SYSTEM = """\
You repair scripts written in a small traffic-scenario DSL. You are given the
original scenario description, the most recent script version, and the
diagnostics produced by compiling and executing it. Fix the reported problems
while preserving the scenario's intent. Reply with one fenced code block
containing the complete corrected script."""


class Validator(Protocol):
    def __call__(self, source: str) -> tuple[list[Diagnostic], ExecutionResult | None]: ...


class AttemptOutcome(Enum):
    COMPILE_FAIL = "compile_fail"
    EXEC_FAIL = "exec_fail"
    SUCCESS = "success"


@dataclass(frozen=True)
class RepairAttempt:
    iteration: int  # 1-based
    input_script: str
    diagnostics_in: tuple[Diagnostic, ...]
    prompt_hash: str
    output_script: str
    outcome: AttemptOutcome


@dataclass(frozen=True)
class TrlOutcome:
    final_script: str
    success: bool
    attempts: tuple[RepairAttempt, ...]
    first_attempt_success: bool


class TrlLlmError(Exception):
    """Gateway failure inside the loop; aborts the run (counted as a failure)."""

    def __init__(self, cause: GatewayError, attempts: tuple[RepairAttempt, ...], final_script: str):
        super().__init__(f"trl.llm_error: {cause}")
        self.code = "trl.llm_error"
        self.cause = cause
        self.attempts = attempts
        self.final_script = final_script


def build_repair_prompt(
    description: str,
    latest_script: str,
    diagnostics: list[Diagnostic] | tuple[Diagnostic, ...],
    exemplars: tuple[str, ...] = (),
    temperature: float = 1.0,
    model: str = "",
    max_tokens: int = 4096,
) -> ChatRequest:
    """Assemble the repair request. Fixed section order: description, most
    recent script, rendered diagnostics, stage exemplars; over the character
    budget, exemplars are dropped first, then diagnostics are truncated."""
    if not diagnostics:
        raise ValueError("build_repair_prompt needs at least one diagnostic")
    rendered = [d.render() for d in diagnostics]

    def body_for(diag_lines: list[str], exemplar_blocks: tuple[str, ...]) -> str:
        sections = [
            f"Scenario description:\n{description}",
            f"Most recent script:\n```sdsl\n{latest_script.rstrip()}\n```",
            "Diagnostics:\n" + "\n".join(diag_lines),
        ]
        if exemplar_blocks:
            sections.append("Examples of fixes:\n" + "\n\n".join(exemplar_blocks))
        return "\n\n".join(sections)

    kept_exemplars = tuple(exemplars)
    body = body_for(rendered, kept_exemplars)
    while len(body) > PROMPT_CHAR_BUDGET and kept_exemplars:
        kept_exemplars = kept_exemplars[:-1]
        body = body_for(rendered, kept_exemplars)
    while len(body) > PROMPT_CHAR_BUDGET and len(rendered) > 1:
        rendered = rendered[:-1]
        body = body_for(rendered, kept_exemplars)
    return ChatRequest(
        messages=(("system", REPAIR_SYSTEM), ("user", body)),
        temperature=temperature,
        model=model,
        max_tokens=max_tokens,
        tag=RequestTag.REPAIR,
    )


def _classify(
    compile_diags: list[Diagnostic], result: ExecutionResult | None
) -> tuple[AttemptOutcome, list[Diagnostic]]:
    if compile_diags:
        return AttemptOutcome.COMPILE_FAIL, list(compile_diags)
    assert result is not None
    if result.status is not ExecStatus.SUCCESS:
        return AttemptOutcome.EXEC_FAIL, list(result.diagnostics)
    return AttemptOutcome.SUCCESS, []


def run_trl(
    script: str,
    description: str,
    validator: Validator,
    provider: Provider,
    max_iterations: int = 10,
    exemplars: tuple[str, ...] = (),
    temperature: float = 1.0,
    model: str = "",
    on_attempt: Callable[[RepairAttempt], None] | None = None,
) -> TrlOutcome:
    if max_iterations < 1:
        raise ValueError("max_iterations must be >= 1")
    compile_diags, result = validator(script)
    outcome, diagnostics = _classify(compile_diags, result)
    if outcome is AttemptOutcome.SUCCESS:
        return TrlOutcome(script, success=True, attempts=(), first_attempt_success=True)

    attempts: list[RepairAttempt] = []
    latest = script
    for iteration in range(1, max_iterations + 1):
        request = build_repair_prompt(
            description, latest, diagnostics, exemplars, temperature=temperature, model=model
        )
        try:
            response = provider.complete(request)
        except GatewayError as exc:
            log.error("trl.llm_error at iteration %d: %s", iteration, exc)
            raise TrlLlmError(exc, tuple(attempts), latest) from exc
        candidate = strip_code_fences(response.content)
        compile_diags, result = validator(candidate)
        outcome, new_diagnostics = _classify(compile_diags, result)
        attempt = RepairAttempt(
            iteration=iteration,
            input_script=latest,
            diagnostics_in=tuple(diagnostics),
            prompt_hash=request_hash(request),
            output_script=candidate,
            outcome=outcome,
        )
        if on_attempt is not None:
            on_attempt(attempt)  # persisted before the loop moves on
        attempts.append(attempt)
        latest = candidate
        diagnostics = new_diagnostics
        if outcome is AttemptOutcome.SUCCESS:
            return TrlOutcome(latest, success=True, attempts=tuple(attempts), first_attempt_success=False)
    log.info("trl.exhausted after %d repair attempts", max_iterations)
    return TrlOutcome(latest, success=False, attempts=tuple(attempts), first_attempt_success=False)
