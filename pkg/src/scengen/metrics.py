"""Reliability metrics over persisted run records.

Three quantities: execution success rate (successes over total, in
first-attempt-only or within-budget mode), repair convergence rate (mean
repair-iteration count over runs that failed initially but were repaired,
counting the final successful attempt), and the semantic conformity score
(seven 0..10 rubric criteria normalized to [0, 1]).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

from .pipeline import CATEGORIES

RUN_LOG_SCHEMA = "run-log/1"

SCORE_MAX = 10  # per-criterion maximum
CRITERIA_COUNT = 7


class MetricsError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


@dataclass(frozen=True)
class RunRecord:
    scenario_id: str
    category: str
    run_index: int
    first_attempt_success: bool
    repair_attempts: int  # A_i: repair iterations incl. the final successful one
    success: bool
    diagnostics_summary: tuple[str, ...] = ()
    timings: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if self.repair_attempts < 0:
            raise ValueError("repair_attempts must be >= 0")
        if self.first_attempt_success and self.repair_attempts != 0:
            raise ValueError("first-attempt success cannot carry repair attempts")
        if self.success and not self.first_attempt_success and self.repair_attempts < 1:
            raise ValueError("repaired success needs >= 1 repair attempt")


def esr(records: list[RunRecord], mode: str = "total") -> tuple[dict[str, float], float]:
    """Per-category success rate and the unweighted mean over categories.

    mode='total' counts any success within budget; mode='single' counts only
    first-attempt successes."""
    if mode not in ("single", "total"):
        raise ValueError(f"unknown esr mode {mode!r}")
    if not records:
        raise MetricsError("metrics.empty_category", "no run records")
    per_category: dict[str, float] = {}
    for category in _present_categories(records):
        runs = [r for r in records if r.category == category]
        if mode == "single":
            wins = sum(1 for r in runs if r.first_attempt_success)
        else:
            wins = sum(1 for r in runs if r.success)
        per_category[category] = wins / len(runs)
    average = sum(per_category.values()) / len(per_category)
    return per_category, average


def rcr(records: list[RunRecord]) -> tuple[dict[str, float | None], float | None]:
    """Per-category mean repair-iteration count over qualifying runs (failed
    initially, then succeeded); None marks a category with no qualifying run.
    The average covers only defined categories."""
    per_category: dict[str, float | None] = {}
    for category in _present_categories(records):
        qualifying = [
            r.repair_attempts
            for r in records
            if r.category == category and r.success and not r.first_attempt_success
        ]
        per_category[category] = sum(qualifying) / len(qualifying) if qualifying else None
    defined = [v for v in per_category.values() if v is not None]
    average = sum(defined) / len(defined) if defined else None
    return per_category, average


def scs(scores: list[int] | tuple[int, ...]) -> float:
    """Normalized rubric score: sum of the seven criteria over 10 * 7."""
    if len(scores) != CRITERIA_COUNT:
        raise MetricsError(
            "metrics.bad_criteria_count", f"expected {CRITERIA_COUNT} scores, got {len(scores)}"
        )
    for value in scores:
        if not 0 <= value <= SCORE_MAX:
            raise MetricsError("metrics.bad_score_range", f"score {value} outside 0..{SCORE_MAX}")
    return sum(scores) / (SCORE_MAX * CRITERIA_COUNT)


def _present_categories(records: list[RunRecord]) -> list[str]:
    present = {r.category for r in records}
    ordered = [c for c in CATEGORIES if c in present]
    ordered.extend(sorted(present - set(CATEGORIES)))
    return ordered


def render_percent(value: float) -> str:
    """Percent with two decimals, round-half-up (97.285 -> '97.29')."""
    return str(Decimal(repr(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def render_rate(value: float) -> str:
    return str(Decimal(repr(value)).quantize(Decimal("0.001"), rounding=ROUND_HALF_UP))


def population_std(values: list[float]) -> float:
    mean = sum(values) / len(values)
    return (sum((v - mean) ** 2 for v in values) / len(values)) ** 0.5


@dataclass(frozen=True)
class ScsStats:
    minimum: float
    maximum: float
    mean: float
    std: float  # percentage points
    count: int


def scs_stats(values: list[float]) -> ScsStats:
    """Population statistics over SCS values given in percent."""
    if not values:
        raise MetricsError("metrics.empty_category", "no SCS values")
    return ScsStats(
        minimum=min(values),
        maximum=max(values),
        mean=sum(values) / len(values),
        std=population_std(values),
        count=len(values),
    )


@dataclass(frozen=True)
class MetricsReport:
    esr_single: dict[str, float]
    esr_single_avg: float
    esr_total: dict[str, float]
    esr_total_avg: float
    rcr: dict[str, float | None]
    rcr_avg: float | None
    scs: dict[str, ScsStats]

    def to_machine(self) -> dict:
        return {
            "schema": "metrics-report/1",
            "esr": {
                "single": {"per_category": self.esr_single, "average": self.esr_single_avg},
                "total": {"per_category": self.esr_total, "average": self.esr_total_avg},
            },
            "rcr": {"per_category": self.rcr, "average": self.rcr_avg},
            "scs": {
                category: {
                    "min": stats.minimum,
                    "max": stats.maximum,
                    "mean": stats.mean,
                    "std_pp": stats.std,
                    "count": stats.count,
                }
                for category, stats in self.scs.items()
            },
        }


def report(
    records: list[RunRecord], scs_scores: dict[str, list[float]] | None = None
) -> tuple[MetricsReport, str]:
    """Build the aggregate report and its plain-text table rendering."""
    single, single_avg = esr(records, "single")
    total, total_avg = esr(records, "total")
    rcr_cat, rcr_avg = rcr(records)
    stats = {
        category: scs_stats(values)
        for category, values in (scs_scores or {}).items()
        if values
    }
    rep = MetricsReport(single, single_avg, total, total_avg, rcr_cat, rcr_avg, stats)
    return rep, _render_table(rep)


def _render_table(rep: MetricsReport) -> str:
    categories = list(rep.esr_total)
    headers = ["Metric"] + categories + ["Average"]

    def fmt_rcr(value: float | None) -> str:
        return "N/A" if value is None else render_rate(value)

    rows = [
        ["ESR (single)"]
        + [render_rate(rep.esr_single[c]) for c in categories]
        + [render_rate(rep.esr_single_avg)],
        ["ESR (total)"]
        + [render_rate(rep.esr_total[c]) for c in categories]
        + [render_rate(rep.esr_total_avg)],
        ["RCR"] + [fmt_rcr(rep.rcr[c]) for c in categories] + [fmt_rcr(rep.rcr_avg)],
    ]
    lines = [_format_row(headers, headers), _format_row(["-" * len(h) for h in headers], headers)]
    lines.extend(_format_row(row, headers) for row in rows)
    if rep.scs:
        lines.append("")
        scs_headers = ["SCS", "Min %", "Max %", "Avg %", "Std (pp)", "n"]
        lines.append(_format_row(scs_headers, scs_headers))
        lines.append(_format_row(["-" * len(h) for h in scs_headers], scs_headers))
        for category, stats in rep.scs.items():
            lines.append(
                _format_row(
                    [
                        category,
                        render_percent(stats.minimum),
                        render_percent(stats.maximum),
                        render_percent(stats.mean),
                        render_percent(stats.std),
                        str(stats.count),
                    ],
                    scs_headers,
                )
            )
    return "\n".join(lines) + "\n"


def _format_row(cells: list[str], headers: list[str]) -> str:
    widths = [max(len(h), 12) for h in headers]
    return "  ".join(cell.ljust(width) for cell, width in zip(cells, widths)).rstrip()


# -- run log IO --


def record_to_json(record: RunRecord) -> str:
    return json.dumps(
        {
            "scenario_id": record.scenario_id,
            "category": record.category,
            "run_index": record.run_index,
            "first_attempt_success": record.first_attempt_success,
            "repair_attempts": record.repair_attempts,
            "success": record.success,
            "diagnostics_summary": list(record.diagnostics_summary),
            "timings": record.timings,
        },
        ensure_ascii=False,
    )


def record_from_json(line: str) -> RunRecord:
    data = json.loads(line)
    return RunRecord(
        scenario_id=data["scenario_id"],
        category=data["category"],
        run_index=data["run_index"],
        first_attempt_success=data["first_attempt_success"],
        repair_attempts=data["repair_attempts"],
        success=data["success"],
        diagnostics_summary=tuple(data.get("diagnostics_summary", ())),
        timings=data.get("timings", {}),
    )


def load_run_log(path: str | Path) -> list[RunRecord]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise MetricsError("metrics.empty_category", f"empty run log {path}")
    header = json.loads(lines[0])
    if header.get("schema") != RUN_LOG_SCHEMA:
        raise MetricsError("metrics.empty_category", f"unknown run-log schema in {path}")
    return [record_from_json(line) for line in lines[1:] if line.strip()]


class RunLogWriter:
    """Append-only run log with a schema header; the single serialization
    point for concurrent runs."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        if not self.path.exists() or self.path.stat().st_size == 0:
            self.path.write_text(json.dumps({"schema": RUN_LOG_SCHEMA}) + "\n", encoding="utf-8")

    def append(self, record: RunRecord) -> None:
        with self.path.open("a", encoding="utf-8") as handle:
            handle.write(record_to_json(record) + "\n")
            handle.flush()
