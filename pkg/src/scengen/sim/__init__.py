"""Headless deterministic executor and road network loading."""

from .executor import (
    DIMENSIONS,
    ExecStatus,
    ExecutionLimits,
    ExecutionResult,
    ObjectSummary,
    diagnostic_from_record,
    diagnostic_to_record,
    execute,
    result_to_record,
    signal_state,
    validate,
)
from .roadnet import Lane, MapError, RoadNetwork, Signal, load_map, load_map_catalog, parse_map

__all__ = [
    "DIMENSIONS",
    "ExecStatus",
    "ExecutionLimits",
    "ExecutionResult",
    "Lane",
    "MapError",
    "ObjectSummary",
    "RoadNetwork",
    "Signal",
    "diagnostic_from_record",
    "diagnostic_to_record",
    "execute",
    "load_map",
    "load_map_catalog",
    "parse_map",
    "result_to_record",
    "signal_state",
    "validate",
]
