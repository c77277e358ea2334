from .model import (
    UNASSIGNED,
    ExecutionTrace,
    SourceProgram,
    Split,
    TestCase,
    TraceStatus,
    TraceStep,
    VariableSnapshot,
    final_states,
    parse_trace,
    serialize_trace,
)
from .collect import TracerConfig, collect_trace

__all__ = [
    "UNASSIGNED",
    "ExecutionTrace",
    "SourceProgram",
    "Split",
    "TestCase",
    "TraceStatus",
    "TraceStep",
    "VariableSnapshot",
    "final_states",
    "parse_trace",
    "serialize_trace",
    "TracerConfig",
    "collect_trace",
]
