"""Program/test-case/trace data model and the canonical trace file format.

The trace format is line-delimited UTF-8 text:

    trace <program_id> <case_id> <status> <wall_time>
    step <line_no>
    var <name>\\t<type>\\t<value-or-?>
    ...

``?`` encodes a variable that has no assigned value yet. Tabs, newlines
and backslashes inside var fields are backslash-escaped so every record
stays on one line.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from ..errors import IncompleteTrace, MalformedTrace

UNASSIGNED = "?"


class Split(str, Enum):
    TRAIN = "train"
    VALIDATION = "validation"
    TEST = "test"


class TraceStatus(str, Enum):
    COMPLETE = "complete"
    TIMEOUT = "timeout"
    CRASHED = "crashed"


@dataclass(frozen=True)
class SourceProgram:
    program_id: str
    problem_id: str
    lines: tuple[str, ...]
    split: Split = Split.TRAIN

    def __post_init__(self):
        if not self.lines:
            raise ValueError("a program must have at least one line")
        if any("\n" in line for line in self.lines):
            raise ValueError("program lines must not contain newlines")
        object.__setattr__(self, "lines", tuple(self.lines))

    @classmethod
    def from_text(cls, program_id: str, problem_id: str, text: str,
                  split: Split = Split.TRAIN) -> "SourceProgram":
        return cls(program_id, problem_id, tuple(text.rstrip("\n").split("\n")), split)

    @property
    def text(self) -> str:
        return "\n".join(self.lines)

    def __len__(self) -> int:
        return len(self.lines)


@dataclass(frozen=True)
class TestCase:
    __test__ = False  # keep pytest collection away from the domain type

    case_id: str
    stdin: str
    expected_stdout: str


@dataclass(frozen=True)
class VariableSnapshot:
    name: str
    declared_type: str
    value: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("variable name must be non-empty")

    @property
    def unassigned(self) -> bool:
        return self.value == UNASSIGNED


@dataclass(frozen=True)
class TraceStep:
    line_no: int
    variables: tuple[VariableSnapshot, ...] = ()

    def __post_init__(self):
        if self.line_no < 1:
            raise ValueError("line_no is 1-based")
        object.__setattr__(self, "variables", tuple(self.variables))


@dataclass(frozen=True)
class ExecutionTrace:
    program_id: str
    case_id: str
    steps: tuple[TraceStep, ...]
    status: TraceStatus
    wall_time: float

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if self.status is TraceStatus.COMPLETE and not self.steps:
            raise ValueError("a complete trace must contain at least one step")
        if self.wall_time < 0:
            raise ValueError("wall_time must be non-negative")

    @property
    def complete(self) -> bool:
        return self.status is TraceStatus.COMPLETE


_ESCAPES = [("\\", "\\\\"), ("\t", "\\t"), ("\n", "\\n"), ("\r", "\\r")]


def _escape(field: str) -> str:
    for raw, escaped in _ESCAPES:
        field = field.replace(raw, escaped)
    return field


def _unescape(field: str) -> str:
    out: list[str] = []
    i = 0
    while i < len(field):
        ch = field[i]
        if ch == "\\" and i + 1 < len(field):
            nxt = field[i + 1]
            mapped = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}.get(nxt)
            if mapped is not None:
                out.append(mapped)
                i += 2
                continue
        out.append(ch)
        i += 1
    return "".join(out)


def serialize_trace(trace: ExecutionTrace) -> str:
    """Render a trace as its canonical document (LF-terminated)."""
    lines = [
        f"trace {trace.program_id} {trace.case_id} "
        f"{trace.status.value} {trace.wall_time!s}"
    ]
    for step in trace.steps:
        lines.append(f"step {step.line_no}")
        for var in step.variables:
            lines.append(
                "var "
                f"{_escape(var.name)}\t{_escape(var.declared_type)}\t{_escape(var.value)}"
            )
    return "\n".join(lines) + "\n"


def parse_trace(document: str, line_count: int | None = None) -> ExecutionTrace:
    """Parse a canonical trace document.

    ``line_count``, when given, bounds every step's line_no by the traced
    program's length; a document alone cannot know it.

    Raises MalformedTrace on any syntax violation, unknown status, or
    out-of-range line number.
    """
    if not document.endswith("\n"):
        raise MalformedTrace("document must be LF-terminated")
    records = document.split("\n")[:-1]
    if not records:
        raise MalformedTrace("empty document")

    header = records[0].split(" ")
    if len(header) != 5 or header[0] != "trace":
        raise MalformedTrace(f"bad header: {records[0]!r}")
    _, program_id, case_id, status_text, wall_text = header
    if not program_id or not case_id:
        raise MalformedTrace("empty program or case id")
    try:
        status = TraceStatus(status_text)
    except ValueError:
        raise MalformedTrace(f"unknown status {status_text!r}") from None
    try:
        wall_time = float(wall_text)
    except ValueError:
        raise MalformedTrace(f"bad wall_time {wall_text!r}") from None

    steps: list[TraceStep] = []
    pending_line: int | None = None
    pending_vars: list[VariableSnapshot] = []

    def flush():
        if pending_line is not None:
            steps.append(TraceStep(pending_line, tuple(pending_vars)))

    for lineno, record in enumerate(records[1:], start=2):
        if record.startswith("step "):
            flush()
            pending_vars = []
            try:
                pending_line = int(record[5:])
            except ValueError:
                raise MalformedTrace(f"line {lineno}: bad step record {record!r}") from None
            if pending_line < 1 or (line_count is not None and pending_line > line_count):
                raise MalformedTrace(f"line {lineno}: line_no {pending_line} out of range")
        elif record.startswith("var "):
            if pending_line is None:
                raise MalformedTrace(f"line {lineno}: var record before any step")
            fields = record[4:].split("\t")
            if len(fields) != 3:
                raise MalformedTrace(f"line {lineno}: var record needs 3 tab-separated fields")
            name, declared_type, value = (_unescape(f) for f in fields)
            if not name:
                raise MalformedTrace(f"line {lineno}: empty variable name")
            pending_vars.append(VariableSnapshot(name, declared_type, value))
        else:
            raise MalformedTrace(f"line {lineno}: unknown record {record!r}")
    flush()

    if status is TraceStatus.COMPLETE and not steps:
        raise MalformedTrace("complete trace with zero steps")
    try:
        return ExecutionTrace(program_id, case_id, tuple(steps), status, wall_time)
    except ValueError as exc:
        raise MalformedTrace(str(exc)) from None


def final_states(trace: ExecutionTrace) -> list[VariableSnapshot]:
    """Final snapshot of each variable: its value in the last step where
    it appears, ordered by first appearance in the trace."""
    if not trace.complete:
        raise IncompleteTrace(f"trace status is {trace.status.value}")
    order: list[str] = []
    last: dict[str, VariableSnapshot] = {}
    for step in trace.steps:
        for var in step.variables:
            if var.name not in last:
                order.append(var.name)
            last[var.name] = var
    return [last[name] for name in order]


def distinct_variable_names(steps: Iterable[TraceStep]) -> set[str]:
    return {var.name for step in steps for var in step.variables}
