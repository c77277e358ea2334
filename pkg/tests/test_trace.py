"""Trace model: format round trips, parse errors, final states."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from execaware.errors import IncompleteTrace, MalformedTrace
from execaware.trace.model import (
    UNASSIGNED,
    ExecutionTrace,
    TraceStatus,
    TraceStep,
    VariableSnapshot,
    final_states,
    parse_trace,
    serialize_trace,
)

TWO_STEP_DOC = (
    "trace prog-1 case-7 complete 0.12\n"
    "step 1\n"
    "var x\tint\t3\n"
    "step 2\n"
    "var x\tint\t4\n"
)


def test_parse_two_step_fixture():
    trace = parse_trace(TWO_STEP_DOC)
    assert trace.program_id == "prog-1"
    assert trace.case_id == "case-7"
    assert trace.status is TraceStatus.COMPLETE
    assert trace.wall_time == 0.12
    assert len(trace.steps) == 2
    assert trace.steps[0] == TraceStep(1, (VariableSnapshot("x", "int", "3"),))
    assert trace.steps[1].variables[0].value == "4"


def test_parse_timeout_with_zero_steps():
    trace = parse_trace("trace p c timeout 500.0\n")
    assert trace.status is TraceStatus.TIMEOUT
    assert trace.steps == ()


def test_out_of_range_line_is_malformed():
    doc = "trace p c complete 1.0\nstep 99\n"
    with pytest.raises(MalformedTrace):
        parse_trace(doc, line_count=10)
    # without a line count the document is structurally fine
    assert parse_trace(doc).steps[0].line_no == 99


@pytest.mark.parametrize("doc", [
    "",
    "trace p c complete 1.0",  # missing trailing newline
    "trace p c nonsense 1.0\nstep 1\n",
    "trace p c complete abc\nstep 1\n",
    "trace p complete 1.0\nstep 1\n",
    "trace p c complete 1.0\nvar x\tint\t1\n",  # var before step
    "trace p c complete 1.0\nstep zero\n",
    "trace p c complete 1.0\nstep 0\n",
    "trace p c complete 1.0\nstep 1\nvar x\tint\n",  # two fields only
    "trace p c complete 1.0\nwhat 3\n",
    "trace p c complete 1.0\n",  # complete but stepless
])
def test_malformed_documents(doc):
    with pytest.raises(MalformedTrace):
        parse_trace(doc)


def test_round_trip_two_step_doc():
    assert serialize_trace(parse_trace(TWO_STEP_DOC)) == TWO_STEP_DOC


def test_round_trip_table1(table1_trace):
    doc = serialize_trace(table1_trace)
    assert serialize_trace(parse_trace(doc)) == doc
    assert parse_trace(doc) == table1_trace


_name = st.text(
    alphabet=st.characters(min_codepoint=33, max_codepoint=126), min_size=1, max_size=8)
_field = st.text(min_size=0, max_size=10)


@st.composite
def traces(draw):
    status = draw(st.sampled_from(list(TraceStatus)))
    n_steps = draw(st.integers(min_value=0 if status is not TraceStatus.COMPLETE else 1,
                               max_value=6))
    steps = []
    for _ in range(n_steps):
        variables = tuple(
            VariableSnapshot(draw(_name), draw(_field), draw(_field))
            for _ in range(draw(st.integers(0, 3))))
        steps.append(TraceStep(draw(st.integers(1, 40)), variables))
    ids = st.text(
        alphabet=st.characters(min_codepoint=33, max_codepoint=126,
                               exclude_characters=" "),
        min_size=1, max_size=10)
    wall = draw(st.floats(min_value=0, max_value=1e6, allow_nan=False))
    return ExecutionTrace(draw(ids), draw(ids), tuple(steps), status, wall)


@given(traces())
def test_round_trip_random_traces(trace):
    doc = serialize_trace(trace)
    parsed = parse_trace(doc)
    assert parsed == trace
    assert serialize_trace(parsed) == doc


def test_final_states_last_assignment_wins():
    steps = (
        TraceStep(1, (VariableSnapshot("a", "int", UNASSIGNED),)),
        TraceStep(2, (VariableSnapshot("a", "int", "1"),
                      VariableSnapshot("b", "int", "5"),)),
        TraceStep(3, (VariableSnapshot("a", "int", "2"),)),
        TraceStep(2, (VariableSnapshot("a", "int", "3"),)),
    )
    trace = ExecutionTrace("p", "c", steps, TraceStatus.COMPLETE, 0.0)
    snapshots = final_states(trace)
    assert [(v.name, v.value) for v in snapshots] == [("a", "3"), ("b", "5")]


def test_final_states_preserves_unassigned_marker():
    steps = (TraceStep(1, (VariableSnapshot("x", "int", UNASSIGNED),)),)
    trace = ExecutionTrace("p", "c", steps, TraceStatus.COMPLETE, 0.0)
    assert final_states(trace)[0].unassigned


def test_final_states_requires_complete():
    trace = ExecutionTrace("p", "c", (), TraceStatus.TIMEOUT, 1.0)
    with pytest.raises(IncompleteTrace):
        final_states(trace)


@given(traces())
def test_final_states_idempotent_and_sized(trace):
    if trace.status is not TraceStatus.COMPLETE:
        return
    snapshots = final_states(trace)
    names = {v.name for st_ in trace.steps for v in st_.variables}
    assert len(snapshots) == len(names)
    assert final_states(trace) == snapshots


def test_table1_final_states(table1_trace):
    snapshots = final_states(table1_trace)
    assert [v.name for v in snapshots] == ["k", "S", "s", "f", "i"]
    by_name = {v.name: v.value for v in snapshots}
    assert by_name["s"] == "3"
    assert by_name["f"] == "4"
    assert by_name["i"] == "4"


def test_escaped_fields_round_trip():
    steps = (TraceStep(1, (VariableSnapshot("v", "char [3]", "a\tb\\nc\nd"),)),)
    trace = ExecutionTrace("p", "c", steps, TraceStatus.COMPLETE, 0.5)
    doc = serialize_trace(trace)
    assert "\t" not in doc.split("\n")[2][4:].split("\t")[2]
    assert parse_trace(doc) == trace
