"""Shared fixtures: the worked example from the quantization tables (a
19-line string-matching program on input ``keyofscience``) with a
hand-simulated debugger trace, plus its frozen token columns.
"""

from __future__ import annotations

import shutil

import pytest

from execaware.trace.model import (
    UNASSIGNED,
    ExecutionTrace,
    SourceProgram,
    Split,
    TestCase,
    TraceStatus,
    TraceStep,
    VariableSnapshot,
)

TABLE1_LINES = (
    "#include<iostream>",
    "#include<string>",
    "using namespace std;",
    "int main() {",
    "int s=0, f=0;",
    'string S, k="keyence";',
    "cin>>S;",
    "for(int i=0; i<S.length(); i++) {",
    "if(S[i]==k[i]) s++;",
    "else break;",
    "}",
    "for(int i=0; i<S.length(); i++) {",
    "if(S[S.length()-1-i]==k[6-i]) f++;",
    "else break;",
    "}",
    'if(s+f>=7) cout<<"YES"<<endl;',
    'else cout<<"NO"<<endl;',
    "return 0;",
    "}",
)

TABLE1_INPUT = "keyofscience"
TABLE1_OUTPUT = "YES"

# Frozen per-line token columns (empty string = unlabeled line).
TABLE1_LE = (
    "", "", "", "<e>", "<e>", "<e+>", "<e>", "<e+>", "<e+>", "<e>",
    "", "<e+>", "<e+>", "<e>", "", "<e>", "", "<e>", "<e>",
)
TABLE1_LC = (
    "", "", "", "<e>", "<e>", "<e>", "<e>", "<e>", "<e>", "<e>",
    "", "<e>", "<e>", "<e>", "", "<e>", "", "<e>", "<e>",
)
TABLE1_BC = (
    "", "", "", "", "", "", "", "<BC>", "<BC>", "<BC>",
    "", "<BC>", "<BC>", "<BC>", "", "<BC>", "<BNC>", "", "",
)

_STRING_T = "std::string"
_INT_T = "int"


def _vars(k, S, s, f, i=None):
    snaps = [
        VariableSnapshot("k", _STRING_T, k),
        VariableSnapshot("S", _STRING_T, S),
        VariableSnapshot("s", _INT_T, s),
        VariableSnapshot("f", _INT_T, f),
    ]
    if i is not None:
        snaps.append(VariableSnapshot("i", _INT_T, i))
    return tuple(snaps)


def build_table1_trace() -> ExecutionTrace:
    """Hand simulation of line-by-line stepping on input keyofscience.

    The first loop matches 3 leading characters then breaks; the second
    matches 4 trailing characters then breaks; 3 + 4 >= 7 prints YES.
    """
    q = UNASSIGNED
    key = '"keyence"'
    steps: list[TraceStep] = [
        TraceStep(4, _vars(q, q, q, q)),
        TraceStep(5, _vars(q, q, q, q)),
        TraceStep(6, _vars(q, q, "0", "0")),
        TraceStep(6, _vars(q, '""', "0", "0")),
        TraceStep(7, _vars(key, '""', "0", "0")),
    ]
    S = '"keyofscience"'
    s = 0
    for i in range(4):  # header stops at i = 0..3; body matches until i == 3
        steps.append(TraceStep(8, _vars(key, S, str(s), "0", str(i))))
        steps.append(TraceStep(9, _vars(key, S, str(s), "0", str(i))))
        if i < 3:
            s += 1
    steps.append(TraceStep(10, _vars(key, S, "3", "0", "3")))
    f = 0
    for i in range(5):  # header stops at i = 0..4; body matches until i == 4
        steps.append(TraceStep(12, _vars(key, S, "3", str(f), str(i))))
        steps.append(TraceStep(13, _vars(key, S, "3", str(f), str(i))))
        if i < 4:
            f += 1
    steps.append(TraceStep(14, _vars(key, S, "3", "4", "4")))
    steps.append(TraceStep(16, _vars(key, S, "3", "4")))
    steps.append(TraceStep(18, _vars(key, S, "3", "4")))
    steps.append(TraceStep(19, _vars(key, S, "3", "4")))
    return ExecutionTrace("table1", "case1", tuple(steps), TraceStatus.COMPLETE, 0.02)


@pytest.fixture
def table1_program() -> SourceProgram:
    return SourceProgram("table1", "p_keyence", TABLE1_LINES, Split.TRAIN)


@pytest.fixture
def table1_test() -> TestCase:
    return TestCase("case1", TABLE1_INPUT, TABLE1_OUTPUT + "\n")


@pytest.fixture
def table1_trace() -> ExecutionTrace:
    return build_table1_trace()


def require_tool(name: str):
    if shutil.which(name) is None:
        pytest.skip(f"{name} not available")


needs_gxx = pytest.mark.skipif(shutil.which("g++") is None, reason="g++ not available")
needs_gdb = pytest.mark.skipif(
    shutil.which("g++") is None or shutil.which("gdb") is None,
    reason="g++/gdb not available",
)
