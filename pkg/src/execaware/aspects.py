"""The four execution aspects derived from a trace: line executions,
line coverage, branch coverage, and terminal variable states.

Branch membership comes from a lexical scan (keyword plus brace extents),
which is reliable on the formatter-normalized, one-statement-per-line
corpus this toolchain targets.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from ._kernels import line_counts as _line_counts_kernel
from .errors import EmptyInput, IncompleteTrace, UnbalancedBraces
from .trace.model import ExecutionTrace, SourceProgram, VariableSnapshot, final_states


class LineKind(str, Enum):
    BRANCH_REGION = "branch_region"
    NON_BRANCH = "non_branch"
    BRACE_ONLY = "brace_only"


class BranchClass(str, Enum):
    COVERED_BRANCH = "covered_branch"
    UNCOVERED_BRANCH = "uncovered_branch"
    NONE = "none"


@dataclass(frozen=True)
class BranchMap:
    """Per-line branch membership; index 1-based like everything else."""

    kinds: tuple[LineKind, ...]

    def kind(self, line_no: int) -> LineKind:
        return self.kinds[line_no - 1]

    def __len__(self) -> int:
        return len(self.kinds)


@dataclass(frozen=True)
class LineAspects:
    """All four aspects of one program/test-case pairing."""

    program_id: str
    case_id: str
    line_count: int
    exec_count: dict[int, int]
    covered: frozenset[int]
    branch_class: tuple[BranchClass, ...]
    terminal_vars: tuple[VariableSnapshot, ...] = ()

    def count(self, line_no: int) -> int:
        return self.exec_count.get(line_no, 0)

    def is_covered(self, line_no: int) -> bool:
        return line_no in self.covered

    def branch(self, line_no: int) -> BranchClass:
        return self.branch_class[line_no - 1]


def _require_complete(trace: ExecutionTrace):
    if not trace.complete:
        raise IncompleteTrace(f"trace status is {trace.status.value}")


def count_line_executions(trace: ExecutionTrace) -> dict[int, int]:
    """How often each line executed; lines absent from the map never ran."""
    _require_complete(trace)
    return _line_counts_kernel([step.line_no for step in trace.steps])


def line_coverage(trace: ExecutionTrace) -> set[int]:
    """Lines executed at least once."""
    _require_complete(trace)
    return {step.line_no for step in trace.steps}


def merge_le_across_traces(counts: list[dict[int, int]]) -> dict[int, int]:
    """Pointwise maximum of per-line counts across traces of one program."""
    if not counts:
        raise EmptyInput("no count maps to merge")
    merged: dict[int, int] = {}
    for count_map in counts:
        for line_no, count in count_map.items():
            if count > merged.get(line_no, 0):
                merged[line_no] = count
    return merged


_BRANCH_HEADER = re.compile(r"^(?:\}\s*)?(?:if|else|for|while|do|switch)\b")


def _strip_noise(lines: tuple[str, ...]) -> list[str]:
    """Blank out string/char literal contents and comments so brace and
    keyword scanning sees only code structure."""
    stripped: list[str] = []
    in_block_comment = False
    for line in lines:
        out: list[str] = []
        i = 0
        n = len(line)
        while i < n:
            if in_block_comment:
                end = line.find("*/", i)
                if end < 0:
                    i = n
                else:
                    in_block_comment = False
                    i = end + 2
                continue
            ch = line[i]
            if line.startswith("//", i):
                break
            if line.startswith("/*", i):
                in_block_comment = True
                i += 2
                continue
            if ch in ('"', "'"):
                out.append(ch)
                i += 1
                while i < n:
                    if line[i] == "\\":
                        i += 2
                        continue
                    if line[i] == ch:
                        out.append(ch)
                        i += 1
                        break
                    i += 1
                continue
            out.append(ch)
            i += 1
        stripped.append("".join(out))
    return stripped


def build_branch_map(program: SourceProgram) -> BranchMap:
    """Classify every line as branch_region, non_branch, or brace_only.

    Header lines of if/else/for/while/do/switch and every line lexically
    inside their bodies are branch_region; lines holding only braces are
    brace_only; the rest is non_branch. Preprocessor lines are skipped by
    the brace scanner.
    """
    stripped = _strip_noise(program.lines)
    kinds: list[LineKind] = []
    block_stack: list[bool] = []  # True = block belongs to a branch construct
    pending_branch = False  # header seen; waiting for its '{' or ';'
    paren_depth = 0

    for raw in stripped:
        code = raw.strip()
        if code.startswith("#"):
            kinds.append(LineKind.NON_BRANCH)
            continue

        is_header = bool(_BRANCH_HEADER.match(code))
        if code and all(ch in "{}" for ch in code):
            kinds.append(LineKind.BRACE_ONLY)
        elif is_header or pending_branch or any(block_stack):
            kinds.append(LineKind.BRANCH_REGION)
        else:
            kinds.append(LineKind.NON_BRANCH)

        if is_header:
            pending_branch = True
        for ch in code:
            if ch == "(":
                paren_depth += 1
            elif ch == ")":
                paren_depth = max(0, paren_depth - 1)
            elif ch == "{":
                block_stack.append(pending_branch)
                pending_branch = False
            elif ch == "}":
                if not block_stack:
                    raise UnbalancedBraces("unmatched '}'")
                block_stack.pop()
            elif ch == ";" and paren_depth == 0:
                pending_branch = False

    if block_stack:
        raise UnbalancedBraces(f"{len(block_stack)} unclosed brace(s)")
    return BranchMap(tuple(kinds))


def branch_coverage(bmap: BranchMap, covered: set[int]) -> tuple[BranchClass, ...]:
    """Per-line branch classification given the covered-line set."""
    classes: list[BranchClass] = []
    for line_no in range(1, len(bmap) + 1):
        if bmap.kind(line_no) is not LineKind.BRANCH_REGION:
            classes.append(BranchClass.NONE)
        elif line_no in covered:
            classes.append(BranchClass.COVERED_BRANCH)
        else:
            classes.append(BranchClass.UNCOVERED_BRANCH)
    return tuple(classes)


def extract_aspects(program: SourceProgram, trace: ExecutionTrace,
                    bmap: BranchMap | None = None) -> LineAspects:
    """Derive all four aspects of one (program, trace) pairing."""
    _require_complete(trace)
    if bmap is None:
        bmap = build_branch_map(program)
    counts = count_line_executions(trace)
    covered = frozenset(line_coverage(trace))
    return LineAspects(
        program_id=trace.program_id,
        case_id=trace.case_id,
        line_count=len(program),
        exec_count=counts,
        covered=covered,
        branch_class=branch_coverage(bmap, set(covered)),
        terminal_vars=tuple(final_states(trace)),
    )
