"""A three-problem toy corpus for CLI and end-to-end tests.

Each problem has a slow/fast pair (the slow side sleeps so wall-clock
speedups are decisive) plus pre-training programs outside the pairs.
"""

from __future__ import annotations

import json
from pathlib import Path

from execaware.corpus import Corpus, load_corpus
from execaware.trace.model import (
    ExecutionTrace,
    SourceProgram,
    TraceStatus,
    TraceStep,
    VariableSnapshot,
    serialize_trace,
)

SLOW_SUM = "\n".join([
    "#include <cstdio>",
    "#include <unistd.h>",
    "int main() {",
    "  long n;",
    '  scanf("%ld", &n);',
    "  usleep(120000);",
    "  long total = 0;",
    "  for (long i = 1; i <= n; i++) {",
    "    total += i;",
    "  }",
    '  printf("%ld\\n", total);',
    "  return 0;",
    "}",
])
FAST_SUM = "\n".join([
    "#include <cstdio>",
    "int main() {",
    "  long n;",
    '  scanf("%ld", &n);',
    '  printf("%ld\\n", n * (n + 1) / 2);',
    "  return 0;",
    "}",
])
SLOW_MAX = "\n".join([
    "#include <cstdio>",
    "#include <unistd.h>",
    "int main() {",
    "  int a, b;",
    '  scanf("%d %d", &a, &b);',
    "  usleep(120000);",
    "  int best = a;",
    "  if (b > best) {",
    "    best = b;",
    "  }",
    '  printf("%d\\n", best);',
    "  return 0;",
    "}",
])
FAST_MAX = "\n".join([
    "#include <cstdio>",
    "int main() {",
    "  int a, b;",
    '  scanf("%d %d", &a, &b);',
    '  printf("%d\\n", a > b ? a : b);',
    "  return 0;",
    "}",
])
SLOW_PARITY = "\n".join([
    "#include <cstdio>",
    "#include <unistd.h>",
    "int main() {",
    "  int n;",
    '  scanf("%d", &n);',
    "  usleep(120000);",
    "  int odd = n % 2;",
    "  if (odd) {",
    '    printf("odd\\n");',
    "  } else {",
    '    printf("even\\n");',
    "  }",
    "  return 0;",
    "}",
])
FAST_PARITY = "\n".join([
    "#include <cstdio>",
    "int main() {",
    "  int n;",
    '  scanf("%d", &n);',
    '  printf(n % 2 ? "odd\\n" : "even\\n");',
    "  return 0;",
    "}",
])
PRETRAIN_COUNT = "\n".join([
    "#include <cstdio>",
    "int main() {",
    "  int n;",
    '  scanf("%d", &n);',
    "  int hits = 0;",
    "  for (int i = 0; i < n; i++) {",
    "    hits += i % 3 == 0;",
    "  }",
    '  printf("%d\\n", hits);',
    "  return 0;",
    "}",
])
PRETRAIN_ECHO = "\n".join([
    "#include <cstdio>",
    "int main() {",
    "  int x;",
    '  scanf("%d", &x);',
    "  if (x < 0) {",
    "    x = -x;",
    "  }",
    '  printf("%d\\n", x);',
    "  return 0;",
    "}",
])

PROGRAMS = [
    ("slow_sum", "q_sum", "train", SLOW_SUM),
    ("fast_sum", "q_sum", "train", FAST_SUM),
    ("slow_max", "q_max", "train", SLOW_MAX),
    ("fast_max", "q_max", "train", FAST_MAX),
    ("slow_parity", "q_parity", "test", SLOW_PARITY),
    ("fast_parity", "q_parity", "test", FAST_PARITY),
    ("pre_count", "q_count", "train", PRETRAIN_COUNT),
    ("pre_echo", "q_echo", "train", PRETRAIN_ECHO),
]
TESTS = [
    ("q_sum", "c1", "10\n", "55\n"),
    ("q_sum", "c2", "100\n", "5050\n"),
    ("q_max", "c1", "3 9\n", "9\n"),
    ("q_parity", "c1", "7\n", "odd\n"),
    ("q_count", "c1", "10\n", "4\n"),
    ("q_echo", "c1", "-5\n", "5\n"),
]
PAIRS = [
    ("slow_sum", "fast_sum"),
    ("slow_max", "fast_max"),
    ("slow_parity", "fast_parity"),
]


def write_corpus(root: Path) -> Corpus:
    root.mkdir(parents=True, exist_ok=True)
    with open(root / "programs.jsonl", "w", encoding="utf-8") as fh:
        for program_id, problem_id, split, text in PROGRAMS:
            fh.write(json.dumps({
                "program_id": program_id, "problem_id": problem_id,
                "split": split, "text": text,
            }) + "\n")
    with open(root / "tests.jsonl", "w", encoding="utf-8") as fh:
        for problem_id, case_id, stdin, expected in TESTS:
            fh.write(json.dumps({
                "problem_id": problem_id, "case_id": case_id,
                "stdin": stdin, "expected_stdout": expected,
            }) + "\n")
    with open(root / "pairs.jsonl", "w", encoding="utf-8") as fh:
        for slow, fast in PAIRS:
            fh.write(json.dumps({"slow": slow, "fast": fast}) + "\n")
    return load_corpus(root)


def hand_trace(program: SourceProgram, case_id: str) -> ExecutionTrace:
    """A plausible single-pass trace: every non-preprocessor, non-brace
    line once, in order, with loop headers/bodies repeated three times."""
    steps: list[TraceStep] = []
    loop_depth = 0
    for line_no, line in enumerate(program.lines, 1):
        code = line.strip()
        if not code or code.startswith("#") or set(code) <= {"{", "}"}:
            if code.startswith("}") and loop_depth:
                loop_depth -= 1
            continue
        repeats = 3 if code.startswith("for") or loop_depth else 1
        if code.startswith("for"):
            loop_depth += 1
        variables = (VariableSnapshot("n", "int", str(line_no)),)
        steps.extend(TraceStep(line_no, variables) for _ in range(repeats))
    return ExecutionTrace(
        program.program_id, case_id, tuple(steps), TraceStatus.COMPLETE, 0.01)


def write_hand_traces(corpus: Corpus, trace_dir: Path, programs: list[str] | None = None):
    trace_dir.mkdir(parents=True, exist_ok=True)
    wanted = set(programs) if programs else None
    for program in corpus.programs.values():
        if wanted is not None and program.program_id not in wanted:
            continue
        for test in corpus.tests_for(program):
            trace = hand_trace(program, test.case_id)
            path = trace_dir / f"{program.program_id}__{test.case_id}.trace"
            path.write_text(serialize_trace(trace), encoding="utf-8")
