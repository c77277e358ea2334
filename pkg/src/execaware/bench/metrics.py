"""Pair evaluation records and corpus-level metrics.

Speedup is the per-case mean of time ratios, clamped to 1 for incorrect
or slower generations; a pair counts as optimized at a speedup of at
least 1.1. The compiled/executed/correct funnel is monotone by
construction.
"""

from __future__ import annotations

import json
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from ..errors import (
    CompileError,
    EmptyInput,
    MismatchedCases,
    NonPositiveTime,
    ToolchainMissing,
)
from ..trace.model import SourceProgram, TestCase
from .runner import (
    COMPILE_FAILED_OUTCOME,
    CompilerConfig,
    RunOutcome,
    RunStatus,
    TimingBackend,
    compile_program,
    execute,
    judge_output,
)

OPTIMIZED_SPEEDUP = 1.1
NON_NEGLIGIBLE_SPEEDUP = 1.01


@dataclass(frozen=True)
class EvalRecord:
    pair_id: str
    input_program_id: str
    generated_program_id: str
    input_outcomes: tuple[RunOutcome, ...]
    generated_outcomes: tuple[RunOutcome, ...]
    correct: bool
    speedup: float

    @property
    def compiled(self) -> bool:
        return bool(self.generated_outcomes) and all(
            o.compile_ok for o in self.generated_outcomes)

    @property
    def executed(self) -> bool:
        return self.compiled and all(
            o.run_status is RunStatus.OK for o in self.generated_outcomes)

    @property
    def optimized(self) -> bool:
        return self.correct and self.speedup >= OPTIMIZED_SPEEDUP

    def to_json(self) -> str:
        def outcome(o: RunOutcome) -> dict:
            return {"compile_ok": o.compile_ok, "run_status": o.run_status.value,
                    "stdout": o.stdout, "time": o.time}
        return json.dumps({
            "pair_id": self.pair_id,
            "input_program_id": self.input_program_id,
            "generated_program_id": self.generated_program_id,
            "input_outcomes": [outcome(o) for o in self.input_outcomes],
            "generated_outcomes": [outcome(o) for o in self.generated_outcomes],
            "correct": self.correct,
            "speedup": self.speedup,
            "optimized": self.optimized,
        }, ensure_ascii=False, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "EvalRecord":
        record = json.loads(line)

        def outcome(data: dict) -> RunOutcome:
            return RunOutcome(data["compile_ok"], RunStatus(data["run_status"]),
                              data["stdout"], data["time"])
        return cls(
            pair_id=record["pair_id"],
            input_program_id=record["input_program_id"],
            generated_program_id=record["generated_program_id"],
            input_outcomes=tuple(outcome(o) for o in record["input_outcomes"]),
            generated_outcomes=tuple(outcome(o) for o in record["generated_outcomes"]),
            correct=record["correct"],
            speedup=record["speedup"],
        )


def program_speedup(input_times: Sequence[float], gen_times: Sequence[float],
                    correct: bool) -> float:
    """Mean per-case time ratio, clamped to 1 when incorrect or slower."""
    if not correct:
        return 1.0
    if not input_times or len(input_times) != len(gen_times):
        raise MismatchedCases(
            f"{len(input_times)} input times vs {len(gen_times)} generated times")
    if any(t <= 0 for t in input_times) or any(t <= 0 for t in gen_times):
        raise NonPositiveTime("execution times must be positive")
    ratio_sum = sum(ti / tg for ti, tg in zip(input_times, gen_times))
    return max(1.0, ratio_sum / len(input_times))


@dataclass(frozen=True)
class MetricsReport:
    n: int
    correct_pct: float
    mean_speedup: float
    opt_pct: float
    compiled_pct: float
    executed_pct: float
    n_correct: int
    mean_speedup_correct: float | None
    n_optimized_gt1pct: int
    mean_speedup_optimized: float | None
    backend: str | None = None

    def to_json(self) -> str:
        return json.dumps(self.__dict__, ensure_ascii=False, sort_keys=True, indent=2)

    def to_table(self) -> str:
        def pct(v: float) -> str:
            return f"{v:.2f}%"

        def mean(v: float | None) -> str:
            return "-" if v is None else f"{v:.2f}x"
        rows = [
            ("Pairs", str(self.n)),
            ("Compiled", pct(self.compiled_pct)),
            ("Executed", pct(self.executed_pct)),
            ("Correct", pct(self.correct_pct)),
            ("Speedup (mean)", f"{self.mean_speedup:.4f}x"),
            ("%Opt (speedup >= 1.1)", pct(self.opt_pct)),
            ("Correct programs", f"{self.n_correct} (mean {mean(self.mean_speedup_correct)})"),
            ("Optimized > 1%", f"{self.n_optimized_gt1pct} "
                               f"(mean {mean(self.mean_speedup_optimized)})"),
        ]
        width = max(len(label) for label, _ in rows)
        return "\n".join(f"{label.ljust(width)}  {value}" for label, value in rows)


def aggregate(records: Sequence[EvalRecord],
              funnel: Sequence[tuple[bool, bool]] | None = None,
              backend: str | None = None) -> MetricsReport:
    """Corpus-level metrics over evaluation records.

    The funnel is derived from each record's outcomes unless explicit
    (compiled, executed) flags are supplied; correctness is always
    counted inside the executed set so the funnel stays monotone.
    """
    if not records:
        raise EmptyInput("no evaluation records")
    if funnel is None:
        funnel = [(r.compiled, r.executed) for r in records]
    if len(funnel) != len(records):
        raise MismatchedCases("funnel length differs from record count")

    n = len(records)
    compiled = sum(1 for c, _ in funnel if c)
    executed = sum(1 for c, e in funnel if c and e)
    correct_flags = [bool(c and e and r.correct)
                     for (c, e), r in zip(funnel, records)]
    n_correct = sum(correct_flags)
    speedups = [r.speedup if good else 1.0
                for good, r in zip(correct_flags, records)]
    n_opt = sum(1 for good, s in zip(correct_flags, speedups)
                if good and s >= OPTIMIZED_SPEEDUP)

    correct_speedups = [s for good, s in zip(correct_flags, speedups) if good]
    gt1pct_speedups = [s for s in speedups if s > NON_NEGLIGIBLE_SPEEDUP]
    return MetricsReport(
        n=n,
        correct_pct=100.0 * n_correct / n,
        mean_speedup=sum(speedups) / n,
        opt_pct=100.0 * n_opt / n,
        compiled_pct=100.0 * compiled / n,
        executed_pct=100.0 * executed / n,
        n_correct=n_correct,
        mean_speedup_correct=(sum(correct_speedups) / len(correct_speedups)
                              if correct_speedups else None),
        n_optimized_gt1pct=len(gt1pct_speedups),
        mean_speedup_optimized=(sum(gt1pct_speedups) / len(gt1pct_speedups)
                                if gt1pct_speedups else None),
        backend=backend,
    )


def evaluate_pair(pair_id: str, input_program: SourceProgram,
                  generated_program: SourceProgram, tests: Sequence[TestCase],
                  compiler: CompilerConfig, backend: TimingBackend,
                  case_timeout: float = 10.0) -> EvalRecord:
    """Full compile/run/judge funnel for one slow/generated pair."""
    if not tests:
        raise EmptyInput("no test cases for pair " + pair_id)
    with tempfile.TemporaryDirectory(prefix="execaware-eval-") as td:
        workdir = Path(td)
        try:
            input_binary = compile_program(input_program, compiler, workdir)
        except CompileError as exc:
            raise ToolchainMissing(
                f"input program {input_program.program_id} does not compile: {exc}") from exc
        input_outcomes = tuple(
            execute(input_binary, test, backend, case_timeout) for test in tests)

        try:
            generated_binary = compile_program(generated_program, compiler, workdir)
        except CompileError:
            return EvalRecord(
                pair_id=pair_id,
                input_program_id=input_program.program_id,
                generated_program_id=generated_program.program_id,
                input_outcomes=input_outcomes,
                generated_outcomes=(COMPILE_FAILED_OUTCOME,),
                correct=False,
                speedup=1.0,
            )
        generated_outcomes = tuple(
            execute(generated_binary, test, backend, case_timeout) for test in tests)

    correct = all(
        outcome.ok and judge_output(outcome.stdout, test.expected_stdout)
        for outcome, test in zip(generated_outcomes, tests))
    timable = correct and all(
        o.ok and o.time > 0 for o in input_outcomes) and all(
        o.time > 0 for o in generated_outcomes)
    if timable:
        speedup = program_speedup(
            [o.time for o in input_outcomes],
            [o.time for o in generated_outcomes],
            correct=True,
        )
    else:
        speedup = 1.0
    return EvalRecord(
        pair_id=pair_id,
        input_program_id=input_program.program_id,
        generated_program_id=generated_program.program_id,
        input_outcomes=input_outcomes,
        generated_outcomes=generated_outcomes,
        correct=correct,
        speedup=speedup,
    )
