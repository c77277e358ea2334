"""Compilation, execution, timing backends, and output judging.

Two timing backends ship: a wall-clock backend (R repetitions, minimum
taken) for self-contained runs, and a driver for an external
deterministic simulator. Metric code never sees which one produced the
numbers.

Simulator adapter contract: the command is invoked as
``<simulator_cmd...> <binary>`` with the test input on stdin; the
program's stdout passes through, the simulator's exit code mirrors the
program's, and the last stderr line matching ``simulated_seconds <float>``
carries the time.
"""

from __future__ import annotations

import re
import shutil
import subprocess
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Protocol, Sequence

from ..errors import BackendUnavailable, CompileError, ToolchainMissing
from ..trace.model import SourceProgram, TestCase


class RunStatus(str, Enum):
    OK = "ok"
    RUNTIME_ERROR = "runtime_error"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class RunOutcome:
    compile_ok: bool
    run_status: RunStatus = RunStatus.RUNTIME_ERROR
    stdout: str = ""
    time: float = 0.0

    @property
    def ok(self) -> bool:
        return self.compile_ok and self.run_status is RunStatus.OK


COMPILE_FAILED_OUTCOME = RunOutcome(compile_ok=False)


@dataclass(frozen=True)
class CompilerConfig:
    cmd: str = "g++"
    flags: tuple[str, ...] = ("-O2", "-std=c++17")


def compile_program(program: SourceProgram, cfg: CompilerConfig, workdir: Path) -> Path:
    """Compile to a runnable artifact; CompileError carries diagnostics."""
    if shutil.which(cfg.cmd) is None:
        raise ToolchainMissing(f"compiler {cfg.cmd!r} not found")
    source = workdir / f"{program.program_id}.cpp"
    source.write_text(program.text + "\n", encoding="utf-8")
    binary = workdir / program.program_id
    proc = subprocess.run(
        [cfg.cmd, *cfg.flags, str(source), "-o", str(binary)],
        capture_output=True, text=True,
    )
    if proc.returncode != 0:
        raise CompileError(proc.stderr.strip() or f"compiler exited {proc.returncode}")
    return binary


class TimingBackend(Protocol):
    name: str

    def run(self, binary: Path, stdin_text: str, timeout: float) -> RunOutcome: ...


def _run_once(argv: Sequence[str], stdin_text: str, timeout: float) -> RunOutcome:
    start = time.monotonic()
    try:
        proc = subprocess.run(
            list(argv), input=stdin_text.encode("utf-8"),
            capture_output=True, timeout=timeout,
        )
    except subprocess.TimeoutExpired:
        return RunOutcome(True, RunStatus.TIMEOUT, "", timeout)
    elapsed = time.monotonic() - start
    stdout = proc.stdout.decode("utf-8", errors="replace")
    if proc.returncode != 0:
        return RunOutcome(True, RunStatus.RUNTIME_ERROR, stdout, elapsed)
    return RunOutcome(True, RunStatus.OK, stdout, elapsed)


class WallClockBackend:
    """Minimum wall time over R repetitions of the same run."""

    def __init__(self, reps: int = 3):
        if reps < 1:
            raise ValueError("reps must be >= 1")
        self.reps = reps
        self.name = f"wallclock(reps={reps})"

    def run(self, binary: Path, stdin_text: str, timeout: float) -> RunOutcome:
        best: RunOutcome | None = None
        for _ in range(self.reps):
            outcome = _run_once([str(binary)], stdin_text, timeout)
            if outcome.run_status is not RunStatus.OK:
                return outcome
            if best is None or outcome.time < best.time:
                best = outcome
        assert best is not None
        return best


_SIM_SECONDS = re.compile(r"^simulated_seconds\s+([0-9.eE+-]+)\s*$")


class SimulatorBackend:
    """Adapter for an external deterministic simulator (see module doc)."""

    def __init__(self, simulator_cmd: Sequence[str]):
        if not simulator_cmd:
            raise BackendUnavailable("empty simulator command")
        self.simulator_cmd = tuple(simulator_cmd)
        self.name = f"simulator:{' '.join(simulator_cmd)}"

    def run(self, binary: Path, stdin_text: str, timeout: float) -> RunOutcome:
        if shutil.which(self.simulator_cmd[0]) is None \
                and not Path(self.simulator_cmd[0]).exists():
            raise BackendUnavailable(f"simulator {self.simulator_cmd[0]!r} not found")
        try:
            proc = subprocess.run(
                [*self.simulator_cmd, str(binary)],
                input=stdin_text.encode("utf-8"),
                capture_output=True, timeout=timeout,
            )
        except subprocess.TimeoutExpired:
            return RunOutcome(True, RunStatus.TIMEOUT, "", timeout)
        stdout = proc.stdout.decode("utf-8", errors="replace")
        if proc.returncode != 0:
            return RunOutcome(True, RunStatus.RUNTIME_ERROR, stdout, 0.0)
        simulated = None
        for line in proc.stderr.decode("utf-8", errors="replace").splitlines():
            match = _SIM_SECONDS.match(line.strip())
            if match:
                simulated = float(match.group(1))
        if simulated is None:
            raise BackendUnavailable("simulator reported no simulated_seconds line")
        return RunOutcome(True, RunStatus.OK, stdout, simulated)


def execute(binary: Path, test: TestCase, backend: TimingBackend,
            timeout: float = 10.0) -> RunOutcome:
    """Run one artifact on one test case through the timing backend."""
    return backend.run(binary, test.stdin, timeout)


def judge_output(actual: str, expected: str) -> bool:
    """Equality modulo line endings, per-line trailing whitespace, and
    trailing blank lines (competitive-judge convention)."""
    return _normalize(actual) == _normalize(expected)


def _normalize(text: str) -> list[str]:
    lines = [line.rstrip() for line in text.replace("\r\n", "\n").replace("\r", "\n").split("\n")]
    while lines and lines[-1] == "":
        lines.pop()
    return lines
