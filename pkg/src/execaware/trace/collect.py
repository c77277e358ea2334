"""Trace collection: compile a program, drive the debugger adapter, and
assemble an ExecutionTrace.

Each call manages one child process and is safe to run from a bounded
worker pool; calls share nothing.
"""

from __future__ import annotations

import os
import shutil
import subprocess
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

from ..errors import AdapterUnavailable, CompileFailed, MalformedTrace
from .model import (
    ExecutionTrace,
    SourceProgram,
    TestCase,
    TraceStatus,
    TraceStep,
    VariableSnapshot,
    _unescape,
    parse_trace,
)

_GDB_SCRIPT = Path(__file__).with_name("_gdb_script.py")


@dataclass(frozen=True)
class TracerConfig:
    """Knobs for collect_trace; the 500 s cap is the corpus default."""

    time_cap: float = 500.0
    grace: float = 5.0
    gdb_cmd: str = "gdb"
    adapter_cmd: tuple[str, ...] | None = None
    compiler_cmd: str = "g++"
    compile_flags: tuple[str, ...] = ("-g", "-O0")

    def __post_init__(self):
        if self.time_cap <= 0 or self.grace <= 0:
            raise ValueError("time_cap and grace must be positive")


def _compile_for_tracing(program: SourceProgram, cfg: TracerConfig, workdir: Path) -> Path:
    if shutil.which(cfg.compiler_cmd) is None:
        raise CompileFailed(f"compiler {cfg.compiler_cmd!r} not found")
    source = workdir / "program.cpp"
    source.write_text(program.text + "\n", encoding="utf-8")
    binary = workdir / "program"
    proc = subprocess.run(
        [cfg.compiler_cmd, *cfg.compile_flags, str(source), "-o", str(binary)],
        capture_output=True,
        text=True,
    )
    if proc.returncode != 0:
        raise CompileFailed(proc.stderr.strip() or f"compiler exited {proc.returncode}")
    return binary


def _parse_adapter_records(text: str) -> tuple[list[TraceStep], str | None]:
    """Parse step/var records plus the optional ``end <status>`` trailer."""
    steps: list[TraceStep] = []
    pending_line: int | None = None
    pending_vars: list[VariableSnapshot] = []
    trailer: str | None = None

    def flush():
        if pending_line is not None:
            steps.append(TraceStep(pending_line, tuple(pending_vars)))

    for record in text.splitlines():
        if record.startswith("step "):
            flush()
            pending_vars = []
            pending_line = int(record[5:])
        elif record.startswith("var ") and pending_line is not None:
            fields = record[4:].split("\t")
            if len(fields) == 3:
                name, type_text, value = (_unescape(f) for f in fields)
                if name:
                    pending_vars.append(VariableSnapshot(name, type_text, value))
        elif record.startswith("end "):
            trailer = record[4:].strip()
    flush()
    return steps, trailer


def _run_gdb_adapter(binary: Path, stdin_file: Path, source_name: str,
                     cfg: TracerConfig, workdir: Path) -> tuple[list[TraceStep], TraceStatus]:
    if shutil.which(cfg.gdb_cmd) is None:
        raise AdapterUnavailable(f"debugger {cfg.gdb_cmd!r} not found")
    out_path = workdir / "records.txt"
    pkg_path = str(Path(__file__).resolve().parents[2])
    env = dict(os.environ)
    env.update(
        EXECAWARE_TRACE_SOURCE=source_name,
        EXECAWARE_TRACE_OUT=str(out_path),
        EXECAWARE_TRACE_STDIN=str(stdin_file),
        EXECAWARE_TRACE_CAP=str(cfg.time_cap),
        EXECAWARE_PKG_PATH=pkg_path,
    )
    killed = False
    try:
        subprocess.run(
            [cfg.gdb_cmd, "--batch", "--nx", "-x", str(_GDB_SCRIPT), str(binary)],
            capture_output=True,
            timeout=cfg.time_cap + cfg.grace,
            env=env,
        )
    except subprocess.TimeoutExpired:
        killed = True

    if not out_path.exists():
        if killed:
            return [], TraceStatus.TIMEOUT
        raise AdapterUnavailable("debugger produced no trace records")
    steps, trailer = _parse_adapter_records(out_path.read_text(encoding="utf-8"))
    if killed or trailer == "timeout":
        return steps, TraceStatus.TIMEOUT
    if trailer == "complete" and steps:
        return steps, TraceStatus.COMPLETE
    return steps, TraceStatus.CRASHED


def collect_trace(program: SourceProgram, test: TestCase,
                  cfg: TracerConfig = TracerConfig()) -> ExecutionTrace:
    """Trace one program on one test case through the debugger adapter.

    Returns a trace with status complete, or timeout once cfg.time_cap is
    reached, or crashed on unexpected interruption (nonzero exit, signal).
    The call never outlives time_cap plus the teardown grace period.
    """
    with tempfile.TemporaryDirectory(prefix="execaware-trace-") as td:
        workdir = Path(td)
        binary = _compile_for_tracing(program, cfg, workdir)
        stdin_file = workdir / "stdin.txt"
        stdin_file.write_text(test.stdin, encoding="utf-8")

        start = time.monotonic()
        if cfg.adapter_cmd is not None:
            trace = _run_external_adapter(program, test, binary, stdin_file, cfg)
        else:
            steps, status = _run_gdb_adapter(binary, stdin_file, "program.cpp", cfg, workdir)
            steps = [s for s in steps if s.line_no <= len(program)]
            if status is TraceStatus.COMPLETE and not steps:
                status = TraceStatus.CRASHED
            trace = ExecutionTrace(
                program.program_id, test.case_id, tuple(steps), status,
                wall_time=time.monotonic() - start,
            )
        return trace


def _run_external_adapter(program: SourceProgram, test: TestCase, binary: Path,
                          stdin_file: Path, cfg: TracerConfig) -> ExecutionTrace:
    """Run a user-supplied adapter command.

    Contract: ``cmd <binary> <stdin_file> <time_cap> <program_id> <case_id>``
    emits a full trace document on stdout.
    """
    cmd = cfg.adapter_cmd[0]
    if shutil.which(cmd) is None and not Path(cmd).exists():
        raise AdapterUnavailable(f"adapter {cmd!r} not found")
    try:
        proc = subprocess.run(
            [*cfg.adapter_cmd, str(binary), str(stdin_file), str(cfg.time_cap),
             program.program_id, test.case_id],
            capture_output=True,
            text=True,
            timeout=cfg.time_cap + cfg.grace,
        )
    except subprocess.TimeoutExpired:
        return ExecutionTrace(program.program_id, test.case_id, (),
                              TraceStatus.TIMEOUT, wall_time=cfg.time_cap + cfg.grace)
    try:
        return parse_trace(proc.stdout, line_count=len(program))
    except MalformedTrace as exc:
        raise AdapterUnavailable(f"adapter emitted a malformed trace: {exc}") from exc
