"""Pipeline configuration: key = value file, EXECAWARE_* environment
overrides, then command-line flags, in increasing precedence. Every
default is printable via ``execaware config show``.
"""

from __future__ import annotations

import os
import shlex
from dataclasses import dataclass, fields
from pathlib import Path

ENV_PREFIX = "EXECAWARE_CFG_"


@dataclass
class PipelineConfig:
    corpus_root: str = "corpus"
    trace_dir: str = "traces"
    dataset_dir: str = "datasets"
    report_dir: str = "reports"
    # tracing
    time_cap: float = 500.0
    grace: float = 5.0
    adapter_cmd: str = ""
    gdb_cmd: str = "gdb"
    trace_compiler_flags: str = "-g -O0"
    # quantization
    scheme_file: str = ""
    # dataset
    token_limit: int = 512
    mask_rate: float = 0.15
    per_problem_cap: int = 150
    seed: int = 0
    formatter_cmd: str = ""
    tokenizer_adapter: str = ""
    # benchmarking
    compiler_cmd: str = "g++"
    compile_flags: str = "-O2 -std=c++17"
    backend: str = "wallclock"
    simulator_cmd: str = ""
    reps: int = 3
    case_timeout_s: float = 10.0
    jobs: int = 0  # 0 = logical CPU count

    def __post_init__(self):
        for name in ("time_cap", "grace", "token_limit", "mask_rate",
                     "per_problem_cap", "reps", "case_timeout_s"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.backend not in ("wallclock", "simulator"):
            raise ValueError("backend must be wallclock or simulator")
        if self.jobs < 0:
            raise ValueError("jobs cannot be negative")

    def command(self, key: str) -> tuple[str, ...] | None:
        value = getattr(self, key).strip()
        return tuple(shlex.split(value)) if value else None

    def flag_list(self, key: str) -> tuple[str, ...]:
        return tuple(shlex.split(getattr(self, key)))

    def effective_jobs(self) -> int:
        return self.jobs or os.cpu_count() or 1

    def show(self) -> str:
        return "\n".join(
            f"{f.name} = {getattr(self, f.name)}" for f in fields(self))


def _coerce(name: str, text: str, target_type: type):
    if target_type is int:
        return int(text)
    if target_type is float:
        return float(text)
    return text


def load_config(path: str | Path | None = None,
                overrides: dict[str, str] | None = None) -> PipelineConfig:
    field_types = {f.name: f.type for f in fields(PipelineConfig)}
    type_map = {"int": int, "float": float, "str": str}
    values: dict[str, object] = {}

    def apply(name: str, text: str, origin: str):
        if name not in field_types:
            raise ValueError(f"{origin}: unknown config key {name!r}")
        values[name] = _coerce(name, text, type_map.get(str(field_types[name]), str))

    if path is not None:
        for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, _, value = line.partition("=")
            apply(key.strip(), value.strip(), f"{path}:{lineno}")

    for name in field_types:
        env_value = os.environ.get(ENV_PREFIX + name.upper())
        if env_value is not None:
            apply(name, env_value, f"env {ENV_PREFIX + name.upper()}")

    for name, text in (overrides or {}).items():
        apply(name, text, "command line")

    return PipelineConfig(**values)
