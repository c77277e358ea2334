"""Dataset and candidate file formats: one JSON object per line, UTF-8,
canonical key order so emitted records re-parse byte-identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable

from ..trace.model import Split


class Task(str, Enum):
    CLASSIFY = "classify"
    OPTIMIZE = "optimize"
    MLM = "mlm"


class Strategy(str, Enum):
    BL = "BL"
    S1 = "S1"
    S2 = "S2"
    S3 = "S3"


class Aspect(str, Enum):
    LE = "LE"
    LC = "LC"
    BC = "BC"
    VS = "VS"


_TASK_PREFIX = {Task.CLASSIFY: "classify: ", Task.OPTIMIZE: "optimize: ", Task.MLM: "mlm: "}


@dataclass(frozen=True)
class InstanceMeta:
    program_id: str
    problem_id: str
    split: Split
    strategy: Strategy
    case_id: str | None = None
    aspect: Aspect | None = None
    token_counter: str | None = None


@dataclass(frozen=True)
class DatasetInstance:
    instance_id: str
    task: Task
    source: str
    target: str
    meta: InstanceMeta

    def __post_init__(self):
        prefix = _TASK_PREFIX[self.task]
        if not self.source.startswith(prefix):
            raise ValueError(f"{self.task.value} source must start with {prefix!r}")


def instance_to_json(instance: DatasetInstance) -> str:
    meta = {
        "program_id": instance.meta.program_id,
        "problem_id": instance.meta.problem_id,
        "split": instance.meta.split.value,
        "strategy": instance.meta.strategy.value,
        "case_id": instance.meta.case_id,
        "aspect": instance.meta.aspect.value if instance.meta.aspect else None,
        "token_counter": instance.meta.token_counter,
    }
    record = {
        "id": instance.instance_id,
        "task": instance.task.value,
        "source": instance.source,
        "target": instance.target,
        "meta": meta,
    }
    return json.dumps(record, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def instance_from_json(line: str) -> DatasetInstance:
    record = json.loads(line)
    meta = record["meta"]
    return DatasetInstance(
        instance_id=record["id"],
        task=Task(record["task"]),
        source=record["source"],
        target=record["target"],
        meta=InstanceMeta(
            program_id=meta["program_id"],
            problem_id=meta["problem_id"],
            split=Split(meta["split"]),
            strategy=Strategy(meta["strategy"]),
            case_id=meta.get("case_id"),
            aspect=Aspect(meta["aspect"]) if meta.get("aspect") else None,
            token_counter=meta.get("token_counter"),
        ),
    )


def write_instances(path: str | Path, instances: Iterable[DatasetInstance]):
    with open(path, "w", encoding="utf-8") as fh:
        for instance in instances:
            fh.write(instance_to_json(instance) + "\n")


def read_instances(path: str | Path) -> list[DatasetInstance]:
    instances = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                instances.append(instance_from_json(line))
    return instances


@dataclass(frozen=True)
class CandidateRecord:
    """An evaluation input: a dataset record plus the model's output."""

    pair_id: str
    program_id: str
    problem_id: str
    strategy: Strategy
    generated: str

    def to_json(self) -> str:
        return json.dumps(
            {
                "id": self.pair_id,
                "meta": {
                    "program_id": self.program_id,
                    "problem_id": self.problem_id,
                    "strategy": self.strategy.value,
                },
                "generated": self.generated,
            },
            ensure_ascii=False, sort_keys=True, separators=(",", ":"),
        )

    @classmethod
    def from_json(cls, line: str) -> "CandidateRecord":
        record = json.loads(line)
        meta = record["meta"]
        return cls(
            pair_id=record["id"],
            program_id=meta["program_id"],
            problem_id=meta["problem_id"],
            strategy=Strategy(meta.get("strategy", "BL")),
            generated=record["generated"],
        )


def write_candidates(path: str | Path, candidates: Iterable[CandidateRecord]):
    with open(path, "w", encoding="utf-8") as fh:
        for candidate in candidates:
            fh.write(candidate.to_json() + "\n")


def read_candidates(path: str | Path) -> list[CandidateRecord]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(CandidateRecord.from_json(line))
    return out
