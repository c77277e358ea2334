"""Corpus manifest: three JSONL files under the corpus root.

    programs.jsonl  {"program_id", "problem_id", "split", "text"}
    tests.jsonl     {"problem_id", "case_id", "stdin", "expected_stdout"}
    pairs.jsonl     {"slow", "fast", "pair_id"?}

Programs not referenced by any pair form the pre-training side; pair
programs are the fine-tuning side. Problems sharing a split is enforced
at load time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .trace.model import SourceProgram, Split, TestCase


@dataclass(frozen=True)
class Pair:
    pair_id: str
    slow_id: str
    fast_id: str


@dataclass
class Corpus:
    programs: dict[str, SourceProgram] = field(default_factory=dict)
    tests: dict[str, list[TestCase]] = field(default_factory=dict)  # keyed by problem_id
    pairs: list[Pair] = field(default_factory=list)

    def tests_for(self, program: SourceProgram) -> list[TestCase]:
        return self.tests.get(program.problem_id, [])

    def pair_program_ids(self) -> set[str]:
        ids: set[str] = set()
        for pair in self.pairs:
            ids.add(pair.slow_id)
            ids.add(pair.fast_id)
        return ids

    def pretrain_programs(self) -> list[SourceProgram]:
        """Programs outside every slow/fast pair, in manifest order."""
        excluded = self.pair_program_ids()
        return [p for p in self.programs.values() if p.program_id not in excluded]


def _read_jsonl(path: Path) -> list[dict]:
    records = []
    if not path.exists():
        return records
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
    return records


def load_corpus(root: str | Path) -> Corpus:
    root = Path(root)
    corpus = Corpus()
    split_by_problem: dict[str, Split] = {}

    for record in _read_jsonl(root / "programs.jsonl"):
        program = SourceProgram.from_text(
            record["program_id"], record["problem_id"], record["text"],
            Split(record.get("split", "train")),
        )
        if program.program_id in corpus.programs:
            raise ValueError(f"duplicate program_id {program.program_id!r}")
        seen_split = split_by_problem.get(program.problem_id)
        if seen_split is not None and seen_split is not program.split:
            raise ValueError(
                f"problem {program.problem_id!r} spans splits "
                f"{seen_split.value} and {program.split.value}")
        split_by_problem[program.problem_id] = program.split
        corpus.programs[program.program_id] = program

    for record in _read_jsonl(root / "tests.jsonl"):
        corpus.tests.setdefault(record["problem_id"], []).append(
            TestCase(record["case_id"], record["stdin"], record["expected_stdout"]))

    for record in _read_jsonl(root / "pairs.jsonl"):
        slow_id, fast_id = record["slow"], record["fast"]
        for program_id in (slow_id, fast_id):
            if program_id not in corpus.programs:
                raise ValueError(f"pair references unknown program {program_id!r}")
        corpus.pairs.append(
            Pair(record.get("pair_id") or f"{slow_id}--{fast_id}", slow_id, fast_id))

    return corpus
