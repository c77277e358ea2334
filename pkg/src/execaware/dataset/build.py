"""Construction of training/evaluation instances for the baseline and
the three execution-aware strategies, plus the corpus policies around
them: canonicalization, token-limit filtering, per-problem sampling, and
split hygiene.
"""

from __future__ import annotations

import hashlib
import random
import re
import shutil
import subprocess
from dataclasses import dataclass, field
from typing import Callable, Sequence

from ..aspects import LineAspects, merge_le_across_traces, count_line_executions
from ..errors import (
    AspectMismatch,
    EmptyProgram,
    FormatterFailed,
    FormatterUnavailable,
    NoCompleteTraces,
    ProblemMismatch,
)
from ..quantize import (
    DEFAULT_SCHEME,
    QuantizationScheme,
    quantize_bc,
    quantize_lc,
    quantize_le,
    quantize_variable,
)
from ..trace.model import ExecutionTrace, SourceProgram, TestCase
from .io import Aspect, DatasetInstance, InstanceMeta, Strategy, Task
from .tokens import TokenCounter, split_tokens

SEP = "<SEP>"
MASK_FORMAT = "<mask_{}>"
_MASK_RE = re.compile(r"^<mask_(\d+)>$")
_ANNOTATION_RE = re.compile(r" // <(?:e|e\+|E|E\+|BC|BNC)>$")
_VS_COMMENT_RE = re.compile(r"^// \S+ (?:basic_type|class) \S+$")


def derive_seed(seed: int, *parts: str) -> int:
    """Stable per-item seed derived from the run seed and identity parts."""
    digest = hashlib.sha256((f"{seed}:" + ":".join(parts)).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


# --- canonicalization ---

def strip_comments(text: str) -> str:
    """Remove // and /* */ comments, respecting string and char literals."""
    out: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if text.startswith("/*", i):
            end = text.find("*/", i + 2)
            i = n if end < 0 else end + 2
            continue
        if ch in ('"', "'"):
            out.append(ch)
            i += 1
            while i < n:
                out.append(text[i])
                if text[i] == "\\" and i + 1 < n:
                    out.append(text[i + 1])
                    i += 2
                    continue
                if text[i] == ch:
                    i += 1
                    break
                i += 1
            continue
        out.append(ch)
        i += 1
    return "".join(out)


def canonicalize(program: SourceProgram,
                 formatter_cmd: Sequence[str] | None = None) -> SourceProgram:
    """Comment-free, layout-normalized form of a program.

    Comments are stripped built-in; layout normalization is delegated to
    the configured external formatter (stdin -> stdout), when given. The
    token stream (modulo comments/whitespace) must survive unchanged or
    the formatter run is rejected.
    """
    text = strip_comments(program.text)
    if formatter_cmd:
        if shutil.which(formatter_cmd[0]) is None:
            raise FormatterUnavailable(f"formatter {formatter_cmd[0]!r} not found")
        proc = subprocess.run(
            list(formatter_cmd), input=text, capture_output=True, text=True,
        )
        if proc.returncode != 0:
            raise FormatterFailed(proc.stderr.strip() or f"exit {proc.returncode}")
        if split_tokens(proc.stdout) != split_tokens(text):
            raise FormatterFailed("formatter altered the token stream")
        text = proc.stdout
    lines = tuple(line.rstrip() for line in text.split("\n"))
    lines = tuple(line for line in lines if line) or ("",)
    return SourceProgram(program.program_id, program.problem_id, lines, program.split)


# --- execution-aware pre-training instances (S1/S2 classify task) ---

def _check_aspects(program: SourceProgram, aspects: LineAspects, case_id: str | None):
    if aspects.program_id != program.program_id:
        raise AspectMismatch(
            f"aspects for {aspects.program_id!r}, program is {program.program_id!r}")
    if case_id is not None and aspects.case_id != case_id:
        raise AspectMismatch(
            f"aspects for case {aspects.case_id!r}, test is {case_id!r}")
    if aspects.line_count != len(program):
        raise AspectMismatch("aspect line count differs from program length")


def aspect_tokens(aspects: LineAspects, kind: Aspect,
                  scheme: QuantizationScheme = DEFAULT_SCHEME) -> list[str | None]:
    """One optional token per source line for a line-wise aspect."""
    if kind is Aspect.LE:
        return [quantize_le(aspects.count(i), scheme) for i in range(1, aspects.line_count + 1)]
    if kind is Aspect.LC:
        return [quantize_lc(aspects.is_covered(i)) for i in range(1, aspects.line_count + 1)]
    if kind is Aspect.BC:
        return [quantize_bc(aspects.branch(i)) for i in range(1, aspects.line_count + 1)]
    raise ValueError(f"{kind.value} is not a line-wise aspect")


def variable_state_lines(aspects: LineAspects,
                         scheme: QuantizationScheme = DEFAULT_SCHEME) -> list[str]:
    """One comment line per variable, first-appearance order."""
    lines = []
    for snapshot in aspects.terminal_vars:
        quantized = quantize_variable(snapshot, scheme)
        lines.append(
            f"// {quantized.name} {quantized.type_bucket.value} {quantized.value_category}")
    return lines


def build_exec_pretrain(program: SourceProgram, test: TestCase, aspects: LineAspects,
                        kind: Aspect, scheme: QuantizationScheme = DEFAULT_SCHEME,
                        strategy: Strategy = Strategy.S1) -> DatasetInstance:
    """classify-task instance: program + input on the source side, the
    aspect token column (or variable-state comments) as the target."""
    _check_aspects(program, aspects, test.case_id)
    source = f"classify: {test.stdin}{SEP}{program.text}"
    if kind is Aspect.VS:
        target = "\n".join(variable_state_lines(aspects, scheme))
    else:
        target = "\n".join(token or "" for token in aspect_tokens(aspects, kind, scheme))
    return DatasetInstance(
        instance_id=f"{strategy.value}-classify-{kind.value}-{program.program_id}-{test.case_id}",
        task=Task.CLASSIFY,
        source=source,
        target=target,
        meta=InstanceMeta(
            program_id=program.program_id,
            problem_id=program.problem_id,
            split=program.split,
            strategy=strategy,
            case_id=test.case_id,
            aspect=kind,
        ),
    )


# --- masked language modeling instances (S2) ---

def build_mlm(program: SourceProgram, mask_rate: float = 0.15, seed: int = 0,
              tokenize: Callable[[str], list[str]] = split_tokens,
              strategy: Strategy = Strategy.S2) -> DatasetInstance:
    """mlm-task instance masking round(mask_rate * n) token positions.

    Placeholders are numbered in positional order; the target pairs each
    placeholder with the original token, so substitution reconstructs
    the token stream exactly.
    """
    tokens = tokenize(program.text)
    if not tokens:
        raise EmptyProgram(f"{program.program_id} has no tokens")
    n_masked = round(mask_rate * len(tokens))
    rng = random.Random(seed)
    positions = sorted(rng.sample(range(len(tokens)), n_masked))
    masked = list(tokens)
    target_parts = []
    for mask_index, position in enumerate(positions):
        placeholder = MASK_FORMAT.format(mask_index)
        target_parts.append(f"{placeholder} {tokens[position]}")
        masked[position] = placeholder
    return DatasetInstance(
        instance_id=f"{strategy.value}-mlm-{program.program_id}-{seed}",
        task=Task.MLM,
        source="mlm: " + " ".join(masked),
        target=" ".join(target_parts),
        meta=InstanceMeta(
            program_id=program.program_id,
            problem_id=program.problem_id,
            split=program.split,
            strategy=strategy,
        ),
    )


def unmask_tokens(source: str, target: str) -> list[str]:
    """Reverse build_mlm: substitute target tokens at mask positions."""
    if not source.startswith("mlm: "):
        raise ValueError("not an mlm source")
    stream = source[len("mlm: "):].split(" ") if len(source) > 5 else []
    replacements: dict[str, str] = {}
    parts = target.split(" ") if target else []
    for i in range(0, len(parts) - 1, 2):
        replacements[parts[i]] = parts[i + 1]
    return [replacements.get(tok, tok) if _MASK_RE.match(tok) else tok for tok in stream]


# --- optimization instances (BL and the fine-tuning side of S1/S2/S3) ---

def build_optimize(slow: SourceProgram, fast: SourceProgram,
                   strategy: Strategy = Strategy.BL,
                   aspect: Aspect | None = None) -> DatasetInstance:
    if slow.problem_id != fast.problem_id:
        raise ProblemMismatch(
            f"slow {slow.program_id!r} solves {slow.problem_id!r}, "
            f"fast {fast.program_id!r} solves {fast.problem_id!r}")
    suffix = f"-{aspect.value}" if aspect else ""
    return DatasetInstance(
        instance_id=f"{strategy.value}-optimize{suffix}-{slow.program_id}-{fast.program_id}",
        task=Task.OPTIMIZE,
        source="optimize: " + slow.text,
        target=fast.text,
        meta=InstanceMeta(
            program_id=slow.program_id,
            problem_id=slow.problem_id,
            split=slow.split,
            strategy=strategy,
            aspect=aspect,
        ),
    )


def annotate_slow_code(slow: SourceProgram, aspects: LineAspects, kind: Aspect,
                       scheme: QuantizationScheme = DEFAULT_SCHEME) -> SourceProgram:
    """Inject execution tokens into the program as code comments.

    Line-wise aspects append ``// <token>`` to each labeled line;
    variable states append their comment block after the last line. No
    character of an original line is altered before the injected comment.
    """
    _check_aspects(slow, aspects, None)
    if kind is Aspect.VS:
        lines = list(slow.lines) + variable_state_lines(aspects, scheme)
    else:
        tokens = aspect_tokens(aspects, kind, scheme)
        lines = [
            f"{line} // {token}" if token else line
            for line, token in zip(slow.lines, tokens)
        ]
    return SourceProgram(slow.program_id, slow.problem_id, tuple(lines), slow.split)


def strip_annotations(program: SourceProgram) -> SourceProgram:
    """Undo annotate_slow_code exactly."""
    lines = list(program.lines)
    while lines and _VS_COMMENT_RE.match(lines[-1]):
        lines.pop()
    lines = [_ANNOTATION_RE.sub("", line) for line in lines]
    if not lines:
        lines = [""]
    return SourceProgram(program.program_id, program.problem_id, tuple(lines), program.split)


# --- S3 trace selection ---

@dataclass(frozen=True)
class S3Selection:
    """Either max-merged counts (LE) or one chosen trace (LC/BC/VS)."""

    kind: Aspect
    merged_counts: dict[int, int] | None = None
    trace: ExecutionTrace | None = None


def select_trace_for_s3(traces: Sequence[ExecutionTrace], kind: Aspect,
                        seed: int = 0) -> S3Selection:
    complete = sorted((t for t in traces if t.complete), key=lambda t: t.case_id)
    if not complete:
        raise NoCompleteTraces("no complete trace available")
    if kind is Aspect.LE:
        merged = merge_le_across_traces([count_line_executions(t) for t in complete])
        return S3Selection(kind=kind, merged_counts=merged)
    rng = random.Random(seed)
    return S3Selection(kind=kind, trace=complete[rng.randrange(len(complete))])


# --- corpus-level policies ---

@dataclass
class FilterReport:
    limit: int
    counter_name: str
    kept: int = 0
    dropped: list[tuple[str, int, int]] = field(default_factory=list)

    @property
    def total(self) -> int:
        return self.kept + len(self.dropped)


def filter_by_token_limit(instances: Sequence[DatasetInstance], counter: TokenCounter,
                          limit: int = 512) -> tuple[list[DatasetInstance], FilterReport]:
    """Keep instances whose source and target both fit the token limit
    (inclusive); order is preserved and drops are reported."""
    report = FilterReport(limit=limit, counter_name=counter.name)
    kept: list[DatasetInstance] = []
    for instance in instances:
        source_count = counter.count(instance.source)
        target_count = counter.count(instance.target)
        if source_count <= limit and target_count <= limit:
            kept.append(instance)
            report.kept += 1
        else:
            report.dropped.append((instance.instance_id, source_count, target_count))
    return kept, report


@dataclass
class HygieneReport:
    problem_split_violations: list[str] = field(default_factory=list)
    cross_set_violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problem_split_violations and not self.cross_set_violations


def check_split_hygiene(instances: Sequence[DatasetInstance]) -> HygieneReport:
    """No problem in two splits; no pre-training program leaking into
    fine-tuning instances."""
    report = HygieneReport()
    splits_by_problem: dict[str, set[str]] = {}
    pretrain_programs: set[str] = set()
    finetune_programs: set[str] = set()
    for instance in instances:
        splits_by_problem.setdefault(instance.meta.problem_id, set()).add(
            instance.meta.split.value)
        if instance.task is Task.OPTIMIZE:
            finetune_programs.add(instance.meta.program_id)
        else:
            pretrain_programs.add(instance.meta.program_id)
    for problem_id, splits in sorted(splits_by_problem.items()):
        if len(splits) > 1:
            report.problem_split_violations.append(
                f"problem {problem_id} appears in splits {sorted(splits)}")
    for program_id in sorted(pretrain_programs & finetune_programs):
        report.cross_set_violations.append(
            f"program {program_id} appears in both pre-training and fine-tuning")
    return report


def cap_per_problem(pairs: Sequence[tuple[SourceProgram, TestCase]], cap: int = 150,
                    seed: int = 0) -> list[tuple[SourceProgram, TestCase]]:
    """Uniform without-replacement sample of at most cap program/test
    pairs per problem; deterministic per seed, input order preserved."""
    grouped: dict[str, list[tuple[SourceProgram, TestCase]]] = {}
    for program, test in pairs:
        grouped.setdefault(program.problem_id, []).append((program, test))
    sampled: list[tuple[SourceProgram, TestCase]] = []
    for problem_id, group in grouped.items():
        if len(group) <= cap:
            sampled.extend(group)
            continue
        rng = random.Random(derive_seed(seed, "cap", problem_id))
        indexes = sorted(rng.sample(range(len(group)), cap))
        sampled.extend(group[i] for i in indexes)
    return sampled


def interleave(classify: Sequence[DatasetInstance],
               mlm: Sequence[DatasetInstance]) -> list[DatasetInstance]:
    """1:1 alternation of classify and mlm instances (S2 pre-training)."""
    out: list[DatasetInstance] = []
    for pair in zip(classify, mlm):
        out.extend(pair)
    longer = classify if len(classify) > len(mlm) else mlm
    out.extend(longer[min(len(classify), len(mlm)):])
    return out
