"""Command-line pipeline: trace, dataset, eval, compare, config show.

All randomness flows from the single configured seed; per-item seeds are
derived by stable hashing, so any subcommand rerun with the same config
and corpus produces identical files (timing fields excepted).
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import stats
from .aspects import BranchClass, LineAspects, extract_aspects
from .bench import (
    CompilerConfig,
    SimulatorBackend,
    WallClockBackend,
    aggregate,
    evaluate_pair,
)
from .config import PipelineConfig, load_config
from .corpus import Corpus, load_corpus
from .dataset import (
    Aspect,
    DatasetInstance,
    SplitTokenCounter,
    Strategy,
    SubprocessTokenCounter,
    annotate_slow_code,
    build_exec_pretrain,
    build_mlm,
    build_optimize,
    cap_per_problem,
    check_split_hygiene,
    derive_seed,
    filter_by_token_limit,
    interleave,
    read_candidates,
    select_trace_for_s3,
    write_instances,
)
from .errors import (
    AdapterUnavailable,
    EmptyInput,
    ExecAwareError,
    HygieneViolation,
    MissingTraces,
)
from .quantize import DEFAULT_SCHEME, QuantizationScheme
from .trace import (
    ExecutionTrace,
    SourceProgram,
    TestCase,
    TracerConfig,
    collect_trace,
    parse_trace,
    serialize_trace,
)


def _tracer_config(cfg: PipelineConfig) -> TracerConfig:
    return TracerConfig(
        time_cap=cfg.time_cap,
        grace=cfg.grace,
        gdb_cmd=cfg.gdb_cmd,
        adapter_cmd=cfg.command("adapter_cmd"),
        compiler_cmd=cfg.compiler_cmd,
        compile_flags=cfg.flag_list("trace_compiler_flags"),
    )


def _scheme(cfg: PipelineConfig) -> QuantizationScheme:
    if cfg.scheme_file:
        return QuantizationScheme.from_file(cfg.scheme_file)
    return DEFAULT_SCHEME


def _token_counter(cfg: PipelineConfig):
    adapter = cfg.command("tokenizer_adapter")
    if adapter:
        return SubprocessTokenCounter(adapter)
    return SplitTokenCounter()


def _trace_path(trace_dir: Path, program_id: str, case_id: str) -> Path:
    return trace_dir / f"{program_id}__{case_id}.trace"


def _load_traces(trace_dir: Path, program: SourceProgram) -> list[ExecutionTrace]:
    traces = []
    for path in sorted(trace_dir.glob(f"{program.program_id}__*.trace")):
        traces.append(parse_trace(path.read_text(encoding="utf-8"),
                                  line_count=len(program)))
    return traces


# --- trace subcommand ---

def cmd_trace(cfg: PipelineConfig, corpus_set: str = "all") -> int:
    corpus = load_corpus(cfg.corpus_root)
    trace_dir = Path(cfg.trace_dir)
    trace_dir.mkdir(parents=True, exist_ok=True)
    tracer = _tracer_config(cfg)

    items: list[tuple[SourceProgram, TestCase]] = []
    if corpus_set in ("pairs", "all"):
        seen: set[str] = set()
        for pair in corpus.pairs:
            if pair.slow_id in seen:
                continue
            seen.add(pair.slow_id)
            program = corpus.programs[pair.slow_id]
            items.extend((program, test) for test in corpus.tests_for(program))
    if corpus_set in ("pretrain", "all"):
        pretrain_items = [
            (program, test)
            for program in corpus.pretrain_programs()
            for test in corpus.tests_for(program)
        ]
        items.extend(cap_per_problem(pretrain_items, cfg.per_problem_cap, cfg.seed))

    summary = {"complete": 0, "timeout": 0, "crashed": 0, "failed": 0, "errors": []}
    fatal = False

    def work(item: tuple[SourceProgram, TestCase]):
        program, test = item
        return program, test, collect_trace(program, test, tracer)

    with ThreadPoolExecutor(max_workers=cfg.effective_jobs()) as pool:
        futures = [pool.submit(work, item) for item in items]
        results: list[tuple[SourceProgram, TestCase, ExecutionTrace]] = []
        for item, future in zip(items, futures):
            try:
                results.append(future.result())
            except AdapterUnavailable as exc:
                fatal = True
                summary["failed"] += 1
                summary["errors"].append(
                    {"program_id": item[0].program_id, "case_id": item[1].case_id,
                     "error": str(exc)})
            except ExecAwareError as exc:
                summary["failed"] += 1
                summary["errors"].append(
                    {"program_id": item[0].program_id, "case_id": item[1].case_id,
                     "error": str(exc)})

    for program, test, trace in sorted(
            results, key=lambda r: (r[0].program_id, r[1].case_id)):
        summary[trace.status.value] += 1
        _trace_path(trace_dir, program.program_id, test.case_id).write_text(
            serialize_trace(trace), encoding="utf-8")

    (trace_dir / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"traced {len(items)} program/case pairs: "
          f"{summary['complete']} complete, {summary['timeout']} timeout, "
          f"{summary['crashed']} crashed, {summary['failed']} failed")
    return 1 if fatal else 0


# --- dataset subcommand ---

def _pretrain_instances(cfg: PipelineConfig, corpus: Corpus, kind: Aspect,
                        scheme: QuantizationScheme,
                        strategy: Strategy) -> list[DatasetInstance]:
    trace_dir = Path(cfg.trace_dir)
    instances: list[DatasetInstance] = []
    tests_by_id = {
        (problem_id, test.case_id): test
        for problem_id, tests in corpus.tests.items()
        for test in tests
    }
    for program in corpus.pretrain_programs():
        for trace in _load_traces(trace_dir, program):
            if not trace.complete:
                continue
            test = tests_by_id.get((program.problem_id, trace.case_id))
            if test is None:
                continue
            aspects = extract_aspects(program, trace)
            instances.append(
                build_exec_pretrain(program, test, aspects, kind, scheme, strategy))
    if not instances:
        raise MissingTraces(
            "no complete traces for any pre-training program; run `trace` first")
    return instances


def _annotated_pair_instances(cfg: PipelineConfig, corpus: Corpus, kind: Aspect,
                              scheme: QuantizationScheme) -> list[DatasetInstance]:
    trace_dir = Path(cfg.trace_dir)
    instances: list[DatasetInstance] = []
    selections: dict[str, SourceProgram] = {}
    for pair in corpus.pairs:
        slow = corpus.programs[pair.slow_id]
        fast = corpus.programs[pair.fast_id]
        if pair.slow_id not in selections:
            traces = [t for t in _load_traces(trace_dir, slow) if t.complete]
            if not traces:
                continue
            selection = select_trace_for_s3(
                traces, kind, derive_seed(cfg.seed, "s3", pair.slow_id))
            if kind is Aspect.LE:
                aspects = LineAspects(
                    program_id=slow.program_id,
                    case_id="<merged>",
                    line_count=len(slow),
                    exec_count=selection.merged_counts,
                    covered=frozenset(selection.merged_counts),
                    branch_class=(BranchClass.NONE,) * len(slow),
                    terminal_vars=(),
                )
            else:
                aspects = extract_aspects(slow, selection.trace)
            selections[pair.slow_id] = annotate_slow_code(slow, aspects, kind, scheme)
        instances.append(
            build_optimize(selections[pair.slow_id], fast, Strategy.S3, aspect=kind))
    if not instances:
        raise MissingTraces(
            "no slow program of any pair has a complete trace; run `trace` first")
    return instances


def _finalize_dataset(cfg: PipelineConfig, name: str,
                      instances: list[DatasetInstance]) -> Path:
    counter = _token_counter(cfg)
    kept, report = filter_by_token_limit(instances, counter, cfg.token_limit)
    hygiene = check_split_hygiene(kept)
    if not hygiene.ok:
        raise HygieneViolation(
            "; ".join(hygiene.problem_split_violations + hygiene.cross_set_violations))
    out = Path(cfg.dataset_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{name}.jsonl"
    write_instances(path, kept)
    print(f"{path}: {report.kept} instances "
          f"({len(report.dropped)} dropped over {report.limit} tokens)")
    return path


def cmd_dataset(cfg: PipelineConfig, strategy: Strategy, aspect: Aspect | None,
                traced_only: bool = False) -> int:
    corpus = load_corpus(cfg.corpus_root)
    scheme = _scheme(cfg)
    if strategy in (Strategy.S1, Strategy.S2, Strategy.S3) and aspect is None:
        raise ValueError(f"strategy {strategy.value} requires --aspect")

    if strategy is Strategy.BL:
        pairs = corpus.pairs
        if traced_only:
            trace_dir = Path(cfg.trace_dir)
            pairs = [
                pair for pair in pairs
                if any(t.complete
                       for t in _load_traces(trace_dir, corpus.programs[pair.slow_id]))
            ]
        instances = [
            build_optimize(corpus.programs[p.slow_id], corpus.programs[p.fast_id],
                           Strategy.BL)
            for p in pairs
        ]
        _finalize_dataset(cfg, "BL_finetune", instances)
        return 0

    if strategy in (Strategy.S1, Strategy.S2):
        classify = _pretrain_instances(cfg, corpus, aspect, scheme, strategy)
        if strategy is Strategy.S2:
            mlm = [
                build_mlm(
                    corpus.programs[inst.meta.program_id],
                    cfg.mask_rate,
                    derive_seed(cfg.seed, "mlm", inst.meta.program_id,
                                inst.meta.case_id or ""),
                )
                for inst in classify
            ]
            pretrain = interleave(classify, mlm)
        else:
            pretrain = classify
        finetune = [
            build_optimize(corpus.programs[p.slow_id], corpus.programs[p.fast_id],
                           strategy)
            for p in corpus.pairs
        ]
        _finalize_dataset(cfg, f"{strategy.value}_{aspect.value}_pretrain", pretrain)
        _finalize_dataset(cfg, f"{strategy.value}_{aspect.value}_finetune", finetune)
        return 0

    instances = _annotated_pair_instances(cfg, corpus, aspect, scheme)
    _finalize_dataset(cfg, f"S3_{aspect.value}_finetune", instances)
    return 0


# --- eval subcommand ---

def cmd_eval(cfg: PipelineConfig, candidates_path: str, out_name: str = "eval") -> int:
    corpus = load_corpus(cfg.corpus_root)
    candidates = read_candidates(candidates_path)
    if not candidates:
        raise EmptyInput(f"no candidate records in {candidates_path}")
    compiler = CompilerConfig(cfg.compiler_cmd, cfg.flag_list("compile_flags"))
    if cfg.backend == "simulator":
        sim_cmd = cfg.command("simulator_cmd")
        if not sim_cmd:
            raise ValueError("backend=simulator requires simulator_cmd")
        backend = SimulatorBackend(sim_cmd)
        jobs = cfg.effective_jobs()
    else:
        backend = WallClockBackend(cfg.reps)
        # Wall-clock timing runs sequentially unless jobs is forced, to
        # keep measurements interference-free.
        jobs = cfg.jobs or 1

    def work(candidate):
        slow = corpus.programs[candidate.program_id]
        tests = corpus.tests_for(slow)
        generated = SourceProgram.from_text(
            f"{candidate.pair_id}-gen", slow.problem_id, candidate.generated, slow.split)
        return evaluate_pair(candidate.pair_id, slow, generated, tests,
                             compiler, backend, cfg.case_timeout_s)

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        records = list(pool.map(work, candidates))
    records.sort(key=lambda r: r.pair_id)

    report = aggregate(records, backend=backend.name)
    out = Path(cfg.report_dir)
    out.mkdir(parents=True, exist_ok=True)
    records_path = out / f"{out_name}.records.jsonl"
    with open(records_path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(record.to_json() + "\n")
    (out / f"{out_name}.metrics.json").write_text(report.to_json() + "\n", encoding="utf-8")
    (out / f"{out_name}.metrics.txt").write_text(report.to_table() + "\n", encoding="utf-8")
    print(report.to_table())
    print(f"wrote {records_path}")
    return 0


# --- compare subcommand ---

def _speedups_from_records(path: str) -> dict[str, float]:
    from .bench.metrics import EvalRecord

    speedups: dict[str, float] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                record = EvalRecord.from_json(line)
                speedups[record.pair_id] = record.speedup
    return speedups


def cmd_compare(cfg: PipelineConfig, treatment_path: str, baseline_path: str,
                out_name: str = "comparison") -> int:
    report = stats.compare(
        _speedups_from_records(treatment_path),
        _speedups_from_records(baseline_path),
    )
    payload = {
        "n": report.n,
        "n_nonzero": report.n_nonzero,
        "w_plus": report.w_plus,
        "w_minus": report.w_minus,
        "p_value": report.p_two_sided,
        "a12": report.a12,
        "r": report.r,
        "method": report.method.value,
        "significant": report.significant,
        "magnitude": report.magnitude,
    }
    out = Path(cfg.report_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{out_name}.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    if report.method.value == "no_difference":
        print(f"n={report.n}  no difference between the two record sets")
    else:
        magnitude = f" ({report.magnitude})" if report.magnitude else ""
        print(f"n={report.n}  p-value={report.p_two_sided:.4g}"
              f"  A12={report.a12:.3f}{magnitude}  r={report.r:.3f}"
              f"  [{report.method.value}]")
    return 0


# --- entry point ---

def _parse_overrides(pairs: list[str]) -> dict[str, str]:
    overrides = {}
    for pair in pairs:
        if "=" not in pair:
            raise ValueError(f"--set expects key=value, got {pair!r}")
        key, _, value = pair.partition("=")
        overrides[key.strip()] = value.strip()
    return overrides


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="execaware",
        description="Execution-aware dataset construction and benchmarking pipeline",
    )
    parser.add_argument("--config", help="key = value configuration file")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a configuration key (repeatable)")
    parser.add_argument("--jobs", type=int, metavar="N",
                        help="worker pool size (default: logical CPU count)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_trace = sub.add_parser("trace", help="collect execution traces for the corpus")
    p_trace.add_argument("--corpus-set", choices=["pairs", "pretrain", "all"],
                         default="all")

    p_dataset = sub.add_parser("dataset", help="build training datasets")
    p_dataset.add_argument("--strategy", required=True,
                           choices=[s.value for s in Strategy])
    p_dataset.add_argument("--aspect", choices=[a.value for a in Aspect])
    p_dataset.add_argument("--traced-only", action="store_true",
                           help="restrict BL pairs to slow programs with traces")

    p_eval = sub.add_parser("eval", help="benchmark candidate optimized programs")
    p_eval.add_argument("candidates", help="candidates JSONL file")
    p_eval.add_argument("--out", default="eval", help="report base name")

    p_compare = sub.add_parser("compare", help="statistically compare two eval runs")
    p_compare.add_argument("treatment", help="treatment .records.jsonl")
    p_compare.add_argument("baseline", help="baseline .records.jsonl")
    p_compare.add_argument("--out", default="comparison", help="report base name")

    p_config = sub.add_parser("config", help="configuration utilities")
    p_config.add_argument("action", choices=["show"])

    args = parser.parse_args(argv)
    try:
        overrides = _parse_overrides(args.set)
        if args.jobs is not None:
            overrides["jobs"] = str(args.jobs)
        cfg = load_config(args.config, overrides)
        if args.command == "trace":
            return cmd_trace(cfg, args.corpus_set)
        if args.command == "dataset":
            aspect = Aspect(args.aspect) if args.aspect else None
            return cmd_dataset(cfg, Strategy(args.strategy), aspect, args.traced_only)
        if args.command == "eval":
            return cmd_eval(cfg, args.candidates, args.out)
        if args.command == "compare":
            return cmd_compare(cfg, args.treatment, args.baseline, args.out)
        if args.command == "config":
            print(cfg.show())
            return 0
        raise AssertionError(f"unhandled command {args.command}")
    except (ExecAwareError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
