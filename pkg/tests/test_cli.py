"""CLI subcommands over the fixture corpus. Dataset commands run on
hand-written traces; eval needs the real compiler."""

import json

import pytest

from conftest import needs_gxx
from corpus_fixture import write_corpus, write_hand_traces
from execaware.cli import main
from execaware.config import PipelineConfig, load_config
from execaware.dataset import Strategy, read_instances


@pytest.fixture
def workspace(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    corpus = write_corpus(tmp_path / "corpus")
    return tmp_path, corpus


def _args(tmp_path, *rest):
    return [
        "--set", f"corpus_root={tmp_path / 'corpus'}",
        "--set", f"trace_dir={tmp_path / 'traces'}",
        "--set", f"dataset_dir={tmp_path / 'datasets'}",
        "--set", f"report_dir={tmp_path / 'reports'}",
        *rest,
    ]


class TestConfig:
    def test_defaults_shown(self, capsys):
        assert main(["config", "show"]) == 0
        out = capsys.readouterr().out
        assert "time_cap = 500.0" in out
        assert "token_limit = 512" in out
        assert "mask_rate = 0.15" in out
        assert "per_problem_cap = 150" in out

    def test_file_env_flag_precedence(self, tmp_path, monkeypatch):
        cfg_file = tmp_path / "pipeline.cfg"
        cfg_file.write_text("token_limit = 100\nseed = 3\n")
        monkeypatch.setenv("EXECAWARE_CFG_TOKEN_LIMIT", "200")
        cfg = load_config(cfg_file, {"seed": "9"})
        assert cfg.token_limit == 200  # env beats file
        assert cfg.seed == 9           # flag beats file

    def test_unknown_key_rejected(self, tmp_path):
        cfg_file = tmp_path / "pipeline.cfg"
        cfg_file.write_text("bogus = 1\n")
        with pytest.raises(ValueError):
            load_config(cfg_file)
        with pytest.raises(ValueError):
            load_config(None, {"nope": "2"})

    def test_invalid_values_rejected(self):
        with pytest.raises(ValueError):
            PipelineConfig(token_limit=0)
        with pytest.raises(ValueError):
            PipelineConfig(backend="gpu")


class TestDatasetCommands:
    def test_bl_dataset(self, workspace, capsys):
        tmp_path, corpus = workspace
        assert main(_args(tmp_path, "dataset", "--strategy", "BL")) == 0
        instances = read_instances(tmp_path / "datasets" / "BL_finetune.jsonl")
        assert len(instances) == 3
        assert all(i.source.startswith("optimize: ") for i in instances)
        assert all(i.meta.strategy is Strategy.BL for i in instances)

    def test_s1_requires_traces(self, workspace, capsys):
        tmp_path, _ = workspace
        assert main(_args(tmp_path, "dataset", "--strategy", "S1",
                          "--aspect", "LE")) == 1
        assert "trace" in capsys.readouterr().err

    def test_s1_with_hand_traces(self, workspace):
        tmp_path, corpus = workspace
        write_hand_traces(corpus, tmp_path / "traces")
        assert main(_args(tmp_path, "dataset", "--strategy", "S1",
                          "--aspect", "LC")) == 0
        pretrain = read_instances(tmp_path / "datasets" / "S1_LC_pretrain.jsonl")
        finetune = read_instances(tmp_path / "datasets" / "S1_LC_finetune.jsonl")
        assert {i.meta.program_id for i in pretrain} == {"pre_count", "pre_echo"}
        assert all(i.task.value == "classify" for i in pretrain)
        assert len(finetune) == 3
        # pre-training targets have one entry per source line
        for instance in pretrain:
            program = corpus.programs[instance.meta.program_id]
            assert len(instance.target.split("\n")) == len(program)

    def test_s2_interleaves_classify_and_mlm(self, workspace):
        tmp_path, corpus = workspace
        write_hand_traces(corpus, tmp_path / "traces")
        assert main(_args(tmp_path, "dataset", "--strategy", "S2",
                          "--aspect", "VS")) == 0
        pretrain = read_instances(tmp_path / "datasets" / "S2_VS_pretrain.jsonl")
        classify = [i for i in pretrain if i.task.value == "classify"]
        mlm = [i for i in pretrain if i.task.value == "mlm"]
        assert abs(len(classify) - len(mlm)) <= 1
        assert pretrain[0].task.value == "classify"
        assert pretrain[1].task.value == "mlm"

    def test_s3_le_annotates_sources(self, workspace):
        tmp_path, corpus = workspace
        write_hand_traces(corpus, tmp_path / "traces")
        assert main(_args(tmp_path, "dataset", "--strategy", "S3",
                          "--aspect", "LE")) == 0
        instances = read_instances(tmp_path / "datasets" / "S3_LE_finetune.jsonl")
        assert len(instances) == 3
        assert all(" // <e" in i.source for i in instances)
        assert all(i.meta.aspect.value == "LE" for i in instances)

    def test_s3_without_traces_fails(self, workspace, capsys):
        tmp_path, _ = workspace
        assert main(_args(tmp_path, "dataset", "--strategy", "S3",
                          "--aspect", "VS")) == 1

    def test_dataset_rerun_is_byte_identical(self, workspace):
        tmp_path, corpus = workspace
        write_hand_traces(corpus, tmp_path / "traces")
        args = _args(tmp_path, "dataset", "--strategy", "S2", "--aspect", "LE")
        assert main(args) == 0
        first = (tmp_path / "datasets" / "S2_LE_pretrain.jsonl").read_bytes()
        assert main(args) == 0
        assert (tmp_path / "datasets" / "S2_LE_pretrain.jsonl").read_bytes() == first

    def test_hygiene_failure_fails_closed(self, workspace, capsys):
        tmp_path, corpus = workspace
        # poison the corpus: same problem in two splits
        programs = (tmp_path / "corpus" / "programs.jsonl").read_text().splitlines()
        poisoned = json.loads(programs[0])
        poisoned["program_id"] = "rogue"
        poisoned["split"] = "test"
        # write via a second problem that shares the pair problem id
        record = {"program_id": "rogue", "problem_id": "q_sum",
                  "split": "test", "text": "int main(){}"}
        with open(tmp_path / "corpus" / "programs.jsonl", "a") as fh:
            fh.write(json.dumps(record) + "\n")
        result = main(_args(tmp_path, "dataset", "--strategy", "BL"))
        assert result == 1  # corpus loader rejects the split conflict


@needs_gxx
class TestEvalAndCompare:
    def _write_candidates(self, tmp_path, corpus, mapping):
        path = tmp_path / "candidates.jsonl"
        with open(path, "w", encoding="utf-8") as fh:
            for pair_id, generated in mapping.items():
                slow_id = pair_id.split("--")[0]
                program = corpus.programs[slow_id]
                fh.write(json.dumps({
                    "id": pair_id,
                    "meta": {"program_id": slow_id,
                             "problem_id": program.problem_id,
                             "strategy": "BL"},
                    "generated": generated,
                }) + "\n")
        return path

    def test_eval_funnel_and_reports(self, workspace, capsys):
        tmp_path, corpus = workspace
        candidates = self._write_candidates(tmp_path, corpus, {
            "slow_sum--fast_sum": corpus.programs["fast_sum"].text,
            "slow_max--fast_max": "int main( {",  # broken
            "slow_parity--fast_parity": corpus.programs["slow_parity"].text,
        })
        assert main(_args(tmp_path, "eval", str(candidates), "--out", "run1")) == 0
        metrics = json.loads((tmp_path / "reports" / "run1.metrics.json").read_text())
        assert metrics["n"] == 3
        assert metrics["compiled_pct"] == pytest.approx(200 / 3)
        assert metrics["correct_pct"] == pytest.approx(200 / 3)
        records = (tmp_path / "reports" / "run1.records.jsonl").read_text().splitlines()
        by_id = {json.loads(r)["pair_id"]: json.loads(r) for r in records}
        assert by_id["slow_sum--fast_sum"]["correct"] is True
        assert by_id["slow_sum--fast_sum"]["speedup"] > 1.0
        assert by_id["slow_max--fast_max"]["correct"] is False
        assert by_id["slow_max--fast_max"]["speedup"] == 1.0

    def test_eval_empty_candidates(self, workspace, capsys):
        tmp_path, _ = workspace
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        assert main(_args(tmp_path, "eval", str(empty))) == 1

    def test_compare_identical_runs(self, workspace, capsys):
        tmp_path, corpus = workspace
        candidates = self._write_candidates(tmp_path, corpus, {
            "slow_sum--fast_sum": corpus.programs["fast_sum"].text,
        })
        assert main(_args(tmp_path, "eval", str(candidates), "--out", "a")) == 0
        records = tmp_path / "reports" / "a.records.jsonl"
        assert main(_args(tmp_path, "compare", str(records), str(records))) == 0
        comparison = json.loads((tmp_path / "reports" / "comparison.json").read_text())
        assert comparison["method"] == "no_difference"
        assert comparison["p_value"] == 1.0

    def test_compare_misaligned(self, workspace, tmp_path_factory, capsys):
        tmp_path, corpus = workspace
        a = tmp_path / "a.records.jsonl"
        b = tmp_path / "b.records.jsonl"
        record = {"pair_id": "x", "input_program_id": "i", "generated_program_id": "g",
                  "input_outcomes": [], "generated_outcomes": [], "correct": False,
                  "speedup": 1.0, "optimized": False}
        a.write_text(json.dumps(record) + "\n")
        record["pair_id"] = "y"
        b.write_text(json.dumps(record) + "\n")
        assert main(_args(tmp_path, "compare", str(a), str(b))) == 1


class TestTraceCommandWithoutDebugger:
    def test_missing_debugger_nonzero_exit(self, workspace, capsys):
        tmp_path, _ = workspace
        result = main(_args(
            tmp_path, "--set", "gdb_cmd=gdb-that-does-not-exist",
            "trace", "--corpus-set", "pairs"))
        assert result == 1
        summary = json.loads((tmp_path / "traces" / "summary.json").read_text())
        assert summary["failed"] > 0
        assert all("not found" in e["error"] for e in summary["errors"])

    def test_empty_corpus_empty_summary(self, tmp_path, monkeypatch, capsys):
        monkeypatch.chdir(tmp_path)
        corpus = tmp_path / "corpus"
        corpus.mkdir()
        assert main(_args(tmp_path, "trace")) == 0
        summary = json.loads((tmp_path / "traces" / "summary.json").read_text())
        assert summary["complete"] == summary["failed"] == 0
        assert summary["errors"] == []


class TestSchemeAndFlags:
    def test_scheme_file_applies_corpus_wide(self, workspace):
        tmp_path, corpus = workspace
        write_hand_traces(corpus, tmp_path / "traces")
        scheme = tmp_path / "scheme.cfg"
        scheme.write_text("le_mid = 2\nle_high = 10\n")
        assert main(_args(tmp_path, "--set", f"scheme_file={scheme}",
                          "dataset", "--strategy", "S3", "--aspect", "LE")) == 0
        instances = read_instances(tmp_path / "datasets" / "S3_LE_finetune.jsonl")
        # hand traces repeat loop lines 3x: above le_mid=2, so <E> appears
        assert any(" // <E>" in i.source for i in instances)

    def test_jobs_flag_accepted(self, workspace):
        tmp_path, corpus = workspace
        write_hand_traces(corpus, tmp_path / "traces")
        assert main(_args(tmp_path, "--jobs", "2",
                          "dataset", "--strategy", "BL")) == 0

    def test_negative_jobs_rejected(self, workspace, capsys):
        tmp_path, _ = workspace
        assert main(_args(tmp_path, "--jobs", "-1", "config", "show")) == 1
