"""Command-line driver: generation, training, solving, sweeps, selftest."""

import hashlib
import json
import math
from pathlib import Path

import pytest

from jigsolve.cli import (
    EXIT_DATA,
    EXIT_OK,
    EXIT_USAGE,
    build_parser,
    main,
)

GEN_FLAGS = [
    "--cell", "12", "--crop", "8", "--mirror-p", "0", "--no-mean-subtract",
]


def dir_digest(root: Path) -> str:
    h = hashlib.sha256()
    for path in sorted(root.rglob("*")):
        if path.is_file():
            h.update(path.relative_to(root).as_posix().encode())
            h.update(path.read_bytes())
    return h.hexdigest()


def read_report(path: Path):
    records = [json.loads(line) for line in path.read_text().splitlines()]
    aggregates = [r for r in records if r["type"] == "aggregate"]
    puzzles = [r for r in records if r["type"] == "puzzle"]
    return puzzles, aggregates


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli") / "corpus"
    code = main(
        ["gen", "--grid", "2x2", "--count", "16", "--seed", "7",
         "--out", str(root)] + GEN_FLAGS
    )
    assert code == EXIT_OK
    return root


class TestGen:
    def test_writes_instances(self, corpus_dir):
        assert len(list(corpus_dir.glob("inst_*"))) == 16
        assert (corpus_dir / "inst_00000" / "manifest.txt").exists()

    def test_rerun_is_byte_identical(self, corpus_dir, tmp_path):
        other = tmp_path / "again"
        main(["gen", "--grid", "2x2", "--count", "16", "--seed", "7",
              "--out", str(other)] + GEN_FLAGS)
        assert dir_digest(other) == dir_digest(corpus_dir)

    def test_3d_geometry(self, tmp_path):
        root = tmp_path / "vol"
        code = main(["gen", "--grid", "3x3x3", "--volume-kind", "synth-mixed",
                     "--count", "1", "--seed", "1", "--out", str(root)])
        assert code == EXIT_OK
        from jigsolve.puzzlegen import load_corpus

        inst = load_corpus(root)[0]
        assert inst.patches.shape == (27, 32, 32, 32, 1)

    def test_unknown_kind(self, tmp_path):
        code = main(["gen", "--grid", "2x2", "--count", "1", "--kind", "plaid",
                     "--out", str(tmp_path / "x")])
        assert code == EXIT_DATA

    def test_unknown_flag_rejected(self):
        with pytest.raises(SystemExit) as exc:
            main(["gen", "--grid", "2x2", "--out", "x", "--bogus"])
        assert exc.value.code == 2


class TestTrain:
    def test_writes_model_and_log(self, corpus_dir, tmp_path):
        model = tmp_path / "m.jsw1"
        log = tmp_path / "loss.log"
        code = main(["train", "--corpus", str(corpus_dir), "--out", str(model),
                     "--log", str(log), "--epochs", "2", "--seed", "0"])
        assert code == EXIT_OK
        assert model.read_bytes()[:4] == b"JSW1"
        lines = log.read_text().splitlines()
        assert len(lines) == 2
        assert lines[0].startswith("epoch=1 mean_loss=")
        assert "train_rounds=5" in lines[0]

    def test_missing_corpus(self, tmp_path, capsys):
        code = main(["train", "--corpus", str(tmp_path / "absent"),
                     "--out", str(tmp_path / "m.jsw1")])
        assert code == EXIT_DATA
        assert "absent" in capsys.readouterr().err

    def test_grid_mismatch(self, corpus_dir, tmp_path):
        code = main(["train", "--corpus", str(corpus_dir), "--grid", "3x3",
                     "--out", str(tmp_path / "m.jsw1")])
        assert code == EXIT_DATA


class TestSolve:
    def test_perfect_oracle_on_corpus(self, corpus_dir, tmp_path):
        report = tmp_path / "r.jsonl"
        code = main(["solve", "--corpus", str(corpus_dir), "--oracle", "0.0",
                     "--report", str(report)])
        assert code == EXIT_OK
        puzzles, (agg,) = read_report(report)
        assert len(puzzles) == 16
        assert agg["exact_rate"] == 1.0
        assert all(p["rounds_used"] == 2 or p["final_hamming"] == 0 for p in puzzles)

    def test_pure_noise_is_chance_level(self, tmp_path):
        report = tmp_path / "r.jsonl"
        main(["solve", "--grid", "2x2", "--count", "300", "--oracle", "1.0",
              "--report", str(report)])
        _, (agg,) = read_report(report)
        assert agg["exact_rate"] < 0.2  # chance is 1/24

    def test_aggregate_invariants(self, tmp_path):
        report = tmp_path / "r.jsonl"
        main(["solve", "--grid", "3x3", "--count", "40", "--oracle", "0.5",
              "--report", str(report)])
        puzzles, (agg,) = read_report(report)
        assert 0.0 <= agg["exact_rate"] <= agg["d_le_2_rate"] <= 1.0
        assert agg["config_space_size"] == math.factorial(9)
        assert len(agg["per_round_solved"]) == agg["max_rounds"]
        for p in puzzles:
            assert p["final_hamming"] != 1

    def test_model_on_corpus(self, corpus_dir, tmp_path):
        model = tmp_path / "m.jsw1"
        main(["train", "--corpus", str(corpus_dir), "--out", str(model),
              "--epochs", "1"])
        report = tmp_path / "r.jsonl"
        code = main(["solve", "--corpus", str(corpus_dir), "--model", str(model),
                     "--report", str(report)])
        assert code == EXIT_OK
        _, (agg,) = read_report(report)
        assert agg["scorer"].startswith("model:")

    def test_needs_scorer(self, corpus_dir, tmp_path):
        code = main(["solve", "--corpus", str(corpus_dir),
                     "--report", str(tmp_path / "r.jsonl")])
        assert code == EXIT_DATA

    def test_corrupt_model_magic(self, corpus_dir, tmp_path):
        bad = tmp_path / "bad.jsw1"
        bad.write_bytes(b"NOPE" + b"\x00" * 64)
        code = main(["solve", "--corpus", str(corpus_dir), "--model", str(bad),
                     "--report", str(tmp_path / "r.jsonl")])
        assert code == EXIT_DATA

    def test_thread_count_does_not_change_report(self, tmp_path):
        reports = []
        for threads in ("1", "8"):
            report = tmp_path / f"r{threads}.jsonl"
            main(["solve", "--grid", "3x3", "--count", "30", "--oracle", "0.4",
                  "--seed", "5", "--threads", threads, "--report", str(report)])
            reports.append(report.read_bytes())
        assert reports[0] == reports[1]

    def test_env_thread_fallback(self, monkeypatch):
        monkeypatch.setenv("JIGSOLVE_THREADS", "6")
        args = build_parser().parse_args(["solve", "--grid", "2x2",
                                          "--oracle", "0", "--report", "r"])
        assert args.threads == 6


class TestBench:
    def test_round_sweep(self, tmp_path):
        report = tmp_path / "bench.jsonl"
        code = main(["bench", "--grid", "3x3", "--count", "40",
                     "--noise", "0.5", "--radii", "3", "--rounds", "1,20",
                     "--binary", "on", "--report", str(report)])
        assert code == EXIT_OK
        _, aggs = read_report(report)
        assert len(aggs) == 2
        by_rounds = {a["max_rounds"]: a["exact_rate"] for a in aggs}
        assert by_rounds[20] >= by_rounds[1]

    def test_binary_sweep_shapes(self, tmp_path):
        report = tmp_path / "bench.jsonl"
        main(["bench", "--grid", "3x3", "--count", "20", "--noise", "0.3,0.6",
              "--radii", "0,3", "--rounds", "5", "--binary", "both",
              "--report", str(report)])
        _, aggs = read_report(report)
        assert len(aggs) == 2 * 2 * 2

    def test_empty_sweep_is_usage_error(self, tmp_path):
        code = main(["bench", "--grid", "3x3", "--noise", "", "--report",
                     str(tmp_path / "b.jsonl")])
        assert code == EXIT_USAGE


class TestSelftest:
    def test_passes_and_repeats_identically(self, capsys):
        assert main(["selftest"]) == EXIT_OK
        first = capsys.readouterr().out
        assert main(["selftest"]) == EXIT_OK
        second = capsys.readouterr().out
        assert first == second
        assert "ok:" in first
        assert "FAIL" not in first


class TestHelp:
    def test_all_subcommands_have_help(self, capsys):
        for cmd in ("gen", "train", "solve", "bench", "selftest"):
            with pytest.raises(SystemExit) as exc:
                main([cmd, "--help"])
            assert exc.value.code == 0
            out = capsys.readouterr().out
            assert "--seed" in out
