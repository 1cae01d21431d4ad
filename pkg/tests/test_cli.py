"""Command-line pipeline: exit codes, config merging, and composition."""

import filecmp
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from motionguide.cli import main
from motionguide.guidance import OptimizationResult
from motionguide.io import load_corpus, read_feature_csv, read_motion


def _tree(root: Path) -> list[Path]:
    return sorted(p.relative_to(root) for p in root.rglob("*") if p.is_file())


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """One composed end-to-end run at desk scale, shared by the checks."""
    root = tmp_path_factory.mktemp("pipeline")
    corpus = root / "corpus"
    assert main(["synth", "--athletes", "3", "--trials", "2", "--seed", "4",
                 "--out", str(corpus)]) == 0
    train = root / "train"
    assert main(["train", "--input", str(corpus / "manifest.json"),
                 "--out", str(train), "--model-dim", "16", "--latent-dim", "12",
                 "--layers", "1", "--heads", "2", "--ff-dim", "32",
                 "--epochs", "3", "--batch-size", "4", "--lr", "1e-3"]) == 0
    opt = root / "opt"
    assert main(["optimize", "--input", str(corpus / "manifest.json"),
                 "--checkpoint", str(train / "checkpoint.pt"),
                 "--out", str(opt), "--athletes", "all",
                 "--perturbations", "4", "--iterations", "2",
                 "--radius", "2.0", "--seed", "1"]) == 0
    return root, corpus, train, opt


class TestSynth:
    def test_outputs_and_determinism(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert main(["synth", "--athletes", "2", "--trials", "2",
                         "--seed", "9", "--out", str(out)]) == 0
        files = _tree(a)
        assert Path("manifest.json") in files
        assert Path("ground_truth.csv") in files
        assert sum(1 for f in files if f.suffix == ".motion") == 4
        assert sum(1 for f in files if f.name.endswith(".features.json")) == 4
        assert _tree(b) == files
        for f in files:
            if f.name.startswith("config_"):
                continue  # snapshot embeds the differing --out path
            assert filecmp.cmp(a / f, b / f, shallow=False), f

    def test_corpus_is_loadable(self, pipeline):
        _, corpus, _, _ = pipeline
        loaded = load_corpus(corpus / "manifest.json")
        assert len(loaded) == 3
        assert all(len(v) == 2 for v in loaded.values())

    def test_ground_truth_csv_aligns_with_sidecars(self, pipeline):
        _, corpus, _, _ = pipeline
        rows = read_feature_csv(corpus / "ground_truth.csv")
        assert len(rows) == 6
        assert all(np.isfinite(r["stride_length_mm"]) for r in rows)

    def test_zero_athletes_is_usage_error(self, tmp_path, capsys):
        code = main(["synth", "--athletes", "0", "--out", str(tmp_path / "x")])
        assert code == 1
        assert "usage" in capsys.readouterr().err.lower()


class TestTrain:
    def test_artifacts(self, pipeline):
        _, _, train, _ = pipeline
        assert (train / "checkpoint.pt").exists()
        assert (train / "loss_curves.png").exists()
        report = json.loads((train / "train_report.json").read_text())
        assert report["epochs"] == 3
        assert len(report["losses"]["total"]) == 3
        config = json.loads((train / "config_train.json").read_text())
        assert config["model_dim"] == 16

    def test_missing_manifest_is_runtime_error(self, tmp_path):
        code = main(["train", "--input", str(tmp_path / "absent.json"),
                     "--out", str(tmp_path / "t"), "--epochs", "1"])
        assert code == 2


class TestOptimize:
    def test_result_files(self, pipeline):
        _, _, _, opt = pipeline
        results = sorted(p for p in opt.glob("*.json") if not p.name.startswith("config"))
        assert len(results) == 3
        assert all(p.name.endswith("_r2_s1.json") for p in results)
        loaded = OptimizationResult.load(results[0])
        assert np.linalg.norm(loaded.direction) == pytest.approx(1.0, abs=1e-9)
        assert loaded.config["iterations"] == 2

    def test_lower_third_selection(self, pipeline, tmp_path):
        _, corpus, train, _ = pipeline
        out = tmp_path / "lower"
        assert main(["optimize", "--input", str(corpus / "manifest.json"),
                     "--checkpoint", str(train / "checkpoint.pt"),
                     "--out", str(out), "--athletes", "lower-third",
                     "--perturbations", "4", "--iterations", "1"]) == 0
        results = [p for p in out.glob("*.json") if not p.name.startswith("config")]
        assert len(results) == 1  # 3 athletes // 3

    def test_explicit_athlete_list(self, pipeline, tmp_path):
        _, corpus, train, _ = pipeline
        out = tmp_path / "opt2"
        assert main(["optimize", "--input", str(corpus / "manifest.json"),
                     "--checkpoint", str(train / "checkpoint.pt"),
                     "--out", str(out), "--athletes", "A000,A002",
                     "--perturbations", "4", "--iterations", "1"]) == 0
        names = {p.name for p in out.glob("A*.json")}
        assert names == {"A000_r3_s0.json", "A002_r3_s0.json"}

    def test_unknown_athlete_is_validation_error(self, pipeline, tmp_path):
        _, corpus, train, _ = pipeline
        code = main(["optimize", "--input", str(corpus / "manifest.json"),
                     "--checkpoint", str(train / "checkpoint.pt"),
                     "--out", str(tmp_path / "x"), "--athletes", "NOPE"])
        assert code == 1

    def test_corrupt_checkpoint_is_runtime_error(self, pipeline, tmp_path):
        _, corpus, _, _ = pipeline
        bad = tmp_path / "bad.pt"
        bad.write_bytes(b"junk")
        code = main(["optimize", "--input", str(corpus / "manifest.json"),
                     "--checkpoint", str(bad), "--out", str(tmp_path / "x"),
                     "--perturbations", "4", "--iterations", "1"])
        assert code == 2

    def test_bad_weights_is_validation_error(self, pipeline, tmp_path):
        _, corpus, train, _ = pipeline
        code = main(["optimize", "--input", str(corpus / "manifest.json"),
                     "--checkpoint", str(train / "checkpoint.pt"),
                     "--out", str(tmp_path / "x"), "--weights", "1,2,3"])
        assert code == 1


class TestInterpolateAndSweep:
    def test_interpolate_blends(self, pipeline, tmp_path):
        _, corpus, train, _ = pipeline
        out = tmp_path / "blend"
        assert main(["interpolate", "--input", str(corpus / "manifest.json"),
                     "--checkpoint", str(train / "checkpoint.pt"),
                     "--out", str(out), "--athlete-a", "A000",
                     "--athlete-b", "A001", "--steps", "5"]) == 0
        blends = sorted(out.glob("blend_*.motion"))
        assert len(blends) == 5
        first = read_motion(blends[0])
        assert first.frames.shape == (101, 15, 3)

    def test_dtw_sweep_outputs(self, pipeline, tmp_path):
        _, corpus, train, _ = pipeline
        out = tmp_path / "sweep"
        assert main(["dtw-sweep", "--input", str(corpus / "manifest.json"),
                     "--checkpoint", str(train / "checkpoint.pt"),
                     "--out", str(out), "--steps", "5"]) == 0
        rows = (out / "dtw_sweep.csv").read_text().strip().splitlines()
        assert len(rows) == 1 + 3 * 5  # header + 3 pairs x 5 steps
        summary = json.loads((out / "summary.json").read_text())
        assert 0.0 <= summary["monotone_fraction"] <= 1.0
        assert summary["pairs"] == 3

    def test_features_csv(self, pipeline, tmp_path):
        _, corpus, _, _ = pipeline
        out = tmp_path / "features"
        assert main(["features", "--input", str(corpus / "manifest.json"),
                     "--out", str(out)]) == 0
        rows = read_feature_csv(out / "features.csv")
        assert len(rows) == 6


class TestReport:
    def test_full_report(self, pipeline, tmp_path):
        _, corpus, train, opt = pipeline
        out = tmp_path / "report"
        assert main(["report", "--results", str(opt),
                     "--checkpoint", str(train / "checkpoint.pt"),
                     "--train-report", str(train / "train_report.json"),
                     "--input", str(corpus / "manifest.json"),
                     "--out", str(out)]) == 0
        assert (out / "stats_table.csv").exists()
        assert (out / "stats_seed1.csv").exists()
        assert (out / "loss_curves.png").exists()
        assert (out / "latent_scatter.png").exists()
        assert (out / "features.csv").exists()
        assert list(out.glob("fitness_seed*.png"))
        assert list(out.glob("stick_*.png"))
        table = (out / "stats_table.csv").read_text().splitlines()
        assert len(table) == 9  # header + 8 features

    def test_report_without_results_is_validation_error(self, tmp_path):
        code = main(["report", "--results", str(tmp_path / "empty"),
                     "--out", str(tmp_path / "r")])
        assert code == 1


class TestOptionHandling:
    def test_config_file_merge_and_precedence(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"athletes": 2, "trials": 3, "seed": 8}))
        out = tmp_path / "out"
        assert main(["synth", "--config", str(cfg), "--trials", "1",
                     "--out", str(out)]) == 0
        saved = json.loads((out / "config_synth.json").read_text())
        assert saved["athletes"] == 2   # from config file
        assert saved["trials"] == 1     # CLI wins
        assert saved["seed"] == 8
        motions = list(out.glob("motions/*.motion"))
        assert len(motions) == 2

    def test_unknown_config_key_is_validation_error(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"athletes": 2, "bogus_option": 5}))
        assert main(["synth", "--config", str(cfg),
                     "--out", str(tmp_path / "x")]) == 1

    def test_env_var_sets_default_out(self, tmp_path, monkeypatch):
        monkeypatch.setenv("MOTIONGUIDE_OUT", str(tmp_path / "envroot"))
        assert main(["synth", "--athletes", "1", "--trials", "1"]) == 0
        assert (tmp_path / "envroot" / "synth" / "manifest.json").exists()

    def test_no_arguments_is_usage_error(self, capsys):
        assert main([]) == 1
        assert "usage" in capsys.readouterr().err.lower()

    def test_unknown_flag_is_usage_error(self, capsys):
        assert main(["synth", "--nonsense", "1"]) == 1

    def test_module_entry_point(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "motionguide.cli", "synth", "--athletes", "1",
             "--trials", "1", "--out", str(tmp_path / "o")],
            capture_output=True, text=True, timeout=300,
        )
        assert proc.returncode == 0, proc.stderr
        assert (tmp_path / "o" / "manifest.json").exists()
