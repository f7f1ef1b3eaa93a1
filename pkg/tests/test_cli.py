"""CLI surface: subcommands, exit codes, and pipeline/subcommand equality."""

import json

import numpy as np
import pytest

from echokit import GrayImage, save_image
from echokit.cli import main

PHANTOM_SPEC = {
    "width": 48, "height": 48, "cx": 23.5, "cy": 23.5,
    "rx": 17, "ry": 14, "wall": 5, "seed": 3,
}

CONFIG = {
    "input": {"kind": "phantom", "spec": PHANTOM_SPEC},
    "speckle": {"sigma": 0.08, "seed": 5, "floor": 0.05},
    "frac": {"order": 0.5, "mask_size": 3, "eps": 1e-06},
    "glcm": {"levels": 16, "offsets": [[1, 0], [0, 1], [1, 1], [1, -1]],
             "window": 9, "symmetric": True},
    "knn": {"k": 5, "metric": "euclidean", "p": None, "per_class": 60,
            "seed": 8, "min_area": 150, "positive_class": 2},
    "nn": {"enabled": True, "epochs": 150, "learning_rate": 2.0, "seed": 2,
           "init_scale": 0.1, "per_class": 80, "eval_count": 200},
    "output_dir": None,
}


def write_config(tmp_path, doc=CONFIG):
    p = tmp_path / "config.json"
    p.write_text(json.dumps(doc))
    return p


class TestBasicCommands:
    def test_evaluate_identity(self, tmp_path):
        rng = np.random.default_rng(0)
        img = tmp_path / "a.pgm"
        save_image(GrayImage(rng.uniform(0, 1, (16, 16))), img)
        out = tmp_path / "q.json"
        assert main(["evaluate", "--ref", str(img), "--proc", str(img),
                     "--out", str(out)]) == 0
        q = json.loads(out.read_text())
        assert q["psnr_db"] == 99
        assert q["mse"] == 0

    def test_phantom_writes_files(self, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps(PHANTOM_SPEC))
        out = tmp_path / "out"
        assert main(["phantom", "--spec", str(spec), "--out", str(out)]) == 0
        assert (out / "phantom.pgm").is_file()
        assert (out / "mask.pgm").is_file()

    def test_speckle_denoise_deterministic(self, tmp_path):
        rng = np.random.default_rng(1)
        img = tmp_path / "a.pgm"
        save_image(GrayImage(rng.uniform(0, 1, (24, 24))), img)
        outs = []
        for i in (1, 2):
            noisy = tmp_path / f"n{i}.pgm"
            den = tmp_path / f"d{i}.pgm"
            assert main(["speckle", "--in", str(img), "--sigma", "0.2",
                         "--seed", "9", "--out", str(noisy)]) == 0
            assert main(["denoise", "--in", str(noisy), "--order", "0.5",
                         "--mask", "3", "--out", str(den)]) == 0
            outs.append((noisy.read_bytes(), den.read_bytes()))
        assert outs[0] == outs[1]

    def test_features_csv_shape(self, tmp_path):
        rng = np.random.default_rng(2)
        img = tmp_path / "a.pgm"
        save_image(GrayImage(rng.uniform(0, 1, (10, 12))), img)
        out = tmp_path / "f.csv"
        assert main(["features", "--in", str(img), "--levels", "8",
                     "--window", "5", "--out", str(out)]) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "x,y,contrast,homogeneity,entropy,local_homogeneity"
        assert len(lines) == 1 + 10 * 12

    def test_ksweep(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "sweep.csv"
        assert main(["ksweep", "--config", str(cfg), "--k", "1,3,5",
                     "--out", str(out)]) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "k,accuracy,sensitivity,specificity"
        assert len(lines) == 4
        accs = [float(line.split(",")[1]) for line in lines[1:]]
        assert all(0 <= a <= 1 for a in accs)


class TestExitCodes:
    def test_unknown_flag_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["evaluate", "--bogus", "x"])
        assert exc.value.code == 1

    def test_unknown_command_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 1

    def test_segment_with_oversized_k(self, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps(PHANTOM_SPEC))
        out = tmp_path / "ph"
        main(["phantom", "--spec", str(spec), "--out", str(out)])
        code = main(["segment", "--in", str(out / "phantom.pgm"),
                     "--train-mask", str(out / "mask.pgm"),
                     "--k", "500", "--per-class", "10",
                     "--out", str(tmp_path / "m.pgm")])
        assert code == 1

    def test_invalid_config_is_usage_error(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"input": {"kind": "phantom",
                                             "spec": PHANTOM_SPEC},
                                   "unknown_section": 1}))
        assert main(["pipeline", "--config", str(cfg),
                     "--out", str(tmp_path / "o")]) == 1

    def test_missing_file_is_runtime_error(self, tmp_path):
        code = main(["evaluate", "--ref", "/nonexistent/a.pgm",
                     "--proc", "/nonexistent/b.pgm",
                     "--out", str(tmp_path / "q.json")])
        assert code == 2

    def test_corrupt_image_is_runtime_error(self, tmp_path):
        bad = tmp_path / "bad.pgm"
        bad.write_bytes(b"P5\n4 4\n255\nxx")
        code = main(["denoise", "--in", str(bad), "--out",
                     str(tmp_path / "o.pgm")])
        assert code == 2


class TestComposability:
    def test_pipeline_equals_manual_chain(self, tmp_path):
        """Stage artifacts of one pipeline run match the chained subcommands
        byte for byte."""
        cfg_path = write_config(tmp_path)
        run_dir = tmp_path / "run"
        assert main(["pipeline", "--config", str(cfg_path),
                     "--out", str(run_dir)]) == 0

        manual = tmp_path / "manual"
        manual.mkdir()
        assert main(["speckle", "--in", str(run_dir / "clean.pgm"),
                     "--sigma", "0.08", "--seed", "5",
                     "--out", str(manual / "noisy.pgm")]) == 0
        assert main(["denoise", "--in", str(manual / "noisy.pgm"),
                     "--order", "0.5", "--mask", "3",
                     "--out", str(manual / "denoised.pgm")]) == 0
        assert main(["segment", "--in", str(manual / "denoised.pgm"),
                     "--train-mask", str(run_dir / "truth_mask.pgm"),
                     "--k", "5", "--metric", "euclidean",
                     "--per-class", "60", "--seed", "8",
                     "--min-area", "150", "--positive", "2",
                     "--out", str(manual / "knn_mask.pgm")]) == 0
        assert main(["train-nn", "--features", str(run_dir / "nn_train_features.csv"),
                     "--labels", str(run_dir / "nn_train_labels.csv"),
                     "--epochs", "150", "--lr", "2.0", "--seed", "2",
                     "--out", str(manual / "nn_weights.txt")]) == 0
        assert main(["evaluate", "--ref", str(run_dir / "clean.pgm"),
                     "--proc", str(run_dir / "denoised.pgm"),
                     "--out", str(manual / "q.json")]) == 0

        for name in ("noisy.pgm", "denoised.pgm", "knn_mask.pgm", "nn_weights.txt"):
            assert (manual / name).read_bytes() == (run_dir / name).read_bytes(), name
        q = json.loads((manual / "q.json").read_text())
        report = json.loads((run_dir / "report.json").read_text())
        assert q == report["quality"]["denoised_vs_clean"]
