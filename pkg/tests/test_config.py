#!/usr/bin/env python3
"""
Tests for run configuration files, settings and option precedence
"""
import importlib
import json
import os
from pathlib import Path

import pytest
from pydantic import ValidationError

import src
from config.settings import Settings
from src.errors import ConfigError, UsageError
from src.main import resolve_run, run_dir_of
from src.models.config import ModelConfig, RunConfig, TrainConfig, parse_kv_text
from src.models.report import EvaluationReport, FrameRow, format_metric


class TestKeyValueFiles:
    """Flat ``key = value`` run configurations."""

    def setup_method(self):
        self.run = RunConfig(
            task="image",
            model=ModelConfig(family="scone", layers=3, hidden=[16, 16, 8], omegas=[40.0, 20.0], seed=7),
            train=TrainConfig(lr0=5e-4, iters=123, seed=7),
            input=Path("data/a.png"),
            out=Path("output/run"),
        )

    def test_round_trip(self):
        again = RunConfig.from_kv_text(self.run.to_kv_text())
        assert again.model_dump() == self.run.model_dump()

    def test_seed_written_once(self):
        lines = [line for line in self.run.to_kv_text().splitlines() if line.startswith("seed ")]
        assert lines == ["seed = 7"]

    def test_text_format(self):
        text = self.run.to_kv_text()
        assert "family = scone\n" in text
        assert "hidden = 16,16,8\n" in text
        assert "omegas = 40.0,20.0\n" in text
        assert "rbm_grid = \n" in text
        assert "learnable_scale = false\n" in text

    def test_comments_and_blanks(self):
        values = parse_kv_text("# header\nlayers = 3  # depth\n\nrbm_grid =\n")
        assert values == {"layers": "3", "rbm_grid": None}

    def test_malformed_line(self):
        with pytest.raises(ConfigError):
            parse_kv_text("layers 3\n")

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            RunConfig.from_flat({"layerz": 3})

    def test_omegas_mismatch(self):
        with pytest.raises(ConfigError) as info:
            RunConfig.from_flat({"family": "scone", "layers": 4, "omegas": "30,20"})
        assert "omegas" in str(info.value)

    def test_precision_checked(self):
        with pytest.raises(ConfigError):
            RunConfig.from_flat({"checkpoint_precision": 16})

    def test_save_and_load(self, tmp_path):
        path = tmp_path / "config.txt"
        self.run.save(path)
        assert RunConfig.load(path).model_dump() == self.run.model_dump()


class TestSettings:
    """Application settings from JSON, .env and environment."""

    def test_defaults(self):
        settings = Settings()
        assert settings.log_level == "WARNING"
        assert settings.threads == 1
        assert settings.checkpoint_precision == 32
        assert settings.sdf.layers == 9
        assert settings.image.lr_for("ffn") == 1e-3
        assert settings.image.lr_for("scone") == 1e-4

    def test_log_level_uppercased(self):
        assert Settings(log_level="debug").log_level == "DEBUG"

    @pytest.mark.parametrize("field,value", [
        ("log_level", "LOUD"), ("checkpoint_precision", 48), ("eval_chunk", 0), ("threads", 0),
    ])
    def test_invalid(self, field, value):
        with pytest.raises(ValidationError):
            Settings(**{field: value})

    def test_environment(self, monkeypatch):
        monkeypatch.setenv("COLLAGE_EVAL_CHUNK", "512")
        monkeypatch.setenv("COLLAGE_CHECKPOINT_PRECISION", "64")
        settings = Settings()
        assert settings.eval_chunk == 512
        assert settings.checkpoint_precision == 64

    def test_load_file(self, tmp_path):
        path = tmp_path / "settings.json"
        path.write_text(json.dumps({"eval_chunk": 99, "image": {"iters": 7}}))
        settings = Settings.load(path)
        assert settings.eval_chunk == 99
        assert settings.image.iters == 7
        assert settings.image.layers == 5

    def test_save_round_trip(self, tmp_path):
        path = tmp_path / "out" / "settings.json"
        Settings(eval_chunk=77).save(path)
        assert Settings.load(path).eval_chunk == 77

    def test_omegas_truncated(self):
        assert Settings().image.omegas_for(3) == [90.0, 60.0]
        assert Settings().sdf.omegas_for(9) == [70.0, 70.0, 60.0, 50.0, 40.0, 40.0, 30.0, 30.0]

    def test_thread_count_from_environment(self, monkeypatch):
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            monkeypatch.delenv(var, raising=False)
        monkeypatch.setenv("COLLAGE_THREADS", "3")
        importlib.reload(src)
        assert os.environ["OMP_NUM_THREADS"] == "3"
        assert os.environ["MKL_NUM_THREADS"] == "3"

    def test_apply_threads_keeps_explicit_variables(self, monkeypatch):
        monkeypatch.delenv("OMP_NUM_THREADS", raising=False)
        monkeypatch.delenv("MKL_NUM_THREADS", raising=False)
        monkeypatch.setenv("OPENBLAS_NUM_THREADS", "7")
        Settings(threads=2).apply_threads()
        assert os.environ["OMP_NUM_THREADS"] == "2"
        assert os.environ["MKL_NUM_THREADS"] == "2"
        assert os.environ["OPENBLAS_NUM_THREADS"] == "7"


class TestResolveRun:
    """Task defaults < checkpoint < config file < flags."""

    def setup_method(self):
        self.settings = Settings(output_dir=Path("/tmp/collage-out"))

    def test_task_defaults(self):
        run = resolve_run("image", self.settings)
        assert (run.model.in_dim, run.model.out_dim) == (2, 3)
        assert run.model.layers == 5
        assert run.model.hidden == [64] * 5
        assert run.model.omegas == [90.0, 60.0, 30.0, 10.0]
        assert run.train.lr0 == 1e-4
        assert run.out == Path("/tmp/collage-out/image")

    def test_sdf_defaults(self):
        run = resolve_run("sdf", self.settings)
        assert (run.model.in_dim, run.model.out_dim) == (3, 1)
        assert run.model.layers == 9
        assert len(run.model.omegas) == 8
        assert run.eval_res == 64

    def test_depth_truncates_schedule(self):
        run = resolve_run("image", self.settings, flags={"layers": 3})
        assert run.model.omegas == [90.0, 60.0]

    def test_ffn_learning_rate(self):
        run = resolve_run("image", self.settings, flags={"family": "ffn"})
        assert run.train.lr0 == 1e-3
        explicit = resolve_run("image", self.settings, flags={"family": "ffn", "lr0": 2e-4})
        assert explicit.train.lr0 == 2e-4

    def test_config_file_then_flags(self, tmp_path):
        path = tmp_path / "run.txt"
        path.write_text("layers = 4\nhidden = 32\niters = 50\nseed = 3\n")
        run = resolve_run("image", self.settings, config_file=path, flags={"iters": 10, "seed": None})
        assert run.model.layers == 4
        assert run.model.hidden == [32] * 4
        assert run.model.omegas == [90.0, 60.0, 30.0]
        assert run.train.iters == 10
        assert run.seed == 3 and run.train.seed == 3

    def test_checkpoint_config_is_lowest_explicit_layer(self):
        base = resolve_run("image", self.settings, flags={"layers": 3, "iters": 40, "seed": 9})
        run = resolve_run("image", self.settings, flags={"iters": 80}, base=base, default_out=Path("/tmp/r"))
        assert run.model.layers == 3
        assert run.train.iters == 80
        assert run.seed == 9
        assert run.out == Path("/tmp/r")

    def test_explicit_omegas_must_match(self):
        with pytest.raises(ConfigError):
            resolve_run("image", self.settings, flags={"layers": 4, "omegas": "30,20"})

    def test_rbm_grid_from_input(self):
        run = resolve_run("image", self.settings, flags={"family": "rbm"}, grid_hint=lambda: (12, 20))
        assert run.model.rbm_grid == (12, 20)

    def test_missing_config_file(self, tmp_path):
        with pytest.raises(UsageError):
            resolve_run("image", self.settings, config_file=tmp_path / "absent.txt")

    def test_run_dir_of_checkpoint(self):
        assert run_dir_of(Path("runs/a/checkpoints/iter_000100.scn")) == Path("runs/a")
        assert run_dir_of(Path("runs/a/checkpoint.scn")) == Path("runs/a")


class TestReports:
    def setup_method(self):
        self.report = EvaluationReport(
            task="video", iteration=10, psnr=30.0, psnr_std=1.5, ssim=0.9, ssim_std=0.01,
            frames=[FrameRow(frame=0, psnr=29.0, ssim=0.89), FrameRow(frame=1, psnr=31.0, ssim=0.91)],
        )

    def test_values_in_order(self):
        assert list(self.report.values()) == ["psnr", "psnr_std", "ssim", "ssim_std"]

    def test_select_keeps_spread(self):
        assert list(self.report.select(["psnr"]).values()) == ["psnr", "psnr_std"]

    def test_frame_table(self):
        table = self.report.frame_table()
        assert list(table.columns) == ["frame", "psnr", "ssim"]
        assert table["psnr"].tolist() == [29.0, 31.0]

    def test_format(self):
        assert format_metric("psnr", float("inf")) == "inf"
        assert format_metric("psnr", 31.234) == "31.23 dB"
        assert format_metric("iou", 0.5) == "0.5000"
        assert format_metric("chamfer", float("nan")) == "-"
