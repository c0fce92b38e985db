#!/usr/bin/env python3
"""
Tests for the command-line interface and its exit codes
"""
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from typer.testing import CliRunner

from src.datasets import load_image
from src.errors import (
    ContractError, DatasetIOError, DimensionError, DivergenceError, DomainError, FormatError, InputError,
    exit_code_for,
)
from src.main import app
from src.training import load_checkpoint, read_trace

runner = CliRunner()

# Flags that keep a CLI fit to a fraction of a second
TINY_FIT = ["--layers", "3", "--hidden", "8", "--batch", "64", "--no-progress"]


def fit_image(image_file: Path, out: Path, *extra: str):
    args = ["fit-image", "--input", str(image_file), "--out", str(out), *TINY_FIT, *extra]
    return runner.invoke(app, args)


class TestFitCommands:
    def test_fit_image_outputs(self, image_file, tmp_path):
        result = fit_image(image_file, tmp_path / "run", "--iters", "20", "--eval-every", "10")
        assert result.exit_code == 0, result.output
        run = tmp_path / "run"
        for name in ("config.txt", "checkpoint.scn", "metrics.csv", "reconstruction.png"):
            assert (run / name).exists()
        trace = read_trace(run / "metrics.csv")
        assert trace["iter"].tolist() == list(range(1, 21))
        assert trace["psnr"].notna().tolist().count(True) == 2
        reconstruction = load_image(run / "reconstruction.png")
        assert (reconstruction.height, reconstruction.width) == (16, 16)

    def test_config_echo_truncates_omegas(self, image_file, tmp_path):
        result = fit_image(image_file, tmp_path / "run", "--iters", "2")
        assert result.exit_code == 0, result.output
        text = (tmp_path / "run" / "config.txt").read_text()
        assert "omegas = 90.0,60.0\n" in text
        assert "hidden = 8,8,8\n" in text

    def test_zero_iterations(self, image_file, tmp_path):
        result = fit_image(image_file, tmp_path / "run", "--iters", "0")
        assert result.exit_code == 0, result.output
        frame = pd.read_csv(tmp_path / "run" / "metrics.csv")
        assert frame["iter"].tolist() == [0]
        assert load_checkpoint(tmp_path / "run" / "checkpoint.scn").iteration == 0

    def test_same_seed_same_bytes(self, image_file, tmp_path):
        for name in ("a", "b"):
            assert fit_image(image_file, tmp_path / name, "--iters", "5", "--seed", "3").exit_code == 0
        first = (tmp_path / "a" / "checkpoint.scn").read_bytes()
        assert (tmp_path / "b" / "checkpoint.scn").read_bytes() == first

    def test_fit_video(self, frames_dir, tmp_path):
        out = tmp_path / "video"
        result = runner.invoke(app, [
            "fit-video", "--frames-dir", str(frames_dir), "--out", str(out), "--model", "siren",
            "--iters", "5", *TINY_FIT,
        ])
        assert result.exit_code == 0, result.output
        assert len(list((out / "recon").glob("frame_*.png"))) == 3
        assert len(pd.read_csv(out / "frame_metrics.csv")) == 3

    def test_fit_sdf_sphere(self, tmp_path):
        out = tmp_path / "sdf"
        result = runner.invoke(app, [
            "fit-sdf", "--analytic-sphere", "0.3", "--sphere-points", "256", "--eval-res", "16",
            "--iters", "10", "--out", str(out), *TINY_FIT,
        ])
        assert result.exit_code == 0, result.output
        shapes = pd.read_csv(out / "shape_metrics.csv")
        assert 0.0 <= shapes["iou"].iloc[0] <= 1.0
        assert (out / "sdf_grid.raw").stat().st_size == 4 * 16 ** 3

    def test_fit_sdf_cloud(self, sphere_file, tmp_path):
        result = runner.invoke(app, [
            "fit-sdf", "--cloud", str(sphere_file), "--eval-res", "8", "--iters", "4",
            "--out", str(tmp_path / "cloud"), *TINY_FIT,
        ])
        assert result.exit_code == 0, result.output

    def test_cloud_and_sphere_together(self, sphere_file, tmp_path):
        result = runner.invoke(app, [
            "fit-sdf", "--cloud", str(sphere_file), "--analytic-sphere", "0.3", "--out", str(tmp_path / "x"),
        ])
        assert result.exit_code == 2


class TestExitCodes:
    """Error classes map to documented exit codes."""

    def test_missing_input_file(self, tmp_path):
        result = fit_image(tmp_path / "absent.png", tmp_path / "run", "--iters", "2")
        assert result.exit_code == 3

    def test_no_input(self, tmp_path):
        result = runner.invoke(app, ["fit-image", "--out", str(tmp_path / "run"), *TINY_FIT])
        assert result.exit_code == 2

    def test_omegas_mismatch(self, image_file, tmp_path):
        result = fit_image(image_file, tmp_path / "run", "--omegas", "30")
        assert result.exit_code == 2

    def test_output_collision(self, image_file, tmp_path):
        assert fit_image(image_file, tmp_path / "run", "--iters", "1").exit_code == 0
        assert fit_image(image_file, tmp_path / "run", "--iters", "1").exit_code == 2
        assert fit_image(image_file, tmp_path / "run", "--iters", "1", "--force").exit_code == 0

    def test_corrupted_checkpoint(self, tmp_path):
        path = tmp_path / "broken.scn"
        path.write_bytes(b"SCN1 but not really a checkpoint")
        result = runner.invoke(app, ["eval", "--checkpoint", str(path)])
        assert result.exit_code == 5

    def test_missing_checkpoint(self, tmp_path):
        result = runner.invoke(app, ["render", "--checkpoint", str(tmp_path / "none.scn"), "--out", str(tmp_path / "r.png")])
        assert result.exit_code == 3

    def test_unknown_family(self, image_file, tmp_path):
        result = fit_image(image_file, tmp_path / "run", "--model", "mlp")
        assert result.exit_code == 2

    @pytest.mark.parametrize("error,code", [
        (DimensionError("shapes"), 2),
        (DomainError("empty"), 2),
        (ContractError("non-scalar root"), 2),
        (InputError("outside"), 2),
        (DatasetIOError("unreadable"), 3),
        (OSError("disk"), 3),
        (DivergenceError(1, float("nan")), 4),
        (FormatError("bad magic"), 5),
        (RuntimeError("other"), 1),
    ])
    def test_error_classes(self, error, code):
        assert exit_code_for(error) == code


class TestCheckpointCommands:
    """eval, render and dump-activations on a fitted run."""

    @pytest.fixture(autouse=True)
    def fitted(self, image_file, tmp_path):
        self.run = tmp_path / "run"
        result = fit_image(image_file, self.run, "--iters", "10", "--eval-every", "5")
        assert result.exit_code == 0, result.output
        self.checkpoint = self.run / "checkpoint.scn"

    def test_render_matches_reconstruction(self, tmp_path):
        target = tmp_path / "render.png"
        result = runner.invoke(app, ["render", "--checkpoint", str(self.checkpoint), "--out", str(target)])
        assert result.exit_code == 0, result.output
        rendered = load_image(target).pixels
        assert np.array_equal(rendered, load_image(self.run / "reconstruction.png").pixels)

    def test_render_other_size(self, tmp_path):
        target = tmp_path / "big.png"
        result = runner.invoke(app, [
            "render", "--checkpoint", str(self.checkpoint), "--out", str(target), "--width", "24", "--height", "20",
        ])
        assert result.exit_code == 0, result.output
        image = load_image(target)
        assert (image.height, image.width) == (20, 24)

    def test_render_rejects_grid_for_images(self, tmp_path):
        result = runner.invoke(app, [
            "render", "--checkpoint", str(self.checkpoint), "--out", str(tmp_path / "x.png"), "--grid", "8",
        ])
        assert result.exit_code == 2

    def test_eval_matches_trace(self, tmp_path):
        report = tmp_path / "report.csv"
        result = runner.invoke(app, ["eval", "--checkpoint", str(self.checkpoint), "--out", str(report)])
        assert result.exit_code == 0, result.output
        frame = pd.read_csv(report)
        assert list(frame.columns) == ["iter", "psnr", "ssim"]
        last = read_trace(self.run / "metrics.csv").iloc[-1]
        assert frame["iter"].iloc[0] == 10
        assert frame["psnr"].iloc[0] == pytest.approx(last["psnr"])
        assert frame["ssim"].iloc[0] == pytest.approx(last["ssim"])

    def test_eval_metric_subset(self, tmp_path):
        report = tmp_path / "report.csv"
        result = runner.invoke(app, [
            "eval", "--checkpoint", str(self.checkpoint), "--metrics", "psnr", "--out", str(report),
        ])
        assert result.exit_code == 0, result.output
        assert list(pd.read_csv(report).columns) == ["iter", "psnr"]

    def test_eval_rejects_shape_metrics(self):
        result = runner.invoke(app, ["eval", "--checkpoint", str(self.checkpoint), "--metrics", "iou"])
        assert result.exit_code == 2

    def test_dump_activations(self, tmp_path):
        out = tmp_path / "acts"
        result = runner.invoke(app, ["dump-activations", "--checkpoint", str(self.checkpoint), "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert sorted(p.name for p in out.iterdir()) == ["layer_1.png", "layer_2.png"]

    def test_dump_masks(self, tmp_path):
        out = tmp_path / "masks"
        result = runner.invoke(app, [
            "dump-activations", "--checkpoint", str(self.checkpoint), "--out", str(out), "--kind", "masks",
        ])
        assert result.exit_code == 0, result.output
        assert len(list(out.glob("layer_*.png"))) == 2


class TestResumeCommand:
    def test_resume_reproduces_full_run(self, image_file, tmp_path):
        full = tmp_path / "full"
        result = fit_image(image_file, full, "--iters", "8", "--checkpoint-every", "4", "--precision", "64")
        assert result.exit_code == 0, result.output

        resumed = tmp_path / "resumed"
        result = runner.invoke(app, [
            "fit-image", "--resume", str(full / "checkpoints" / "iter_000004.scn"),
            "--out", str(resumed), "--no-progress",
        ])
        assert result.exit_code == 0, result.output
        assert (resumed / "checkpoint.scn").read_bytes() == (full / "checkpoint.scn").read_bytes()
        assert read_trace(resumed / "metrics.csv")["iter"].tolist() == list(range(1, 9))

    def test_resume_into_own_directory(self, image_file, tmp_path):
        run = tmp_path / "run"
        result = fit_image(image_file, run, "--iters", "4", "--checkpoint-every", "2", "--precision", "64")
        assert result.exit_code == 0, result.output
        result = runner.invoke(app, [
            "fit-image", "--resume", str(run / "checkpoints" / "iter_000002.scn"), "--iters", "6", "--no-progress",
        ])
        assert result.exit_code == 0, result.output
        assert load_checkpoint(run / "checkpoint.scn").iteration == 6

    def test_resume_wrong_task(self, image_file, tmp_path):
        assert fit_image(image_file, tmp_path / "run", "--iters", "1").exit_code == 0
        result = runner.invoke(app, [
            "fit-sdf", "--resume", str(tmp_path / "run" / "checkpoint.scn"), "--out", str(tmp_path / "sdf"),
        ])
        assert result.exit_code == 2


class TestUtilityCommands:
    def test_gradcheck_siren(self):
        result = runner.invoke(app, ["gradcheck", "--model", "siren", "--seeds", "0"])
        assert result.exit_code == 0, result.output

    def test_gradcheck_one_activation(self):
        result = runner.invoke(app, [
            "gradcheck", "--model", "scone", "--activation", "gauss", "--fixed-scale", "--seeds", "0",
        ])
        assert result.exit_code == 0, result.output

    def test_gradcheck_unknown_family(self):
        assert runner.invoke(app, ["gradcheck", "--model", "mlp"]).exit_code == 2

    def test_compare(self, image_file, tmp_path):
        out = tmp_path / "compare"
        result = runner.invoke(app, [
            "compare", "--input", str(image_file), "--models", "scone,siren", "--seeds", "0,1",
            "--layers", "3", "--hidden", "8", "--iters", "20", "--at", "10", "--out", str(out), "--no-progress",
        ])
        assert result.exit_code == 0, result.output
        frame = pd.read_csv(out / "comparison.csv")
        assert list(frame.columns) == ["family", "seed", "params", "psnr", "ssim", "psnr_at_10"]
        assert frame["family"].tolist() == ["scone", "scone", "siren", "siren"]
        assert frame["psnr_at_10"].notna().all()
        assert (out / "siren_seed1.csv").exists()

    def test_compare_matched_parameters(self, image_file, tmp_path):
        out = tmp_path / "compare"
        result = runner.invoke(app, [
            "compare", "--input", str(image_file), "--models", "scone,siren", "--seeds", "0",
            "--layers", "3", "--hidden", "16", "--iters", "2", "--at", "0", "--match-params",
            "--out", str(out), "--no-progress",
        ])
        assert result.exit_code == 0, result.output
        params = pd.read_csv(out / "comparison.csv").set_index("family")["params"]
        assert params["siren"] <= params["scone"]

    def test_graph(self):
        result = runner.invoke(app, ["graph"])
        assert result.exit_code == 0, result.output
        assert "load_data" in result.output
        assert "finalize" in result.output
