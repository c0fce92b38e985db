#!/usr/bin/env python3
"""
Tests for the loss, optimizer, schedule, training loop and checkpoint format
"""
import math
from collections import OrderedDict

import numpy as np
import pytest

from src.autodiff import RngStreams, parameter
from src.datasets import ImageDataset, synthetic_image
from src.errors import DatasetIOError, DimensionError, DivergenceError, FormatError
from src.models.config import RunConfig, TrainConfig
from src.networks import build_model
from src.training import (
    AdamState, Checkpoint, TRACE_COLUMNS, Trainer, adam_step, check_task, cosine_lr, decode_checkpoint,
    encode_checkpoint, load_checkpoint, mse_loss, read_trace, sampler_for, save_checkpoint, train, write_trace,
)


class TestLoss:
    def test_mean_squared_error(self):
        pred = np.array([[1.0, 2.0], [3.0, 4.0]])
        target = np.array([[0.0, 2.0], [3.0, 2.0]])
        assert mse_loss(pred, target).item() == pytest.approx(5.0 / 4.0)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            mse_loss(np.zeros((4, 3)), np.zeros((4, 1)))


class TestSchedule:
    """Cosine annealing from lr0 to lr_min."""

    def setup_method(self):
        self.config = TrainConfig(lr0=1e-3, lr_min=1e-5, iters=100)

    def test_endpoints(self):
        assert cosine_lr(0, self.config) == pytest.approx(1e-3)
        assert cosine_lr(100, self.config) == pytest.approx(1e-5)
        assert cosine_lr(250, self.config) == pytest.approx(1e-5)

    def test_midpoint(self):
        assert cosine_lr(50, self.config) == pytest.approx(0.5 * (1e-3 + 1e-5))

    def test_monotone(self):
        rates = [cosine_lr(t, self.config) for t in range(101)]
        assert all(a >= b for a, b in zip(rates, rates[1:]))

    def test_zero_iterations(self):
        assert cosine_lr(0, TrainConfig(iters=0)) == TrainConfig().lr0

    def test_invalid_schedule(self):
        with pytest.raises(ValueError):
            TrainConfig(lr0=1e-6, lr_min=1e-4)


class TestAdam:
    """Bias-corrected Adam against a hand-written update."""

    def test_two_steps(self):
        config = TrainConfig()
        w = parameter(np.array([1.0, -2.0]), "w")
        state = AdamState.zeros([("w", w)])
        grads = [np.array([0.5, -1.0]), np.array([0.1, 0.3])]
        expected = np.array([1.0, -2.0])
        m = np.zeros(2)
        v = np.zeros(2)
        for t, g in enumerate(grads, 1):
            w.grad = g
            adam_step({"w": w}, state, 0.01, config)
            m = 0.9 * m + 0.1 * g
            v = 0.999 * v + 0.001 * g * g
            expected = expected - 0.01 * (m / (1 - 0.9 ** t)) / (np.sqrt(v / (1 - 0.999 ** t)) + 1e-8)
        assert state.t == 2
        assert np.allclose(w.data, expected, rtol=1e-12, atol=0)

    def test_first_step_moves_by_lr(self):
        w = parameter(np.array([0.0, 0.0]), "w")
        w.grad = np.array([3.0, -0.2])
        adam_step({"w": w}, AdamState(), 0.1)
        assert np.allclose(w.data, [-0.1, 0.1], atol=1e-6)

    def test_small_learning_rate_step(self):
        w = parameter(np.array([1.0]), "w")
        w.grad = np.array([0.5])
        adam_step({"w": w}, AdamState.zeros([("w", w)]), 1e-4)
        assert w.data[0] == pytest.approx(0.9999, abs=1e-10)


def tiny_image_dataset(size: int = 16) -> ImageDataset:
    return ImageDataset(synthetic_image(size, size, seed=5))


class TestTrainingLoop:
    def setup_method(self):
        self.dataset = tiny_image_dataset()
        self.train_config = TrainConfig(lr0=1e-3, lr_min=1e-5, iters=60, batch_size=64, eval_every=20, seed=0)

    def test_loss_decreases(self, tiny_config):
        model = build_model(tiny_config("siren", hidden=[16]))
        result = train(model, self.dataset, self.train_config)
        losses = [row["loss"] for row in result.rows]
        assert len(losses) == 60
        assert np.mean(losses[-10:]) < np.mean(losses[:10])

    def test_trace_rows(self, tiny_config, tmp_path):
        model = build_model(tiny_config("scone"))
        result = train(model, self.dataset, self.train_config)
        frame = result.trace
        assert list(frame.columns) == TRACE_COLUMNS
        assert frame["iter"].tolist() == list(range(1, 61))
        evaluated = frame.dropna(subset=["psnr"])["iter"].tolist()
        assert evaluated == [20, 40, 60]
        assert frame["lr"].iloc[0] == pytest.approx(1e-3)

        path = tmp_path / "metrics.csv"
        write_trace(path, frame)
        assert path.read_text().splitlines()[0] == "iter,lr,loss,psnr,ssim"
        again = read_trace(path)
        assert math.isnan(again["psnr"].iloc[0])
        assert again["psnr"].iloc[19] == pytest.approx(frame["psnr"].iloc[19])

    def test_same_seed_same_run(self, tiny_config):
        runs = []
        for _ in range(2):
            model = build_model(tiny_config("scone"))
            config = self.train_config.model_copy(update={"iters": 10})
            result = train(model, self.dataset, config, evaluate=False)
            runs.append((model.state_arrays(), [row["loss"] for row in result.rows]))
        (first, loss_a), (second, loss_b) = runs
        assert loss_a == loss_b
        assert all(np.array_equal(first[k], second[k]) for k in first)

    def test_divergence(self, tiny_config):
        pixels = synthetic_image(8, 8)
        pixels[:, :, 0] = np.nan
        model = build_model(tiny_config("siren"))
        with pytest.raises(DivergenceError) as info:
            train(model, ImageDataset(pixels), TrainConfig(iters=3, batch_size=16), evaluate=False)
        assert info.value.iteration == 1

    def test_task_mismatch(self, tiny_config):
        model = build_model(tiny_config("siren", in_dim=3, out_dim=1))
        with pytest.raises(DimensionError):
            check_task(model, self.dataset)

    def test_zero_iterations(self, tiny_config):
        model = build_model(tiny_config("scone"))
        before = model.state_arrays()
        result = train(model, self.dataset, TrainConfig(iters=0))
        assert result.rows == [] and result.iteration == 0
        assert all(np.array_equal(before[k], v) for k, v in model.state_arrays().items())


def make_checkpoint(tiny_config, precision: int = 64) -> Checkpoint:
    config = tiny_config("scone")
    streams = RngStreams(0)
    model = build_model(config, streams)
    streams.sampler.uniform(0, 1, 7)
    adam = AdamState.zeros(model.named_parameters())
    adam.t = 3
    for name in adam.m:
        adam.m[name] = np.full(adam.m[name].shape, 0.125)
        adam.v[name] = np.full(adam.v[name].shape, 1.0 / 3.0)
    run = RunConfig(model=config, train=TrainConfig(iters=10), checkpoint_precision=precision)
    return Checkpoint(run, 3, model.state_arrays(), adam, streams.state())


class TestCheckpointFormat:
    """Binary checkpoints round-trip and reject damaged input."""

    def test_round_trip_double(self, tiny_config):
        checkpoint = make_checkpoint(tiny_config)
        decoded = decode_checkpoint(encode_checkpoint(checkpoint))
        assert decoded.iteration == 3
        assert decoded.precision == 64
        assert list(decoded.params) == list(checkpoint.params)
        assert all(np.array_equal(decoded.params[k], v) for k, v in checkpoint.params.items())
        assert decoded.adam.t == 3
        assert np.array_equal(decoded.adam.v["W1"], checkpoint.adam.v["W1"])
        assert decoded.rng_state == checkpoint.rng_state
        assert decoded.run.to_kv_text(exclude=("out",)) == checkpoint.run.to_kv_text(exclude=("out",))

    def test_round_trip_single(self, tiny_config):
        checkpoint = make_checkpoint(tiny_config, precision=32)
        decoded = decode_checkpoint(encode_checkpoint(checkpoint))
        expected = checkpoint.params["W1"].astype(np.float32).astype(np.float64)
        assert np.array_equal(decoded.params["W1"], expected)

    def test_encoding_is_deterministic(self, tiny_config):
        assert encode_checkpoint(make_checkpoint(tiny_config)) == encode_checkpoint(make_checkpoint(tiny_config))

    def test_bad_magic(self, tiny_config):
        data = bytearray(encode_checkpoint(make_checkpoint(tiny_config)))
        data[:4] = b"PNG\x00"
        with pytest.raises(FormatError) as info:
            decode_checkpoint(bytes(data))
        assert info.value.offset == 0

    @pytest.mark.parametrize("keep", [2, 10, 100, -1])
    def test_truncated(self, tiny_config, keep):
        data = encode_checkpoint(make_checkpoint(tiny_config))
        with pytest.raises(FormatError):
            decode_checkpoint(data[:keep])

    def test_trailing_bytes(self, tiny_config):
        data = encode_checkpoint(make_checkpoint(tiny_config))
        with pytest.raises(FormatError):
            decode_checkpoint(data + b"\x00")

    def test_file_round_trip(self, tiny_config, tmp_path):
        path = tmp_path / "checkpoints" / "iter_000003.scn"
        save_checkpoint(path, make_checkpoint(tiny_config))
        loaded = load_checkpoint(path)
        assert loaded.run.out == path.parent
        assert loaded.iteration == 3

    def test_save_load_save_is_byte_identical(self, tiny_config, tmp_path):
        for precision in (64, 32):
            first = tmp_path / f"first_{precision}" / "checkpoint.scn"
            second = tmp_path / f"second_{precision}" / "checkpoint.scn"
            save_checkpoint(first, make_checkpoint(tiny_config, precision=precision))
            save_checkpoint(second, load_checkpoint(first))
            assert second.read_bytes() == first.read_bytes()

    def test_missing_file(self, tmp_path):
        with pytest.raises(DatasetIOError):
            load_checkpoint(tmp_path / "absent.scn")


class TestResume:
    """Continuing from a double-precision checkpoint reproduces the uninterrupted run."""

    def setup_method(self):
        self.dataset = tiny_image_dataset(12)
        self.train_config = TrainConfig(lr0=1e-3, iters=8, batch_size=32, checkpoint_every=4, seed=0)

    def _trainer(self, model, streams, hook=None):
        return Trainer(
            model, sampler_for(self.dataset, 32), self.train_config, streams, on_checkpoint=hook,
        )

    def test_bit_exact(self, tiny_config):
        config = tiny_config("scone")
        run = RunConfig(model=config, train=self.train_config, checkpoint_precision=64)
        saved = {}

        streams = RngStreams(0)
        model = build_model(config, streams)

        def hook(done, adam):
            if done == 4:
                saved["data"] = encode_checkpoint(
                    Checkpoint(run, done, model.state_arrays(), adam, streams.state())
                )

        full = self._trainer(model, streams, hook).run()
        checkpoint = decode_checkpoint(saved["data"])

        resumed_streams = RngStreams(0)
        resumed = build_model(config, resumed_streams)
        resumed.load_state_arrays(checkpoint.params)
        resumed_streams.set_state(checkpoint.rng_state)
        tail = self._trainer(resumed, resumed_streams).run(start=checkpoint.iteration, adam=checkpoint.adam)

        assert [row["iter"] for row in tail.rows] == [5, 6, 7, 8]
        assert [row["loss"] for row in tail.rows] == [row["loss"] for row in full.rows[4:]]
        final, again = model.state_arrays(), resumed.state_arrays()
        assert all(np.array_equal(final[k], again[k]) for k in final)

    def test_hook_fires_every_interval(self, tiny_config):
        config = tiny_config("scone")
        streams = RngStreams(0)
        model = build_model(config, streams)
        moments = OrderedDict()

        def hook(done, adam):
            moments[done] = adam.m["W1"].copy()

        self._trainer(model, streams, hook).run()
        assert list(moments) == [4, 8]
        assert not np.array_equal(moments[4], moments[8])
