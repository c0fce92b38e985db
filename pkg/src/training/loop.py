"""
Training Loop

sample -> forward -> MSE -> backward -> Adam with a cosine-annealed rate,
fully determined by the run seed. The loop owns the model exclusively;
evaluations run tape-free on the current parameters.
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Union
import logging
import math

import numpy as np
import pandas as pd

from ..autodiff import Rng, RngStreams
from ..datasets import (
    CoordBatch, ImageDataset, SdfDataset, VideoDataset, image_from_values,
    sample_image, sample_sdf, sample_video,
)
from ..errors import DimensionError, DivergenceError
from ..metrics import frame_metrics, psnr, ssim
from ..models.config import TrainConfig
from ..networks.base import CoordinateNetwork
from .loss import mse_loss
from .optim import AdamState, adam_step, cosine_lr

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["iter", "lr", "loss", "psnr", "ssim"]

Dataset = Union[ImageDataset, VideoDataset, SdfDataset]
Sampler = Callable[[Rng], CoordBatch]
Evaluator = Callable[[CoordinateNetwork], Dict[str, float]]
CheckpointHook = Callable[[int, AdamState], None]
ProgressHook = Callable[[int, float], None]


@dataclass
class TrainResult:
    """Final state of a training run and its metric trace."""
    model: CoordinateNetwork
    iteration: int
    adam: AdamState
    rows: List[Dict[str, float]] = field(default_factory=list)

    @property
    def trace(self) -> pd.DataFrame:
        return trace_frame(self.rows)

    @property
    def final_loss(self) -> float:
        return self.rows[-1]["loss"] if self.rows else math.nan


def trace_frame(rows: List[Dict[str, float]]) -> pd.DataFrame:
    frame = pd.DataFrame(rows, columns=TRACE_COLUMNS)
    frame["iter"] = frame["iter"].astype("int64")
    return frame


def write_trace(path: Path, frame: pd.DataFrame) -> None:
    """CSV with header ``iter,lr,loss,psnr,ssim``; missing metrics are blank."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, na_rep="")


def read_trace(path: Path) -> pd.DataFrame:
    return pd.read_csv(path)


# Task plumbing

def sampler_for(dataset: Dataset, batch_size: int) -> Sampler:
    if isinstance(dataset, ImageDataset):
        return lambda rng: sample_image(dataset, batch_size, rng)
    if isinstance(dataset, VideoDataset):
        return lambda rng: sample_video(dataset, batch_size, rng)
    if isinstance(dataset, SdfDataset):
        return lambda rng: sample_sdf(dataset, batch_size, rng)
    raise DimensionError(f"no sampler for {type(dataset).__name__}")


def stream_for(dataset: Dataset) -> str:
    """SDF batches draw their surface points and noise from the noise stream."""
    return "noise" if isinstance(dataset, SdfDataset) else "sampler"


def evaluator_for(dataset: Dataset, chunk: int = 16384) -> Optional[Evaluator]:
    """Full-grid PSNR/SSIM for images and videos (per-frame means); nothing for SDFs."""
    if isinstance(dataset, ImageDataset):
        def evaluate_image(model: CoordinateNetwork) -> Dict[str, float]:
            values = model.predict(dataset.coords, chunk=chunk)
            image = np.clip(image_from_values(values, dataset.height, dataset.width), 0.0, 1.0)
            return {"psnr": psnr(image, dataset.pixels), "ssim": ssim(image, dataset.pixels)}
        return evaluate_image
    if isinstance(dataset, VideoDataset):
        def evaluate_video(model: CoordinateNetwork) -> Dict[str, float]:
            values = model.predict(dataset.coords, chunk=chunk)
            clip = np.clip(values.reshape(dataset.frames.shape), 0.0, 1.0)
            stats = frame_metrics(clip, dataset.frames)
            return {"psnr": stats.psnr_mean, "ssim": stats.ssim_mean}
        return evaluate_video
    return None


def check_task(model: CoordinateNetwork, dataset: Dataset) -> None:
    expected = {ImageDataset: (2, 3), VideoDataset: (3, 3), SdfDataset: (3, 1)}[type(dataset)]
    got = (model.config.in_dim, model.config.out_dim)
    if got != expected:
        raise DimensionError(
            f"{type(dataset).__name__} needs a {expected[0]} -> {expected[1]} model, got {got[0]} -> {got[1]}"
        )


class Trainer:
    """Runs the optimization loop for one model on one sampler."""

    def __init__(
        self,
        model: CoordinateNetwork,
        sampler: Sampler,
        config: TrainConfig,
        streams: RngStreams,
        stream: str = "sampler",
        evaluate: Optional[Evaluator] = None,
        on_checkpoint: Optional[CheckpointHook] = None,
        on_step: Optional[ProgressHook] = None,
    ):
        self.model = model
        self.sampler = sampler
        self.config = config
        self.streams = streams
        self.stream = stream
        self.evaluate = evaluate
        self.on_checkpoint = on_checkpoint
        self.on_step = on_step
        self.rows: List[Dict[str, float]] = []

    def step(self, t: int, adam: AdamState) -> Dict[str, float]:
        """Iteration ``t`` (0-based): returns its trace row."""
        lr = cosine_lr(t, self.config)
        batch = self.sampler(self.streams[self.stream])
        self.model.zero_grad()
        loss = mse_loss(self.model(batch.coords), batch.targets)
        value = loss.item()
        if not math.isfinite(value):
            raise DivergenceError(t + 1, value)
        loss.backward()
        adam_step(self.model.tensors, adam, lr, self.config)
        return {"iter": t + 1, "lr": lr, "loss": value, "psnr": math.nan, "ssim": math.nan}

    def run(self, start: int = 0, adam: Optional[AdamState] = None) -> TrainResult:
        """Iterations ``start`` .. T-1; resuming passes the checkpointed iteration and optimizer."""
        cfg = self.config
        adam = adam if adam is not None else AdamState.zeros(self.model.named_parameters())
        rows: List[Dict[str, float]] = []
        self.rows = rows

        for t in range(start, cfg.iters):
            row = self.step(t, adam)
            done = t + 1
            if self.evaluate is not None and (done % cfg.eval_every == 0 or done == cfg.iters):
                row.update(self.evaluate(self.model))
                logger.info(f"iter {done}: loss {row['loss']:.4e} psnr {row['psnr']:.2f} dB")
            rows.append(row)
            if self.on_step is not None:
                self.on_step(done, row["loss"])
            if self.on_checkpoint is not None and cfg.checkpoint_every and done % cfg.checkpoint_every == 0:
                self.on_checkpoint(done, adam)

        return TrainResult(self.model, max(start, cfg.iters), adam, rows)


def train(
    model: CoordinateNetwork,
    dataset: Dataset,
    config: TrainConfig,
    streams: Optional[RngStreams] = None,
    evaluate: bool = True,
    chunk: int = 16384,
    **hooks,
) -> TrainResult:
    """Fit ``model`` to ``dataset``; see ``Trainer`` for the hooks."""
    check_task(model, dataset)
    trainer = Trainer(
        model,
        sampler_for(dataset, config.batch_size),
        config,
        streams or RngStreams(config.seed),
        stream=stream_for(dataset),
        evaluate=evaluator_for(dataset, chunk) if evaluate else None,
        **hooks,
    )
    return trainer.run()
