"""
Model Builder Stage
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from .base import BaseStage, StageResult
from ..autodiff import RngStreams
from ..errors import UsageError
from ..models.config import RunConfig
from ..networks import CoordinateNetwork, build_model
from ..training import AdamState, Checkpoint, load_checkpoint, read_trace


@dataclass
class ModelState:
    """A model ready to train, possibly continuing an earlier run."""
    model: CoordinateNetwork
    streams: RngStreams
    start: int = 0
    adam: Optional[AdamState] = None
    previous_rows: List[Dict[str, float]] = field(default_factory=list)


def restore_model(checkpoint: Checkpoint) -> CoordinateNetwork:
    """Rebuild the network a checkpoint describes and load its tensors."""
    model = build_model(checkpoint.run.model, RngStreams(checkpoint.run.seed))
    model.load_state_arrays(checkpoint.params)
    return model


def previous_trace(checkpoint_path: Path, iteration: int) -> List[Dict[str, float]]:
    """Rows up to ``iteration`` of the metrics CSV next to (or one level above) a checkpoint."""
    checkpoint_path = Path(checkpoint_path)
    for directory in (checkpoint_path.parent, checkpoint_path.parent.parent):
        path = directory / "metrics.csv"
        if path.exists():
            frame = read_trace(path)
            frame = frame[frame["iter"] <= iteration]
            return [
                {k: (float(v) if k != "iter" else int(v)) for k, v in row.items()}
                for row in frame.to_dict(orient="records")
            ]
    return []


class ModelBuilderStage(BaseStage):
    """Stage that initializes a fresh model or restores one from a checkpoint."""

    def process(self, run: RunConfig, resume: Optional[Path] = None) -> StageResult[ModelState]:
        try:
            state = self._resume(run, resume) if resume else self._fresh(run)
            model = state.model
            self._log_success(
                f"{run.model.family} ready at iteration {state.start}: "
                f"{model.count_parameters()} trainable parameters"
            )
            return StageResult(
                success=True,
                data=state,
                metadata={
                    "family": run.model.family,
                    "trainable": model.count_parameters(),
                    "total": model.count_parameters(trainable_only=False),
                    "start": state.start,
                },
            )
        except Exception as e:
            return self._handle_error(e, "Building model failed")

    def _fresh(self, run: RunConfig) -> ModelState:
        streams = RngStreams(run.seed)
        return ModelState(build_model(run.model, streams), streams)

    def _resume(self, run: RunConfig, path: Path) -> ModelState:
        checkpoint = load_checkpoint(path)
        if checkpoint.run.model != run.model:
            raise UsageError(f"checkpoint {path} was written by a different model configuration")
        if checkpoint.run.task != run.task:
            raise UsageError(f"checkpoint {path} belongs to a {checkpoint.run.task} run, not {run.task}")
        if checkpoint.run.seed != run.seed:
            raise UsageError(f"checkpoint was trained with seed {checkpoint.run.seed}, not {run.seed}")
        if checkpoint.iteration > run.train.iters:
            raise UsageError(
                f"checkpoint is at iteration {checkpoint.iteration}, past the {run.train.iters} requested"
            )
        if checkpoint.precision != 64:
            self.logger.warning("Resuming from a 32-bit checkpoint; the continued run is not bit-exact")

        model = restore_model(checkpoint)
        streams = RngStreams(run.seed)
        streams.set_state(checkpoint.rng_state)
        return ModelState(
            model,
            streams,
            start=checkpoint.iteration,
            adam=checkpoint.adam,
            previous_rows=previous_trace(path, checkpoint.iteration),
        )

