"""
Trainer Stage
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from rich.console import Console
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn

from .base import BaseStage, StageResult
from .model_builder import ModelState, restore_model
from ..models.config import RunConfig
from ..networks import CoordinateNetwork
from ..training import (
    AdamState, Checkpoint, Trainer, check_task, evaluator_for, load_checkpoint, sampler_for,
    save_checkpoint, stream_for, trace_frame, write_trace,
)

CHECKPOINT_NAME = "checkpoint.scn"
CHECKPOINT_DIR = "checkpoints"
TRACE_NAME = "metrics.csv"


@dataclass
class TrainOutcome:
    """The trained model as reloaded from its final checkpoint."""
    model: CoordinateNetwork
    iteration: int
    checkpoint: Path
    rows: List[Dict[str, float]] = field(default_factory=list)


def checkpoint_path(out: Path, iteration: int) -> Path:
    return Path(out) / CHECKPOINT_DIR / f"iter_{iteration:06d}.scn"


class TrainerStage(BaseStage):
    """Stage that runs the optimization loop and writes checkpoints."""

    def __init__(self, settings, console: Optional[Console] = None):
        super().__init__(settings)
        self.console = console or Console()

    def process(
        self,
        run: RunConfig,
        dataset,
        state: ModelState,
        show_progress: bool = True,
    ) -> StageResult[TrainOutcome]:
        try:
            outcome = self._train(run, dataset, state, show_progress)
            last = outcome.rows[-1]["loss"] if outcome.rows else float("nan")
            self._log_success(f"Trained to iteration {outcome.iteration}, final loss {last:.4e}")
            return StageResult(
                success=True,
                data=outcome,
                metadata={
                    "iteration": outcome.iteration,
                    "final_loss": last,
                    "checkpoint": str(outcome.checkpoint),
                },
            )
        except Exception as e:
            return self._handle_error(e, "Training failed")

    def _checkpoint(self, run: RunConfig, model: CoordinateNetwork, iteration: int, adam: AdamState, streams) -> Checkpoint:
        return Checkpoint(run, iteration, model.state_arrays(), adam, streams.state())

    def _train(self, run: RunConfig, dataset, state: ModelState, show_progress: bool) -> TrainOutcome:
        model = state.model
        check_task(model, dataset)
        chunk = self.settings.eval_chunk
        trainer = Trainer(
            model,
            sampler_for(dataset, run.train.batch_size),
            run.train,
            state.streams,
            stream=stream_for(dataset),
            evaluate=evaluator_for(dataset, chunk),
        )

        def on_checkpoint(done: int, adam: AdamState) -> None:
            path = checkpoint_path(run.out, done)
            save_checkpoint(path, self._checkpoint(run, model, done, adam, state.streams))
            # Keep the trace on disk so an interrupted run can be resumed with its history
            write_trace(Path(run.out) / TRACE_NAME, trace_frame(state.previous_rows + trainer.rows))
            self.logger.info(f"Checkpoint written to {path}")

        trainer.on_checkpoint = on_checkpoint

        total = run.train.iters
        with Progress(
            TextColumn("[bold blue]{task.description}"),
            BarColumn(),
            MofNCompleteColumn(),
            TextColumn("loss {task.fields[loss]}"),
            TimeElapsedColumn(),
            console=self.console,
            transient=True,
            disable=not show_progress,
        ) as progress:
            task = progress.add_task(f"Fitting {run.model.family}", total=total, completed=state.start, loss="-")
            trainer.on_step = lambda done, loss: progress.update(task, completed=done, loss=f"{loss:.3e}")
            result = trainer.run(start=state.start, adam=state.adam)

        path = Path(run.out) / CHECKPOINT_NAME
        save_checkpoint(path, self._checkpoint(run, result.model, result.iteration, result.adam, state.streams))
        reloaded = restore_model(load_checkpoint(path))
        return TrainOutcome(reloaded, result.iteration, path, state.previous_rows + result.rows)
