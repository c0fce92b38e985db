# Pipeline stages wrapping the library for the fit workflow and the CLI
from .base import BaseStage, StageResult, StageStatus
from .loader import DataLoaderStage, load_dataset
from .model_builder import ModelBuilderStage, ModelState, previous_trace, restore_model
from .trainer import CHECKPOINT_NAME, TRACE_NAME, TrainerStage, TrainOutcome, checkpoint_path
from .evaluator import Evaluation, EvaluatorStage, ensure_task, evaluate_model, reference_grid
from .renderer import FRAMES_DIR, GRID_NAME, RECONSTRUCTION_NAME, RendererStage, render_image, render_video

__all__ = [
    "BaseStage", "StageResult", "StageStatus",
    "DataLoaderStage", "load_dataset",
    "ModelBuilderStage", "ModelState", "previous_trace", "restore_model",
    "CHECKPOINT_NAME", "TRACE_NAME", "TrainerStage", "TrainOutcome", "checkpoint_path",
    "Evaluation", "EvaluatorStage", "ensure_task", "evaluate_model", "reference_grid",
    "FRAMES_DIR", "GRID_NAME", "RECONSTRUCTION_NAME", "RendererStage", "render_image", "render_video",
]
