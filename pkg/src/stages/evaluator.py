"""
Evaluator Stage
"""
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional
import math

import numpy as np

from .base import BaseStage, StageResult
from .trainer import TRACE_NAME
from ..datasets import ImageDataset, SdfDataset, VideoDataset, cube_grid, sphere_sdf
from ..errors import DimensionError, DomainError, UsageError
from ..metrics import chamfer, eval_sdf_grid, extract_level_set, frame_metrics, iou, occupancy
from ..models.config import RunConfig
from ..models.report import EvaluationReport, FrameRow
from ..networks import CoordinateNetwork
from ..training import check_task, cosine_lr, evaluator_for, trace_frame, write_trace

FRAME_METRICS_NAME = "frame_metrics.csv"
SHAPE_METRICS_NAME = "shape_metrics.csv"


@dataclass
class Evaluation:
    """Report plus the SDF grids it was computed from (shapes only)."""
    report: EvaluationReport
    sdf_grid: Optional[np.ndarray] = None
    reference_grid: Optional[np.ndarray] = None


def ensure_task(model: CoordinateNetwork, dataset) -> None:
    """Model and dataset must describe the same kind of signal."""
    try:
        check_task(model, dataset)
    except DimensionError as e:
        raise UsageError(f"checkpoint does not fit this data: {e}") from e


def reference_grid(dataset: SdfDataset, resolution: int, sphere_radius: Optional[float] = None) -> np.ndarray:
    """Ground-truth SDF grid: exact for the analytic sphere, the kNN-normal rule for clouds."""
    points = cube_grid(resolution)
    if sphere_radius is not None:
        values = sphere_sdf(points, sphere_radius)
    else:
        values = dataset.signed_distance(points)
    return values.reshape(resolution, resolution, resolution)


def evaluate_model(
    model: CoordinateNetwork,
    dataset,
    iteration: int,
    task: str,
    chunk: int = 16384,
    eval_res: int = 64,
    sphere_radius: Optional[float] = None,
) -> Evaluation:
    """Full-grid metrics of ``model`` against ``dataset``."""
    report = EvaluationReport(task=task, iteration=iteration)

    if isinstance(dataset, ImageDataset):
        values = evaluator_for(dataset, chunk)(model)
        report.psnr, report.ssim = values["psnr"], values["ssim"]
        return Evaluation(report)

    if isinstance(dataset, VideoDataset):
        clip = np.clip(model.predict(dataset.coords, chunk=chunk).reshape(dataset.frames.shape), 0.0, 1.0)
        stats = frame_metrics(clip, dataset.frames)
        report.psnr, report.psnr_std = stats.psnr_mean, stats.psnr_std
        report.ssim, report.ssim_std = stats.ssim_mean, stats.ssim_std
        report.frames = [
            FrameRow(frame=i, psnr=float(p), ssim=None if math.isnan(s) else float(s))
            for i, (p, s) in enumerate(zip(stats.psnr, stats.ssim))
        ]
        return Evaluation(report)

    grid = eval_sdf_grid(model, eval_res, chunk=chunk)
    reference = reference_grid(dataset, eval_res, sphere_radius)
    report.iou = iou(occupancy(grid), occupancy(reference))
    try:
        report.chamfer = chamfer(extract_level_set(grid), extract_level_set(reference))
    except DomainError:
        # No zero crossing in one of the grids
        report.chamfer = math.nan
    return Evaluation(report, grid, reference)


def close_trace(rows: List[Dict[str, float]], report: EvaluationReport, run: RunConfig) -> List[Dict[str, float]]:
    """Put the final metrics on the row of the report's iteration, adding that row if training did not run."""
    rows = [dict(row) for row in rows]
    if not rows or rows[-1]["iter"] != report.iteration:
        rows.append({
            "iter": report.iteration,
            "lr": cosine_lr(report.iteration, run.train),
            "loss": math.nan,
            "psnr": math.nan,
            "ssim": math.nan,
        })
    if report.psnr is not None:
        rows[-1]["psnr"] = report.psnr
    if report.ssim is not None:
        rows[-1]["ssim"] = report.ssim
    return rows


class EvaluatorStage(BaseStage):
    """Stage that computes final metrics and writes the metric tables."""

    def process(
        self,
        run: RunConfig,
        dataset,
        model: CoordinateNetwork,
        iteration: int,
        rows: Optional[List[Dict[str, float]]] = None,
        out: Optional[Path] = None,
    ) -> StageResult[Evaluation]:
        try:
            ensure_task(model, dataset)
            evaluation = evaluate_model(
                model,
                dataset,
                iteration,
                run.task,
                chunk=self.settings.eval_chunk,
                eval_res=run.eval_res,
                sphere_radius=run.analytic_sphere,
            )
            report = evaluation.report
            if out is not None:
                self._write(Path(out), run, report, rows or [])
            self._log_success(f"Evaluated {run.task} at iteration {iteration}: {report.values()}")
            return StageResult(success=True, data=evaluation, metadata=report.values())
        except Exception as e:
            return self._handle_error(e, "Evaluation failed")

    def _write(self, out: Path, run: RunConfig, report: EvaluationReport, rows: List[Dict[str, float]]) -> None:
        write_trace(out / TRACE_NAME, trace_frame(close_trace(rows, report, run)))
        if report.frames:
            report.frame_table().to_csv(out / FRAME_METRICS_NAME, index=False, na_rep="")
        if report.iou is not None:
            report.shape_table().to_csv(out / SHAPE_METRICS_NAME, index=False, na_rep="")
