"""
Renderer Stage
"""
from pathlib import Path
from typing import List, Optional

import numpy as np

from .base import BaseStage, StageResult
from ..datasets import image_from_values, pixel_grid, save_image, save_video, video_grid
from ..metrics import eval_sdf_grid, export_grid
from ..models.config import Task
from ..networks import CoordinateNetwork

RECONSTRUCTION_NAME = "reconstruction.png"
FRAMES_DIR = "recon"
GRID_NAME = "sdf_grid.raw"


def render_image(model: CoordinateNetwork, height: int, width: int, chunk: int = 16384) -> np.ndarray:
    """H x W x 3 full-grid prediction clipped to [0, 1]."""
    values = model.predict(pixel_grid(height, width), chunk=chunk)
    return np.clip(image_from_values(values, height, width), 0.0, 1.0)


def render_video(model: CoordinateNetwork, frames: int, height: int, width: int, chunk: int = 16384) -> np.ndarray:
    values = model.predict(video_grid(frames, height, width), chunk=chunk)
    return np.clip(values.reshape(frames, height, width, -1), 0.0, 1.0)


class RendererStage(BaseStage):
    """Stage that writes the full-grid reconstruction of a model."""

    def process(
        self,
        task: str,
        model: CoordinateNetwork,
        target: Path,
        size: tuple,
        sdf_grid: Optional[np.ndarray] = None,
    ) -> StageResult[List[Path]]:
        """``size`` is (H, W) for images, (T, H, W) for videos and (R,) for SDF grids.

        ``target`` is a PNG path, a frame directory or a raw grid path respectively.
        """
        try:
            paths = self._render(task, model, Path(target), tuple(size), sdf_grid)
            self._log_success(f"Rendered {task} to {target}")
            return StageResult(success=True, data=paths, metadata={"paths": [str(p) for p in paths]})
        except Exception as e:
            return self._handle_error(e, "Rendering failed")

    def _render(self, task: str, model: CoordinateNetwork, target: Path, size: tuple, sdf_grid) -> List[Path]:
        chunk = self.settings.eval_chunk
        if task == Task.IMAGE.value:
            save_image(target, render_image(model, *size, chunk=chunk))
            return [target]
        if task == Task.VIDEO.value:
            return save_video(target, render_video(model, *size, chunk=chunk))
        grid = sdf_grid if sdf_grid is not None else eval_sdf_grid(model, size[0], chunk=chunk)
        sidecar = export_grid(target, grid)
        return [target, sidecar]
