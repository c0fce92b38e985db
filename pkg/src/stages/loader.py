"""
Data Loader Stage
"""
from typing import Union

from .base import BaseStage, StageResult
from ..datasets import (
    ImageDataset, SdfDataset, VideoDataset, build_sdf_dataset, fibonacci_sphere, load_image, load_video,
)
from ..errors import UsageError
from ..models.config import RunConfig, Task

Dataset = Union[ImageDataset, VideoDataset, SdfDataset]


def load_dataset(run: RunConfig) -> Dataset:
    """The dataset a run config names: an image, a frame directory, a cloud or the analytic sphere."""
    if run.task == Task.SDF.value and run.analytic_sphere is not None:
        if run.analytic_sphere <= 0:
            raise UsageError(f"sphere radius must be positive, got {run.analytic_sphere}")
        points, normals = fibonacci_sphere(run.sphere_points, run.analytic_sphere)
        # Already inside [-0.5, 0.5]^3; normalizing would rescale the reference radius
        return build_sdf_dataset((points, normals), normalize=False)

    if run.input is None:
        raise UsageError(f"{run.task} run needs an input")
    if run.task == Task.IMAGE.value:
        return load_image(run.input)
    if run.task == Task.VIDEO.value:
        return load_video(run.input)
    return build_sdf_dataset(run.input)


class DataLoaderStage(BaseStage):
    """Stage that reads the training signal for a run."""

    def process(self, run: RunConfig) -> StageResult[Dataset]:
        try:
            dataset = load_dataset(run)
            source = getattr(dataset, "source", "") or "analytic sphere"
            self._log_success(f"Loaded {run.task} data from {source} ({len(dataset)} samples)")
            return StageResult(
                success=True,
                data=dataset,
                metadata={"task": run.task, "source": source, "samples": len(dataset)},
            )
        except Exception as e:
            return self._handle_error(e, "Loading data failed")
