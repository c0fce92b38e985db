"""
Video Datasets from Directories of Numbered Frames
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import List
import logging
import re

import numpy as np

from ..autodiff import Rng
from ..errors import DatasetIOError, DimensionError, DomainError, FormatError
from .coords import CoordBatch, video_grid
from .images import CHANNELS, load_image, save_image

logger = logging.getLogger(__name__)

_NUMBER = re.compile(r"(\d+)")


@dataclass
class VideoDataset:
    """T x H x W x 3 frames with (t, y, x) voxel-center coordinates."""
    frames: np.ndarray
    source: str = ""
    _grid: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.frames = np.asarray(self.frames, dtype=np.float64)
        if self.frames.ndim != 4 or self.frames.shape[3] != CHANNELS:
            raise DimensionError(f"video must be T x H x W x 3, got {self.frames.shape}")
        self._grid = video_grid(*self.frames.shape[:3])

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def height(self) -> int:
        return self.frames.shape[1]

    @property
    def width(self) -> int:
        return self.frames.shape[2]

    @property
    def coords(self) -> np.ndarray:
        return self._grid

    @property
    def targets(self) -> np.ndarray:
        return self.frames.reshape(-1, CHANNELS)

    def __len__(self) -> int:
        return self.frames.shape[0] * self.frames.shape[1] * self.frames.shape[2]


def _frame_key(path: Path):
    numbers = _NUMBER.findall(path.stem)
    return (int(numbers[-1]) if numbers else -1, path.name)


def frame_paths(directory: Path) -> List[Path]:
    """PNG frames of a directory ordered by the last number in each file name."""
    directory = Path(directory)
    if not directory.is_dir():
        raise DatasetIOError(f"frame directory not found: {directory}")
    paths = sorted((p for p in directory.iterdir() if p.suffix.lower() == ".png"), key=_frame_key)
    if not paths:
        raise DatasetIOError(f"no PNG frames in {directory}")
    return paths


def load_video(directory: Path) -> VideoDataset:
    """Stack numbered PNG frames; every frame must have the same size."""
    frames = []
    for path in frame_paths(directory):
        image = load_image(path)
        if frames and image.pixels.shape != frames[0].shape:
            raise FormatError(
                f"frame {path.name} is {image.width}x{image.height}, "
                f"expected {frames[0].shape[1]}x{frames[0].shape[0]}"
            )
        frames.append(image.pixels)
    logger.debug(f"Loaded {len(frames)} frames from {directory}")
    return VideoDataset(np.stack(frames), source=str(directory))


def save_video(directory: Path, frames: np.ndarray) -> List[Path]:
    """Write frames as ``frame_0000.png``, ``frame_0001.png``, ..."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for index, frame in enumerate(frames):
        path = directory / f"frame_{index:04d}.png"
        save_image(path, frame)
        paths.append(path)
    return paths


def sample_video(dataset: VideoDataset, n: int, rng: Rng, full_grid: bool = False) -> CoordBatch:
    """Uniform (t, y, x) draws with replacement, or every voxel once in row-major order."""
    if full_grid:
        return CoordBatch.from_arrays(dataset.coords, dataset.targets)
    if n < 1:
        raise DomainError(f"sample size must be positive, got {n}")
    index = rng.integers(len(dataset), n)
    return CoordBatch.from_arrays(dataset.coords[index], dataset.targets[index])
