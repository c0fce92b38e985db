"""
Image Datasets and PNG Input/Output
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Tuple
import logging

import numpy as np
from PIL import Image, UnidentifiedImageError

from ..autodiff import Rng
from ..errors import DatasetIOError, DimensionError, DomainError
from .coords import CoordBatch, pixel_grid

logger = logging.getLogger(__name__)

CHANNELS = 3


@dataclass
class ImageDataset:
    """An RGB image with values in [0, 1] and its pixel-center coordinates."""
    pixels: np.ndarray
    source: str = ""
    _grid: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.float64)
        if self.pixels.ndim != 3 or self.pixels.shape[2] != CHANNELS:
            raise DimensionError(f"image must be H x W x 3, got {self.pixels.shape}")
        self._grid = pixel_grid(self.height, self.width)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def coords(self) -> np.ndarray:
        return self._grid

    @property
    def targets(self) -> np.ndarray:
        return self.pixels.reshape(-1, CHANNELS)

    def __len__(self) -> int:
        return self.height * self.width


def quantize(pixels: np.ndarray) -> np.ndarray:
    """round(v * 255) clamped to [0, 255], as 8-bit values."""
    return np.clip(np.rint(np.asarray(pixels, dtype=np.float64) * 255.0), 0, 255).astype(np.uint8)


def load_image(path: Path) -> ImageDataset:
    """Read an 8-bit RGB PNG; values become v / 255."""
    path = Path(path)
    try:
        with Image.open(path) as img:
            mode = img.mode
            array = np.asarray(img, dtype=np.uint8)
    except (UnidentifiedImageError, OSError) as e:
        raise DatasetIOError(f"cannot read image {path}: {e}") from e
    if mode != "RGB":
        raise DatasetIOError(f"{path}: expected 8-bit RGB, got mode {mode}")
    logger.debug(f"Loaded {path} ({array.shape[1]}x{array.shape[0]})")
    return ImageDataset(array.astype(np.float64) / 255.0, source=str(path))


def image_size(path: Path) -> Tuple[int, int]:
    """(height, width) of an image file without decoding its pixels."""
    path = Path(path)
    try:
        with Image.open(path) as img:
            width, height = img.size
    except (UnidentifiedImageError, OSError) as e:
        raise DatasetIOError(f"cannot read image {path}: {e}") from e
    return height, width


def save_image(path: Path, pixels: np.ndarray) -> None:
    """Write H x W x 3 values in [0, 1] as an 8-bit RGB PNG."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(quantize(pixels)).save(path, format="PNG")


def save_grayscale(path: Path, values: np.ndarray) -> None:
    """Write an H x W array of values in [0, 1] as an 8-bit grayscale PNG."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(quantize(values)).save(path, format="PNG")


def sample_image(dataset: ImageDataset, n: int, rng: Rng, full_grid: bool = False) -> CoordBatch:
    """``n`` uniform pixel draws with replacement, or every pixel once in row-major order."""
    if full_grid:
        return CoordBatch.from_arrays(dataset.coords, dataset.targets)
    if n < 1:
        raise DomainError(f"sample size must be positive, got {n}")
    index = rng.integers(len(dataset), n)
    return CoordBatch.from_arrays(dataset.coords[index], dataset.targets[index])


def image_from_values(values: np.ndarray, height: int, width: int) -> np.ndarray:
    """Reshape row-major predictions back into an H x W x C image."""
    return np.asarray(values).reshape(height, width, -1)
