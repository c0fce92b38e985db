"""
Pixel-Center Coordinate Grids
"""
from dataclasses import dataclass

import numpy as np

from ..autodiff import Tensor, constant
from ..errors import DimensionError


def pixel_centers(n: int) -> np.ndarray:
    """Centers of ``n`` equal cells of [-1, 1]: -1 + (2i + 1) / n."""
    return -1.0 + (2.0 * np.arange(n) + 1.0) / n


def to_index(coords: np.ndarray, n: int) -> np.ndarray:
    """Inverse of ``pixel_centers`` (exact on cell centers)."""
    return np.rint((np.asarray(coords) + 1.0) * n * 0.5 - 0.5).astype(np.int64)


def pixel_grid(height: int, width: int) -> np.ndarray:
    """Row-major (x, y) coordinates of every pixel center, shape (H*W, 2)."""
    ys, xs = np.meshgrid(pixel_centers(height), pixel_centers(width), indexing="ij")
    return np.stack([xs.reshape(-1), ys.reshape(-1)], axis=1)


def video_grid(frames: int, height: int, width: int) -> np.ndarray:
    """Row-major (t, y, x) coordinates of every voxel center, shape (T*H*W, 3)."""
    ts, ys, xs = np.meshgrid(
        pixel_centers(frames), pixel_centers(height), pixel_centers(width), indexing="ij"
    )
    return np.stack([ts.reshape(-1), ys.reshape(-1), xs.reshape(-1)], axis=1)


def cube_centers(resolution: int, extent: float = 0.5) -> np.ndarray:
    """Voxel centers of [-extent, extent]^3 along one axis."""
    return extent * pixel_centers(resolution)


def cube_grid(resolution: int, extent: float = 0.5) -> np.ndarray:
    """Row-major (x, y, z) voxel centers of the evaluation cube, shape (R^3, 3)."""
    axis = cube_centers(resolution, extent)
    xs, ys, zs = np.meshgrid(axis, axis, axis, indexing="ij")
    return np.stack([xs.reshape(-1), ys.reshape(-1), zs.reshape(-1)], axis=1)


@dataclass
class CoordBatch:
    """Coordinates and the targets they should map to."""
    coords: Tensor
    targets: Tensor

    def __post_init__(self):
        if self.coords.shape[0] != self.targets.shape[0]:
            raise DimensionError(
                f"batch has {self.coords.shape[0]} coordinates but {self.targets.shape[0]} targets"
            )

    @classmethod
    def from_arrays(cls, coords: np.ndarray, targets: np.ndarray) -> "CoordBatch":
        return cls(constant(coords), constant(targets))

    def __len__(self) -> int:
        return self.coords.shape[0]
