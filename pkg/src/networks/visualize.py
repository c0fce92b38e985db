"""
Hidden-Unit Activation Montages
"""
import math
from pathlib import Path
from typing import List

import numpy as np

from ..datasets.coords import pixel_grid
from ..datasets.images import save_grayscale
from ..errors import DimensionError, UsageError
from .base import CoordinateNetwork

KINDS = ("features", "masks")


def plane_coords(in_dim: int, height: int, width: int, video: bool = False) -> np.ndarray:
    """A 2D slice through the input domain: the image grid, the t = 0 video frame or the z = 0 plane."""
    grid = pixel_grid(height, width)
    if in_dim == 2:
        return grid
    zeros = np.zeros((grid.shape[0], 1))
    if video:
        # (t, y, x) with t at the middle frame
        return np.hstack([zeros, grid[:, 1:2], grid[:, 0:1]])
    return np.hstack([grid, zeros])


def normalize_unit(values: np.ndarray) -> np.ndarray:
    """Per-unit min-max normalization; constant units map to 0."""
    low, high = values.min(), values.max()
    if high == low:
        return np.zeros_like(values)
    return (values - low) / (high - low)


def montage(units: np.ndarray, height: int, width: int) -> np.ndarray:
    """Tile N x D unit responses into a ceil(sqrt(D)) square grid of H x W tiles; empty tiles stay black."""
    if units.shape[0] != height * width:
        raise DimensionError(f"{units.shape[0]} responses for a {height}x{width} grid")
    count = units.shape[1]
    side = math.ceil(math.sqrt(count))
    canvas = np.zeros((side * height, side * width))
    for unit in range(count):
        row, col = divmod(unit, side)
        tile = normalize_unit(units[:, unit]).reshape(height, width)
        canvas[row * height:(row + 1) * height, col * width:(col + 1) * width] = tile
    return canvas


def dump_activations(
    model: CoordinateNetwork,
    height: int,
    width: int,
    kind: str = "features",
    video: bool = False,
) -> List[np.ndarray]:
    """One montage per hidden layer of the model's responses over a coordinate grid."""
    if kind not in KINDS:
        raise UsageError(f"unknown activation kind {kind!r}; expected one of {KINDS}")
    coords = plane_coords(model.config.in_dim, height, width, video)
    result = model.trace(coords)
    layers = result.masks if kind == "masks" else result.features
    if not layers:
        raise UsageError(f"{model.config.family} has no {kind} to dump")
    return [montage(layer.data, height, width) for layer in layers]


def save_montages(directory: Path, montages: List[np.ndarray], prefix: str = "layer") -> List[Path]:
    directory = Path(directory)
    paths = []
    for index, image in enumerate(montages, 1):
        path = directory / f"{prefix}_{index}.png"
        save_grayscale(path, image)
        paths.append(path)
    return paths
