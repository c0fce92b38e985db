"""
Shape Metrics: SDF Grids, Occupancy IoU, Zero Level Sets and Chamfer Distance
"""
from pathlib import Path
from typing import Callable, Tuple, Union
import logging

import numpy as np

from ..datasets.coords import cube_centers, cube_grid
from ..errors import DimensionError, DomainError, FormatError

logger = logging.getLogger(__name__)

EXTENT = 0.5
DEFAULT_CHUNK = 16384
NN_CHUNK = 512

SdfFunction = Callable[[np.ndarray], np.ndarray]


def eval_sdf_grid(
    model: Union[SdfFunction, object],
    resolution: int,
    chunk: int = DEFAULT_CHUNK,
    extent: float = EXTENT,
) -> np.ndarray:
    """SDF at the voxel centers of [-extent, extent]^3 as an R x R x R array indexed [x, y, z].

    ``model`` is a network (evaluated with ``predict``) or any callable mapping
    N x 3 points to N values. Chunks are evaluated in a fixed order.
    """
    points = cube_grid(resolution, extent)
    if hasattr(model, "predict"):
        values = model.predict(points, chunk=chunk)
    else:
        values = np.concatenate(
            [np.asarray(model(points[s:s + chunk]), dtype=np.float64).reshape(-1)
             for s in range(0, points.shape[0], chunk)]
        )
    return np.asarray(values, dtype=np.float64).reshape(resolution, resolution, resolution)


def occupancy(sdf_grid: np.ndarray) -> np.ndarray:
    """Occupied where SDF <= 0."""
    return np.asarray(sdf_grid) <= 0.0


def iou(occ_a: np.ndarray, occ_b: np.ndarray) -> float:
    """|A and B| / |A or B|; two empty grids count as a perfect match."""
    occ_a = np.asarray(occ_a, dtype=bool)
    occ_b = np.asarray(occ_b, dtype=bool)
    if occ_a.shape != occ_b.shape:
        raise DimensionError(f"occupancy grids differ: {occ_a.shape} vs {occ_b.shape}")
    union = int(np.count_nonzero(occ_a | occ_b))
    if union == 0:
        return 1.0
    return int(np.count_nonzero(occ_a & occ_b)) / union


def extract_level_set(sdf_grid: np.ndarray, extent: float = EXTENT) -> np.ndarray:
    """Zero crossings of an SDF grid as an M x 3 point set in cube coordinates.

    Every axis-aligned edge whose endpoints have strictly opposite signs gives
    one linearly interpolated point; grid points that are exactly zero are
    emitted once each.
    """
    grid = np.asarray(sdf_grid, dtype=np.float64)
    if grid.ndim != 3 or len(set(grid.shape)) != 1:
        raise DimensionError(f"SDF grid must be R x R x R, got {grid.shape}")
    axis_coords = cube_centers(grid.shape[0], extent)

    pieces = []
    for axis in range(3):
        lower = [slice(None)] * 3
        upper = [slice(None)] * 3
        lower[axis] = slice(None, -1)
        upper[axis] = slice(1, None)
        v0 = grid[tuple(lower)]
        v1 = grid[tuple(upper)]
        crossing = ((v0 < 0) & (v1 > 0)) | ((v0 > 0) & (v1 < 0))
        index = np.argwhere(crossing)
        if index.size == 0:
            continue
        a = v0[crossing]
        b = v1[crossing]
        t = a / (a - b)
        points = axis_coords[index]
        start = axis_coords[index[:, axis]]
        stop = axis_coords[index[:, axis] + 1]
        points[:, axis] = start + t * (stop - start)
        pieces.append(points)

    zeros = np.argwhere(grid == 0.0)
    if zeros.size:
        pieces.append(axis_coords[zeros])
    if not pieces:
        raise DomainError("SDF grid has a single sign: no surface to extract")
    return np.concatenate(pieces, axis=0)


def nearest(a: np.ndarray, b: np.ndarray, chunk: int = NN_CHUNK) -> Tuple[np.ndarray, np.ndarray]:
    """For every point of ``a``: index of and squared distance to its nearest point of ``b``.

    Brute force; exact ties go to the lower index.
    """
    index = np.empty(a.shape[0], dtype=np.int64)
    dist = np.empty(a.shape[0])
    for start in range(0, a.shape[0], chunk):
        diff = a[start:start + chunk, None, :] - b[None, :, :]
        squared = np.einsum("abd,abd->ab", diff, diff)
        best = np.argmin(squared, axis=1)
        index[start:start + chunk] = best
        dist[start:start + chunk] = squared[np.arange(best.size), best]
    return index, dist


def chamfer(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric mean of squared nearest-neighbour distances."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise DomainError("chamfer distance of an empty point set")
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise DimensionError(f"point sets must be M x d with equal d, got {a.shape} and {b.shape}")
    _, ab = nearest(a, b)
    _, ba = nearest(b, a)
    return float(np.mean(ab) + np.mean(ba))


def grid_sidecar(path: Path) -> Path:
    return Path(str(path) + ".txt")


def export_grid(path: Path, grid: np.ndarray, extent: float = EXTENT) -> Path:
    """Raw little-endian float32 volume plus a one-line text sidecar."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(np.ascontiguousarray(grid, dtype="<f4").tobytes())
    sidecar = grid_sidecar(path)
    sidecar.write_text(f"resolution={grid.shape[0]} extent={-extent!r},{extent!r}\n", encoding="utf-8")
    return sidecar


def load_grid(path: Path) -> Tuple[np.ndarray, float]:
    """Inverse of ``export_grid``; returns (grid, extent)."""
    path = Path(path)
    try:
        fields = dict(item.split("=", 1) for item in grid_sidecar(path).read_text(encoding="utf-8").split())
        resolution = int(fields["resolution"])
        extent = float(fields["extent"].split(",")[1])
    except (KeyError, ValueError, IndexError) as e:
        raise FormatError(f"bad grid sidecar for {path}: {e}") from e
    raw = path.read_bytes()
    expected = 4 * resolution ** 3
    if len(raw) != expected:
        raise FormatError(f"{path}: expected {expected} bytes for a {resolution}^3 grid", offset=len(raw))
    grid = np.frombuffer(raw, dtype="<f4").astype(np.float64).reshape(resolution, resolution, resolution)
    return grid, extent
