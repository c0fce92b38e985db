"""
Signed Distance Supervision from Oriented Point Clouds

Query points are surface points pushed off the surface by Laplace noise at
two scales (half of every batch each). A query's label is its offset from
the nearest cloud point projected on the averaged normal of its three
nearest cloud points:

    s(q) = (q - p*) . normalize(mean(n_1, n_2, n_3))
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Tuple
import logging

import numpy as np

from ..autodiff import Rng
from ..errors import DatasetIOError, DimensionError, DomainError
from .coords import CoordBatch

logger = logging.getLogger(__name__)

NOISE_SCALES = (1e-1, 1e-3)
NEIGHBOURS = 3
HALF_EXTENT = 0.45
DEGENERATE_NORM = 1e-12
KNN_CHUNK = 256
MAX_REDRAWS = 1000


def load_point_cloud(path: Path) -> Tuple[np.ndarray, np.ndarray]:
    """Read ``x y z nx ny nz`` rows; ``#`` starts a comment. Normals are rescaled to unit length."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise DatasetIOError(f"cannot read point cloud {path}: {e}") from e

    rows = []
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 6:
            raise DatasetIOError(f"{path}:{number}: expected 6 values 'x y z nx ny nz', got {len(fields)}")
        try:
            rows.append([float(v) for v in fields])
        except ValueError as e:
            raise DatasetIOError(f"{path}:{number}: {e}") from e

    if len(rows) < NEIGHBOURS:
        raise DatasetIOError(f"{path}: need at least {NEIGHBOURS} points, got {len(rows)}")
    data = np.asarray(rows, dtype=np.float64)
    return data[:, :3], unit_normals(data[:, 3:], source=str(path))


def save_point_cloud(path: Path, points: np.ndarray, normals: np.ndarray) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["# x y z nx ny nz"]
    lines.extend(" ".join(repr(float(v)) for v in row) for row in np.hstack([points, normals]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def unit_normals(normals: np.ndarray, source: str = "") -> np.ndarray:
    lengths = np.linalg.norm(normals, axis=1)
    if np.any(lengths < DEGENERATE_NORM):
        bad = int(np.argmax(lengths < DEGENERATE_NORM))
        raise DatasetIOError(f"{source or 'cloud'}: point {bad} has a zero normal")
    return normals / lengths[:, None]


def normalize_cloud(points: np.ndarray, half_extent: float = HALF_EXTENT) -> Tuple[np.ndarray, np.ndarray, float]:
    """Center the bounding box at the origin and scale its largest half-extent to ``half_extent``.

    Returns (normalized points, original center, scale factor).
    """
    low, high = points.min(axis=0), points.max(axis=0)
    center = 0.5 * (low + high)
    largest = 0.5 * float(np.max(high - low))
    if largest <= 0:
        raise DomainError("point cloud has zero extent")
    factor = half_extent / largest
    return (points - center) * factor, center, factor


def knn(points: np.ndarray, queries: np.ndarray, k: int = NEIGHBOURS, chunk: int = KNN_CHUNK) -> np.ndarray:
    """Exact brute-force k nearest neighbours; equal distances resolve to the lower index."""
    if k > points.shape[0]:
        raise DomainError(f"asked for {k} neighbours of a {points.shape[0]}-point cloud")
    result = np.empty((queries.shape[0], k), dtype=np.int64)
    for start in range(0, queries.shape[0], chunk):
        block = queries[start:start + chunk]
        diff = block[:, None, :] - points[None, :, :]
        dist = np.einsum("qpd,qpd->qp", diff, diff)
        nearest = np.argpartition(dist, k - 1, axis=1)[:, :k]
        nearest_dist = np.take_along_axis(dist, nearest, axis=1)
        # order by (distance, index)
        order = np.lexsort((nearest, nearest_dist), axis=1)
        result[start:start + chunk] = np.take_along_axis(nearest, order, axis=1)
    return result


def sdf_from_cloud(
    points: np.ndarray, normals: np.ndarray, queries: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Signed distance of each query to the cloud surface.

    Returns (labels, valid); ``valid`` is False where the averaged normal vanishes.
    """
    queries = np.asarray(queries, dtype=np.float64)
    if queries.ndim != 2 or queries.shape[1] != 3:
        raise DimensionError(f"queries must be N x 3, got {queries.shape}")
    neighbours = knn(points, queries)
    averaged = normals[neighbours].mean(axis=1)
    lengths = np.linalg.norm(averaged, axis=1)
    valid = lengths > DEGENERATE_NORM
    direction = averaged / np.where(valid, lengths, 1.0)[:, None]
    offset = queries - points[neighbours[:, 0]]
    labels = np.einsum("nd,nd->n", offset, direction)
    return np.where(valid, labels, 0.0), valid


@dataclass
class SdfDataset:
    """Oriented surface samples inside [-0.5, 0.5]^3 and the noise scales used to leave the surface."""
    points: np.ndarray
    normals: np.ndarray
    scales: Tuple[float, ...] = NOISE_SCALES
    source: str = ""
    center: np.ndarray = field(default_factory=lambda: np.zeros(3))
    scale_factor: float = 1.0
    rng: Optional[Rng] = field(default=None, repr=False)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64)
        self.normals = np.asarray(self.normals, dtype=np.float64)
        if self.points.shape != self.normals.shape or self.points.ndim != 2 or self.points.shape[1] != 3:
            raise DimensionError(f"points {self.points.shape} and normals {self.normals.shape} must both be N x 3")
        if self.points.shape[0] < NEIGHBOURS:
            raise DomainError(f"need at least {NEIGHBOURS} points, got {self.points.shape[0]}")

    def __len__(self) -> int:
        return self.points.shape[0]

    def signed_distance(self, queries: np.ndarray) -> np.ndarray:
        labels, _ = sdf_from_cloud(self.points, self.normals, queries)
        return labels


def build_sdf_dataset(
    source,
    rng: Optional[Rng] = None,
    normalize: bool = True,
    scales: Sequence[float] = NOISE_SCALES,
) -> SdfDataset:
    """Build from a point-cloud file or a ``(points, normals)`` pair."""
    if isinstance(source, (str, Path)):
        points, normals = load_point_cloud(Path(source))
        name = str(source)
    else:
        points, normals = (np.asarray(a, dtype=np.float64) for a in source)
        normals = unit_normals(normals)
        name = "<arrays>"

    center, factor = np.zeros(3), 1.0
    if normalize:
        points, center, factor = normalize_cloud(points)
    logger.debug(f"SDF dataset from {name}: {points.shape[0]} points, scale {factor:.4g}")
    return SdfDataset(points, normals, tuple(scales), name, center, factor, rng)


def _draw(dataset: SdfDataset, count: int, scale: float, rng: Rng) -> Tuple[np.ndarray, np.ndarray]:
    surface = dataset.points[rng.integers(len(dataset), count)]
    return surface, surface + rng.laplace(scale, (count, 3))


def sample_sdf(dataset: SdfDataset, n: int, rng: Optional[Rng] = None) -> CoordBatch:
    """``n`` perturbed surface queries with their signed-distance labels.

    The first ceil(n/2) rows use the coarse scale and the rest the fine one.
    Queries leaving [-1, 1]^3 or with a vanishing averaged normal are redrawn.
    """
    rng = rng or dataset.rng
    if rng is None:
        raise DomainError("sample_sdf needs a random stream")
    if n < 1:
        raise DomainError(f"sample size must be positive, got {n}")

    coarse = (n + 1) // 2
    per_row_scale = np.array([dataset.scales[0]] * coarse + [dataset.scales[-1]] * (n - coarse))
    queries = np.empty((n, 3))
    labels = np.empty(n)
    pending = np.arange(n)
    for _ in range(MAX_REDRAWS):
        for scale in np.unique(per_row_scale[pending]):
            rows = pending[per_row_scale[pending] == scale]
            _, queries[rows] = _draw(dataset, rows.size, float(scale), rng)
        inside = np.all(np.abs(queries[pending]) <= 1.0, axis=1)
        values, valid = sdf_from_cloud(dataset.points, dataset.normals, queries[pending])
        labels[pending] = values
        pending = pending[~(inside & valid)]
        if pending.size == 0:
            break
    else:
        raise DomainError(f"could not draw {pending.size} valid SDF queries")
    return CoordBatch.from_arrays(queries, labels[:, None])


def sphere_sdf(queries: np.ndarray, radius: float) -> np.ndarray:
    """Exact signed distance to a centered sphere."""
    return np.linalg.norm(queries, axis=1) - radius
