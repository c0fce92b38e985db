"""
Procedural Test Assets

Small deterministic signals that ship in place of downloaded photos and
scans: a natural-looking image crop, a Siemens star, analytic point clouds
with exact normals and a moving-gradient clip.
"""
import math
from typing import Tuple

import numpy as np

from ..autodiff import Rng
from .coords import pixel_centers

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))
GOLDEN_RATIO_CONJUGATE = (math.sqrt(5.0) - 1.0) / 2.0


def _soft_step(v: np.ndarray, width: float) -> np.ndarray:
    """0 -> 1 ramp of the given width centered on v = 0."""
    return 0.5 * (np.tanh(v / width) + 1.0)


def synthetic_image(height: int = 64, width: int = 64, seed: int = 0) -> np.ndarray:
    """Smooth color gradients, a few soft-edged shapes and a faint texture, values in [0, 1]."""
    rng = Rng(seed, "assets/image")
    ys, xs = np.meshgrid(pixel_centers(height), pixel_centers(width), indexing="ij")
    edge = 2.5 / max(height, width)

    base = rng.uniform(0.2, 0.6, 3)
    tilt = rng.uniform(-0.2, 0.2, (3, 2))
    image = base + tilt[:, 0] * xs[..., None] + tilt[:, 1] * ys[..., None]

    for _ in range(3):
        cx, cy = rng.uniform(-0.6, 0.6, 2)
        radius = rng.uniform(0.15, 0.4)
        color = rng.uniform(0.0, 1.0, 3)
        inside = _soft_step(radius - np.hypot(xs - cx, ys - cy), edge)
        image = image * (1.0 - inside[..., None]) + color * inside[..., None]

    angle = rng.uniform(0.0, math.pi)
    offset = rng.uniform(-0.5, 0.5)
    band = _soft_step(np.cos(angle) * xs + np.sin(angle) * ys - offset, edge)
    image = image * (1.0 - 0.35 * band[..., None])

    frequency = rng.uniform(6.0, 10.0, 2)
    texture = 0.04 * np.sin(math.pi * frequency[0] * xs) * np.cos(math.pi * frequency[1] * ys)
    return np.clip(image + texture[..., None], 0.0, 1.0)


def siemens_star(height: int = 64, width: int = 64, spokes: int = 16) -> np.ndarray:
    """Radial black/white spokes, RGB in [0, 1]; frequency rises toward the center."""
    ys, xs = np.meshgrid(pixel_centers(height), pixel_centers(width), indexing="ij")
    angle = np.arctan2(ys, xs)
    value = 0.5 * (np.sign(np.sin(spokes * angle)) + 1.0)
    value = np.where(np.hypot(xs, ys) > 0.95, 0.5, value)
    return np.repeat(value[..., None], 3, axis=2)


def fibonacci_sphere(n: int = 2048, radius: float = 0.4) -> Tuple[np.ndarray, np.ndarray]:
    """Near-uniform points on a centered sphere with exact outward normals."""
    i = np.arange(n)
    z = 1.0 - (2.0 * i + 1.0) / n
    ring = np.sqrt(1.0 - z * z)
    theta = GOLDEN_ANGLE * i
    normals = np.stack([ring * np.cos(theta), ring * np.sin(theta), z], axis=1)
    return radius * normals, normals


def torus_cloud(n: int = 4096, major: float = 0.3, minor: float = 0.12) -> Tuple[np.ndarray, np.ndarray]:
    """Points on a torus around the z axis with exact outward normals."""
    i = np.arange(n)
    u = 2.0 * math.pi * (i + 0.5) / n
    v = 2.0 * math.pi * np.mod(i * GOLDEN_RATIO_CONJUGATE, 1.0)
    normals = np.stack([np.cos(v) * np.cos(u), np.cos(v) * np.sin(u), np.sin(v)], axis=1)
    centers = np.stack([major * np.cos(u), major * np.sin(u), np.zeros(n)], axis=1)
    return centers + minor * normals, normals


def torus_sdf(queries: np.ndarray, major: float = 0.3, minor: float = 0.12) -> np.ndarray:
    ring = np.hypot(queries[:, 0], queries[:, 1]) - major
    return np.hypot(ring, queries[:, 2]) - minor


def moving_gradient_video(frames: int = 8, height: int = 32, width: int = 32) -> np.ndarray:
    """A diagonal color gradient and a soft disk drifting across the frame, T x H x W x 3."""
    ys, xs = np.meshgrid(pixel_centers(height), pixel_centers(width), indexing="ij")
    clip = np.empty((frames, height, width, 3))
    for t, phase in enumerate(pixel_centers(frames)):
        shift = 0.5 * phase
        clip[t, ..., 0] = 0.5 + 0.4 * np.sin(math.pi * 0.5 * (xs + ys + shift))
        clip[t, ..., 1] = 0.5 + 0.4 * np.cos(math.pi * 0.5 * (xs - shift))
        clip[t, ..., 2] = 0.3 + 0.2 * (ys + 1.0) * 0.5
        disk = _soft_step(0.3 - np.hypot(xs - 0.6 * phase, ys), 0.08)
        clip[t] = clip[t] * (1.0 - disk[..., None]) + 0.9 * disk[..., None]
    return np.clip(clip, 0.0, 1.0)
