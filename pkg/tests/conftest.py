"""
Shared fixtures: small procedural assets written to tmp_path and tiny configs
"""
from pathlib import Path

import numpy as np
import pytest

from config.settings import Settings
from src.datasets import (
    fibonacci_sphere, moving_gradient_video, save_image, save_point_cloud, save_video, synthetic_image,
)
from src.models.config import ModelConfig


@pytest.fixture
def image_file(tmp_path: Path) -> Path:
    """A 16x16 procedural RGB PNG."""
    path = tmp_path / "image.png"
    save_image(path, synthetic_image(16, 16, seed=3))
    return path


@pytest.fixture
def frames_dir(tmp_path: Path) -> Path:
    """Three 12x12 frames of the moving-gradient clip."""
    directory = tmp_path / "frames"
    save_video(directory, moving_gradient_video(3, 12, 12))
    return directory


@pytest.fixture
def sphere_file(tmp_path: Path) -> Path:
    path = tmp_path / "sphere.xyz"
    save_point_cloud(path, *fibonacci_sphere(256, 0.4))
    return path


@pytest.fixture
def settings(tmp_path: Path) -> Settings:
    return Settings(output_dir=tmp_path / "output", eval_chunk=4096)


@pytest.fixture
def tiny_config():
    """Factory for small model configs of any family."""
    def make(family: str = "scone", **overrides) -> ModelConfig:
        values = dict(
            family=family, in_dim=2, out_dim=3, layers=3, hidden=[8],
            omega0=30.0, omegas=[20.0, 10.0], rff_size=8, rff_sigma=4.0, seed=0,
        )
        if family == "rbm":
            values["rbm_grid"] = (8, 8)
        values.update(overrides)
        return ModelConfig(**values)
    return make


@pytest.fixture
def rng_array():
    """Seeded numpy generator for test inputs."""
    return np.random.default_rng(1234)
