#!/usr/bin/env python3
"""
Write the procedural assets used by the examples and acceptance runs
"""
import sys
from pathlib import Path

import typer
from rich.console import Console

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.datasets import (
    fibonacci_sphere, moving_gradient_video, save_image, save_point_cloud, save_video,
    siemens_star, synthetic_image, torus_cloud,
)

console = Console()


def main(
    out: Path = typer.Option(Path("./data/assets"), "--out", "-o", help="Asset directory"),
    size: int = typer.Option(64, "--size", help="Side of the square test images"),
    seed: int = typer.Option(0, "--seed", help="Seed of the procedural image"),
    points: int = typer.Option(2048, "--points", help="Points per shape"),
    frames: int = typer.Option(8, "--frames", help="Frames of the test video"),
):
    """Write a test image, a Siemens star, sphere and torus clouds and a short video."""
    out.mkdir(parents=True, exist_ok=True)

    save_image(out / "synthetic.png", synthetic_image(size, size, seed))
    save_image(out / "siemens_star.png", siemens_star(size, size))
    save_point_cloud(out / "sphere.xyz", *fibonacci_sphere(points, 0.4))
    save_point_cloud(out / "torus.xyz", *torus_cloud(points))
    save_video(out / "video", moving_gradient_video(frames, 32, 32))

    for path in sorted(out.rglob("*")):
        if path.is_file():
            console.print(f"[green]✓[/green] {path}")


if __name__ == "__main__":
    typer.run(main)
