#!/usr/bin/env python3
"""
Sweep the mask activations on one image and compare final PSNR
"""
import json
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional

import typer
from rich.console import Console
from rich.table import Table
from rich.progress import Progress
from rich.panel import Panel

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from config.settings import Settings
from src.main import resolve_run
from src.datasets import image_size
from src.orchestrators.fit_orchestrator import FitOrchestrator

console = Console()

# (label, activation, learnable scale)
VARIANTS = [
    ("sin2", "sin2", False),
    ("sigmoid", "sigmoid", False),
    ("n_tanh", "n_tanh", False),
    ("n_tanh-L", "n_tanh", True),
    ("gauss", "gauss", False),
    ("n_sin", "n_sin", False),
    ("n_cos", "n_cos", False),
]


def run_variant(
    orchestrator: FitOrchestrator,
    settings: Settings,
    image: Path,
    out: Path,
    label: str,
    activation: str,
    learnable: bool,
    extra: Dict[str, Any],
) -> Dict[str, Any]:
    """Fit one variant through the full workflow."""
    start_time = time.time()
    result = {"variant": label, "success": False, "psnr": None, "ssim": None, "error": None}
    try:
        flags = {"input": image, "activation": activation, "learnable_scale": learnable, "out": out / label, **extra}
        run = resolve_run("image", settings, flags=flags)
        fit = orchestrator.fit(run, force=True, show_progress=False)
        if fit.success:
            result.update(success=True, psnr=fit.report.psnr, ssim=fit.report.ssim)
        else:
            result["error"] = fit.error
    except Exception as e:
        result["error"] = str(e)
    result["processing_time"] = time.time() - start_time
    return result


def generate_report(results: List[Dict[str, Any]], baseline: Optional[float]) -> None:
    """Print the sweep table and the PSNR spread."""
    table = Table(title="Activation sweep")
    table.add_column("Variant", style="cyan")
    table.add_column("Status", style="green")
    table.add_column("PSNR (dB)", justify="right")
    table.add_column("SSIM", justify="right")
    table.add_column("Time (s)", justify="right")
    for result in results:
        ok = result["success"]
        table.add_row(
            result["variant"],
            "[green]✓[/green]" if ok else f"[red]✗ {result['error']}[/red]",
            f"{result['psnr']:.2f}" if ok else "-",
            f"{result['ssim']:.4f}" if ok else "-",
            f"{result['processing_time']:.1f}",
        )
    console.print(table)

    scores = [r["psnr"] for r in results if r["success"]]
    if scores:
        summary = f"Spread: {max(scores) - min(scores):.2f} dB over {len(scores)} variants"
        if baseline is not None:
            summary += f"\nRBM baseline: {baseline:.2f} dB; worst variant beats it by {min(scores) - baseline:.2f} dB"
        console.print(Panel(summary, title="Summary", expand=False))


def main(
    image: Path = typer.Option(..., "--input", "-i", help="RGB PNG to fit"),
    out: Path = typer.Option(Path("./output/activation_sweep"), "--out", "-o", help="Sweep directory"),
    iters: Optional[int] = typer.Option(None, "--iters", help="Training iterations per variant"),
    seed: int = typer.Option(0, "--seed", help="Seed shared by every variant"),
    with_rbm: bool = typer.Option(True, "--rbm/--no-rbm", help="Also fit the RBM baseline"),
):
    """Fit every mask activation on one image and report the PSNR spread."""
    settings = Settings.load()
    orchestrator = FitOrchestrator(settings, console)
    extra = {"seed": seed, "iters": iters}

    results = []
    with Progress(console=console) as progress:
        task = progress.add_task("[green]Fitting variants...", total=len(VARIANTS) + int(with_rbm))
        for label, activation, learnable in VARIANTS:
            result = run_variant(orchestrator, settings, image, out, label, activation, learnable, extra)
            results.append(result)
            progress.update(task, advance=1)

        baseline = None
        if with_rbm:
            run = resolve_run(
                "image", settings,
                flags={"input": image, "family": "rbm", "out": out / "rbm", **extra},
                grid_hint=lambda: image_size(image),
            )
            fit = orchestrator.fit(run, force=True, show_progress=False)
            baseline = fit.report.psnr if fit.success else None
            progress.update(task, advance=1)

    generate_report(results, baseline)

    out.mkdir(parents=True, exist_ok=True)
    results_file = out / "sweep_results.json"
    with open(results_file, "w") as f:
        json.dump({"results": results, "rbm_psnr": baseline}, f, indent=2, default=str)
    console.print(f"\n[bold green]Detailed results saved to:[/bold green] {results_file}")


if __name__ == "__main__":
    typer.run(main)
