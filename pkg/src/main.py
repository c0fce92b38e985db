#!/usr/bin/env python3
"""
Collage INR - Command-Line Interface
"""
import math
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, NoReturn, Optional, Tuple

import numpy as np
import pandas as pd
import typer
from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress
from rich.table import Table
from rich.traceback import Traceback

sys.path.append(str(Path(__file__).parent.parent))
from config.settings import Settings

from .autodiff import RngStreams
from .datasets import ImageDataset, frame_paths, image_size, load_image, synthetic_image
from .errors import CollageError, UsageError, exit_code_for
from .models.config import RunConfig, TASK_DIMS, Task, parse_kv_text
from .models.report import EvaluationReport, format_metric
from .networks import ACTIVATIONS, NETWORKS, build_model, match_width
from .networks.check import CHECK_TOLERANCE, CHECK_WIDTH, check_family
from .networks.visualize import KINDS, dump_activations as dump_layers, save_montages
from .orchestrators.fit_orchestrator import FitOrchestrator
from .stages import DataLoaderStage, EvaluatorStage, RendererStage, restore_model
from .stages.trainer import CHECKPOINT_DIR
from .training import load_checkpoint, train, write_trace
from .utils.run_output import prepare_run_directory

app = typer.Typer(
    name="collage-inr",
    help="Fit images, videos and signed distance fields with coordinate networks",
    add_completion=False,
)
console = Console()

TASK_METRICS = {
    Task.IMAGE.value: ("psnr", "ssim"),
    Task.VIDEO.value: ("psnr", "ssim"),
    Task.SDF.value: ("iou", "chamfer"),
}

# Options shared by the fit commands
ModelOption = typer.Option(None, "--model", "-m", help="Network family: scone, siren, ffn, rbm")
LayersOption = typer.Option(None, "--layers", help="Number of hidden layers")
HiddenOption = typer.Option(None, "--hidden", help="Hidden width, or one width per layer (comma-separated)")
Omega0Option = typer.Option(None, "--omega0", help="First-layer frequency scale")
OmegasOption = typer.Option(None, "--omegas", help="Per-layer basis frequencies (comma-separated, layers-1 values)")
ActivationOption = typer.Option(None, "--activation", help=f"Mask activation: {', '.join(ACTIVATIONS)}")
ScaleOption = typer.Option(None, "--learnable-scale/--fixed-scale", help="Trainable input scale in the mask activation")
LrOption = typer.Option(None, "--lr", help="Initial learning rate")
LrMinOption = typer.Option(None, "--lr-min", help="Final learning rate of the cosine schedule")
ItersOption = typer.Option(None, "--iters", help="Training iterations")
BatchOption = typer.Option(None, "--batch", help="Samples per iteration")
SeedOption = typer.Option(None, "--seed", help="Run seed")
EvalEveryOption = typer.Option(None, "--eval-every", help="Iterations between full-grid evaluations")
CheckpointEveryOption = typer.Option(None, "--checkpoint-every", help="Iterations between mid-run checkpoints (0: none)")
PrecisionOption = typer.Option(None, "--precision", help="Checkpoint precision: 32 or 64 (64 resumes exactly)")
OutOption = typer.Option(None, "--out", "-o", help="Run directory")
ConfigOption = typer.Option(None, "--config", help="key = value run configuration file")
SettingsOption = typer.Option(None, "--settings", help="Settings JSON file")
ResumeOption = typer.Option(None, "--resume", help="Continue from a checkpoint")
ForceOption = typer.Option(False, "--force", help="Overwrite a non-empty output directory")
VerboseOption = typer.Option(False, "--verbose", "-v", help="Verbose output")
DebugOption = typer.Option(False, "--debug", help="Write per-stage debug files into the run directory")
ProgressOption = typer.Option(True, "--progress/--no-progress", help="Show a progress bar")


def _fail(error: BaseException, verbose: bool = False) -> NoReturn:
    """Print an error and exit with the code its class maps to."""
    console.print(f"[bold red]✗ {error}[/bold red]")
    if verbose and error.__traceback__ is not None:
        console.print(Traceback.from_exception(type(error), error, error.__traceback__))
    raise typer.Exit(exit_code_for(error))


def _load_settings(settings_file: Optional[Path], verbose: bool) -> Settings:
    if settings_file is not None and not settings_file.exists():
        raise UsageError(f"settings file not found: {settings_file}")
    try:
        settings = Settings.load(settings_file)
    except ValueError as e:
        raise UsageError(f"invalid settings: {e}") from e
    if verbose and settings.log_level == "WARNING":
        settings.log_level = "INFO"
    return settings


def _split_ints(text: str, what: str) -> List[int]:
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError as e:
        raise UsageError(f"{what} must be comma-separated integers, got {text!r}") from e


def resolve_run(
    task: str,
    settings: Settings,
    config_file: Optional[Path] = None,
    flags: Optional[Dict[str, Any]] = None,
    base: Optional[RunConfig] = None,
    default_out: Optional[Path] = None,
    grid_hint: Optional[Callable[[], Tuple[int, int]]] = None,
) -> RunConfig:
    """Merge task defaults < checkpoint config < ``--config`` file < explicit flags.

    Without explicit omegas the task's schedule is truncated to the depth; without
    an explicit learning rate the family's default is used. RBM grids default to
    the size of the input.
    """
    defaults = settings.defaults_for(task)
    in_dim, out_dim = TASK_DIMS[task]
    values: Dict[str, Any] = {
        "task": task,
        "in_dim": in_dim,
        "out_dim": out_dim,
        "layers": defaults.layers,
        "hidden": [defaults.hidden],
        "omega0": defaults.omega0,
        "rff_sigma": defaults.rff_sigma,
        "rff_size": defaults.rff_size,
        "lr_min": defaults.lr_min,
        "iters": defaults.iters,
        "batch_size": defaults.batch_size,
        "eval_every": defaults.eval_every,
        "checkpoint_precision": settings.checkpoint_precision,
        "out": default_out or settings.output_dir / task,
    }
    if task == Task.SDF.value:
        values["eval_res"] = settings.sdf.eval_res
        values["sphere_points"] = settings.sdf.sphere_points

    explicit: Dict[str, Any] = {}
    if base is not None:
        explicit.update(parse_kv_text(base.to_kv_text(exclude=("out",))))
    if config_file is not None:
        try:
            explicit.update(parse_kv_text(config_file.read_text(encoding="utf-8")))
        except OSError as e:
            raise UsageError(f"cannot read config file {config_file}: {e}") from e
    explicit.update({k: v for k, v in (flags or {}).items() if v is not None})
    explicit = {k: v for k, v in explicit.items() if v is not None}
    values.update(explicit)

    if "omegas" not in explicit:
        try:
            values["omegas"] = defaults.omegas_for(int(values["layers"]))
        except ValueError as e:
            raise UsageError(f"layers must be an integer, got {values['layers']!r}") from e
    if "lr0" not in explicit:
        values["lr0"] = defaults.lr_for(str(values.get("family", "scone")))
    if values.get("family") == "rbm" and "rbm_grid" not in explicit and grid_hint is not None:
        values["rbm_grid"] = list(grid_hint())
    return RunConfig.from_flat(values)


def run_dir_of(checkpoint: Path) -> Path:
    """The run directory a checkpoint was written into."""
    checkpoint = Path(checkpoint)
    parent = checkpoint.parent
    return parent.parent if parent.name == CHECKPOINT_DIR else parent


def _print_config(run: RunConfig) -> None:
    console.print(Panel(run.to_kv_text().rstrip(), title="Resolved configuration", expand=False))


def _print_report(report: EvaluationReport, title: str = "Metrics") -> None:
    table = Table(title=f"{title} (iteration {report.iteration})")
    table.add_column("Metric", style="cyan")
    table.add_column("Value", style="magenta")
    for name, value in report.values().items():
        table.add_row(name, format_metric(name, value))
    console.print(table)
    if report.task == Task.VIDEO.value and report.psnr is not None:
        console.print(
            f"[bold]Per-frame PSNR:[/bold] {format_metric('psnr', report.psnr)} ± "
            f"{format_metric('psnr_std', report.psnr_std)} over {len(report.frames)} frames"
        )


def _fit(
    task: str,
    flags: Dict[str, Any],
    config_file: Optional[Path],
    settings_file: Optional[Path],
    resume: Optional[Path],
    force: bool,
    verbose: bool,
    debug: bool,
    progress: bool,
    grid_hint: Optional[Callable[[], Tuple[int, int]]] = None,
) -> None:
    """Resolve the run configuration and execute the fit workflow."""
    try:
        settings = _load_settings(settings_file, verbose)
        base = None
        default_out = None
        if resume is not None:
            base = load_checkpoint(resume).run
            if base.task != task:
                raise UsageError(f"checkpoint {resume} belongs to a {base.task} run")
            default_out = run_dir_of(resume)
        run = resolve_run(task, settings, config_file, flags, base, default_out, grid_hint)
    except CollageError as e:
        _fail(e, verbose)

    if verbose:
        _print_config(run)
        if resume:
            console.print(f"[bold blue]Resuming from:[/bold blue] {resume}")

    orchestrator = FitOrchestrator(settings, console)
    result = orchestrator.fit(run, resume=resume, force=force, show_progress=progress, debug_enabled=debug)

    if not result.success:
        _fail(result.exception or CollageError(result.error), verbose)

    console.print(f"[bold green]✓ {run.model.family} fitted in {result.total_time:.1f}s[/bold green]")
    if result.report is not None:
        _print_report(result.report)
    console.print(f"[bold green]Run directory:[/bold green] {result.run_dir}")
    if verbose:
        for name, path in result.outputs.items():
            console.print(f"  {name}: {path}")
    if debug:
        console.print(f"[bold cyan]Debug files saved to:[/bold cyan] {result.run_dir / 'debug'}")


def _fit_flags(**kwargs) -> Dict[str, Any]:
    """CLI option names to run configuration keys."""
    renames = {"model": "family", "lr": "lr0", "batch": "batch_size", "precision": "checkpoint_precision"}
    return {renames.get(k, k): v for k, v in kwargs.items()}


@app.command()
def fit_image(
    input: Optional[Path] = typer.Option(None, "--input", "-i", help="RGB PNG to fit"),
    model: Optional[str] = ModelOption,
    layers: Optional[int] = LayersOption,
    hidden: Optional[str] = HiddenOption,
    omega0: Optional[float] = Omega0Option,
    omegas: Optional[str] = OmegasOption,
    activation: Optional[str] = ActivationOption,
    learnable_scale: Optional[bool] = ScaleOption,
    lr: Optional[float] = LrOption,
    lr_min: Optional[float] = LrMinOption,
    iters: Optional[int] = ItersOption,
    batch: Optional[int] = BatchOption,
    seed: Optional[int] = SeedOption,
    eval_every: Optional[int] = EvalEveryOption,
    checkpoint_every: Optional[int] = CheckpointEveryOption,
    precision: Optional[int] = PrecisionOption,
    out: Optional[Path] = OutOption,
    config_file: Optional[Path] = ConfigOption,
    settings_file: Optional[Path] = SettingsOption,
    resume: Optional[Path] = ResumeOption,
    force: bool = ForceOption,
    verbose: bool = VerboseOption,
    debug: bool = DebugOption,
    progress: bool = ProgressOption,
):
    """Fit an RGB image and write checkpoint, reconstruction and metric trace."""
    flags = _fit_flags(
        input=input, model=model, layers=layers, hidden=hidden, omega0=omega0, omegas=omegas,
        activation=activation, learnable_scale=learnable_scale, lr=lr, lr_min=lr_min, iters=iters,
        batch=batch, seed=seed, eval_every=eval_every, checkpoint_every=checkpoint_every,
        precision=precision, out=out,
    )

    def grid_hint() -> Tuple[int, int]:
        if input is None:
            raise UsageError("rbm needs --input to size its mask grid")
        return image_size(input)

    _fit(Task.IMAGE.value, flags, config_file, settings_file, resume, force, verbose, debug, progress, grid_hint)


@app.command()
def fit_video(
    frames_dir: Optional[Path] = typer.Option(None, "--frames-dir", help="Directory of numbered PNG frames"),
    model: Optional[str] = ModelOption,
    layers: Optional[int] = LayersOption,
    hidden: Optional[str] = HiddenOption,
    omega0: Optional[float] = Omega0Option,
    omegas: Optional[str] = OmegasOption,
    activation: Optional[str] = ActivationOption,
    learnable_scale: Optional[bool] = ScaleOption,
    lr: Optional[float] = LrOption,
    lr_min: Optional[float] = LrMinOption,
    iters: Optional[int] = ItersOption,
    batch: Optional[int] = BatchOption,
    seed: Optional[int] = SeedOption,
    eval_every: Optional[int] = EvalEveryOption,
    checkpoint_every: Optional[int] = CheckpointEveryOption,
    precision: Optional[int] = PrecisionOption,
    out: Optional[Path] = OutOption,
    config_file: Optional[Path] = ConfigOption,
    settings_file: Optional[Path] = SettingsOption,
    resume: Optional[Path] = ResumeOption,
    force: bool = ForceOption,
    verbose: bool = VerboseOption,
    debug: bool = DebugOption,
    progress: bool = ProgressOption,
):
    """Fit a video and report per-frame PSNR/SSIM (mean ± std)."""
    flags = _fit_flags(
        input=frames_dir, model=model, layers=layers, hidden=hidden, omega0=omega0, omegas=omegas,
        activation=activation, learnable_scale=learnable_scale, lr=lr, lr_min=lr_min, iters=iters,
        batch=batch, seed=seed, eval_every=eval_every, checkpoint_every=checkpoint_every,
        precision=precision, out=out,
    )
    _fit(Task.VIDEO.value, flags, config_file, settings_file, resume, force, verbose, debug, progress)


@app.command()
def fit_sdf(
    cloud: Optional[Path] = typer.Option(None, "--cloud", help="Oriented point cloud (x y z nx ny nz per line)"),
    analytic_sphere: Optional[float] = typer.Option(
        None, "--analytic-sphere", help="Fit a sampled sphere of this radius instead of a cloud"
    ),
    sphere_points: Optional[int] = typer.Option(None, "--sphere-points", help="Points sampled on the analytic sphere"),
    eval_res: Optional[int] = typer.Option(None, "--eval-res", help="Resolution of the evaluation grid"),
    model: Optional[str] = ModelOption,
    layers: Optional[int] = LayersOption,
    hidden: Optional[str] = HiddenOption,
    omega0: Optional[float] = Omega0Option,
    omegas: Optional[str] = OmegasOption,
    activation: Optional[str] = ActivationOption,
    learnable_scale: Optional[bool] = ScaleOption,
    lr: Optional[float] = LrOption,
    lr_min: Optional[float] = LrMinOption,
    iters: Optional[int] = ItersOption,
    batch: Optional[int] = BatchOption,
    seed: Optional[int] = SeedOption,
    checkpoint_every: Optional[int] = CheckpointEveryOption,
    precision: Optional[int] = PrecisionOption,
    out: Optional[Path] = OutOption,
    config_file: Optional[Path] = ConfigOption,
    settings_file: Optional[Path] = SettingsOption,
    resume: Optional[Path] = ResumeOption,
    force: bool = ForceOption,
    verbose: bool = VerboseOption,
    debug: bool = DebugOption,
    progress: bool = ProgressOption,
):
    """Fit a signed distance field and report IoU and Chamfer distance."""
    if cloud is not None and analytic_sphere is not None:
        _fail(UsageError("pass either --cloud or --analytic-sphere, not both"))
    flags = _fit_flags(
        input=cloud, analytic_sphere=analytic_sphere, sphere_points=sphere_points, eval_res=eval_res,
        model=model, layers=layers, hidden=hidden, omega0=omega0, omegas=omegas,
        activation=activation, learnable_scale=learnable_scale, lr=lr, lr_min=lr_min, iters=iters,
        batch=batch, seed=seed, checkpoint_every=checkpoint_every, precision=precision, out=out,
    )
    _fit(Task.SDF.value, flags, config_file, settings_file, resume, force, verbose, debug, progress)


@app.command("eval")
def evaluate(
    checkpoint: Path = typer.Option(..., "--checkpoint", "-c", help="Checkpoint to evaluate"),
    input: Optional[Path] = typer.Option(None, "--input", "-i", help="Image or frame directory (default: the run's input)"),
    cloud: Optional[Path] = typer.Option(None, "--cloud", help="Point cloud for SDF checkpoints"),
    analytic_sphere: Optional[float] = typer.Option(None, "--analytic-sphere", help="Compare against a sphere of this radius"),
    metrics: Optional[str] = typer.Option(None, "--metrics", help="Comma-separated subset: psnr, ssim, iou, chamfer"),
    eval_res: Optional[int] = typer.Option(None, "--eval-res", help="SDF grid resolution"),
    report_file: Optional[Path] = typer.Option(None, "--out", "-o", help="Also write the metrics as CSV"),
    settings_file: Optional[Path] = SettingsOption,
    verbose: bool = VerboseOption,
):
    """Recompute metrics of a checkpoint without training."""
    try:
        settings = _load_settings(settings_file, verbose)
        ckpt = load_checkpoint(checkpoint)
        run = ckpt.run
        task = run.task

        if task == Task.SDF.value and input is not None:
            raise UsageError("SDF checkpoints are evaluated with --cloud or --analytic-sphere")
        if task != Task.SDF.value and (cloud is not None or analytic_sphere is not None):
            raise UsageError(f"--cloud/--analytic-sphere apply to SDF checkpoints, not {task}")

        update: Dict[str, Any] = {}
        if input is not None:
            update["input"] = input
        if cloud is not None:
            update.update(input=cloud, analytic_sphere=None)
        if analytic_sphere is not None:
            update.update(input=None, analytic_sphere=analytic_sphere)
        if eval_res is not None:
            update["eval_res"] = eval_res
        run = run.model_copy(update=update)

        names = list(TASK_METRICS[task])
        if metrics:
            names = [m.strip().lower() for m in metrics.split(",") if m.strip()]
            unknown = [m for m in names if m not in TASK_METRICS[task]]
            if unknown:
                raise UsageError(f"{task} checkpoints support {', '.join(TASK_METRICS[task])}; got {', '.join(unknown)}")

        data = DataLoaderStage(settings).process(run)
        if not data.success:
            _fail(data.exception, verbose)
        model = restore_model(ckpt)
        result = EvaluatorStage(settings).process(run, data.data, model, ckpt.iteration)
        if not result.success:
            _fail(result.exception, verbose)
    except CollageError as e:
        _fail(e, verbose)

    report = result.data.report.select(names)
    _print_report(report, title=f"Evaluation of {checkpoint.name}")
    if report_file is not None:
        report_file.parent.mkdir(parents=True, exist_ok=True)
        pd.DataFrame([{"iter": report.iteration, **report.values()}]).to_csv(report_file, index=False)
        console.print(f"[bold green]Report saved to:[/bold green] {report_file}")


def _input_size(run: RunConfig) -> Optional[Tuple[int, int]]:
    if run.input is None:
        return None
    path = Path(run.input)
    if run.task == Task.VIDEO.value:
        return image_size(frame_paths(path)[0])
    return image_size(path)


@app.command()
def render(
    checkpoint: Path = typer.Option(..., "--checkpoint", "-c", help="Checkpoint to render"),
    out: Path = typer.Option(..., "--out", "-o", help="PNG path (image), frame directory (video) or raw grid path (SDF)"),
    width: Optional[int] = typer.Option(None, "--width", help="Output width (default: the run's input)"),
    height: Optional[int] = typer.Option(None, "--height", help="Output height (default: the run's input)"),
    frames: Optional[int] = typer.Option(None, "--frames", help="Frame count for video checkpoints"),
    grid: Optional[int] = typer.Option(None, "--grid", help="SDF grid resolution (default: the run's eval-res)"),
    settings_file: Optional[Path] = SettingsOption,
    verbose: bool = VerboseOption,
):
    """Evaluate a checkpoint on a full grid and write the result."""
    try:
        settings = _load_settings(settings_file, verbose)
        ckpt = load_checkpoint(checkpoint)
        run = ckpt.run
        if run.task == Task.SDF.value:
            if width is not None or height is not None or frames is not None:
                raise UsageError("SDF checkpoints render with --grid")
            size: Tuple[int, ...] = (grid or run.eval_res,)
        else:
            if grid is not None:
                raise UsageError("--grid applies to SDF checkpoints")
            if width is None or height is None:
                native = _input_size(run)
                if native is None:
                    raise UsageError("pass --width and --height; the run has no input to take them from")
                height, width = height or native[0], width or native[1]
            size = (height, width)
            if run.task == Task.VIDEO.value:
                if frames is None:
                    if run.input is None:
                        raise UsageError("pass --frames; the run has no input to take it from")
                    frames = len(frame_paths(Path(run.input)))
                size = (frames, height, width)
        if min(size) < 1:
            raise UsageError(f"render size must be positive, got {size}")

        model = restore_model(ckpt)
        result = RendererStage(settings).process(run.task, model, out, size)
        if not result.success:
            _fail(result.exception, verbose)
    except CollageError as e:
        _fail(e, verbose)

    console.print(f"[bold green]✓ Rendered {'x'.join(str(s) for s in size)} {run.task}[/bold green]")
    console.print(f"[bold green]Output saved to:[/bold green] {out}")


@app.command("dump-activations")
def dump_activations(
    checkpoint: Path = typer.Option(..., "--checkpoint", "-c", help="Checkpoint to visualize"),
    out: Path = typer.Option(..., "--out", "-o", help="Directory for the per-layer montages"),
    kind: str = typer.Option("features", "--kind", help=f"What to dump: {', '.join(KINDS)}"),
    width: Optional[int] = typer.Option(None, "--width", help="Tile width (default: the run's input)"),
    height: Optional[int] = typer.Option(None, "--height", help="Tile height (default: the run's input)"),
    force: bool = ForceOption,
    verbose: bool = VerboseOption,
):
    """Write one montage of every hidden unit per layer."""
    try:
        ckpt = load_checkpoint(checkpoint)
        run = ckpt.run
        if width is None or height is None:
            native = run.model.rbm_grid or (_input_size(run) if run.task != Task.SDF.value else None)
            native = tuple(native) if native else (64, 64)
            height, width = height or native[0], width or native[1]
        prepare_run_directory(out, force)
        model = restore_model(ckpt)
        montages = dump_layers(model, height, width, kind, video=run.task == Task.VIDEO.value)
        paths = save_montages(out, montages)
    except CollageError as e:
        _fail(e, verbose)

    console.print(f"[bold green]✓ Wrote {len(paths)} {kind} montages[/bold green] ({height}x{width} tiles)")
    console.print(f"[bold green]Output saved to:[/bold green] {out}")


@app.command()
def gradcheck(
    model: str = typer.Option("all", "--model", "-m", help="Family to check, or 'all'"),
    activation: Optional[str] = typer.Option(None, "--activation", help="Mask activation (default: every one)"),
    learnable_scale: Optional[bool] = typer.Option(
        None, "--learnable-scale/--fixed-scale", help="Mask scale variant (default: both)"
    ),
    seeds: str = typer.Option("0,1,2", "--seeds", help="Comma-separated seeds"),
    width: int = typer.Option(CHECK_WIDTH, "--width", help="Hidden width of the checked networks"),
    verbose: bool = VerboseOption,
):
    """Compare analytic and finite-difference gradients for every family."""
    try:
        families = list(NETWORKS) if model == "all" else [model]
        for family in families:
            if family not in NETWORKS:
                raise UsageError(f"unknown model family {family!r}; expected one of {', '.join(NETWORKS)} or all")
        if activation is not None and activation not in ACTIVATIONS:
            raise UsageError(f"unknown activation {activation!r}; expected one of {', '.join(ACTIVATIONS)}")
        if width < 1:
            raise UsageError("width must be positive")
        seed_list = _split_ints(seeds, "--seeds")
        activations = [activation] if activation else list(ACTIVATIONS)
        scales = [learnable_scale] if learnable_scale is not None else [False, True]

        cases = []
        for family in families:
            if family == "scone":
                cases += [(family, a, s) for a in activations for s in scales]
            else:
                cases.append((family, None, False))

        table = Table(title=f"Gradient check (width {width}, tolerance {CHECK_TOLERANCE:g})")
        table.add_column("Family", style="cyan")
        table.add_column("Activation")
        table.add_column("Scale")
        table.add_column("Params", justify="right")
        table.add_column("Max rel. error", justify="right")
        table.add_column("", justify="center")

        failures = 0
        for family, act, scale in cases:
            errors = []
            params = 0
            for seed in seed_list:
                error, params = check_family(family, act or "sin2", scale, seed, width)
                errors.append(error)
            worst = max(errors)
            ok = worst < CHECK_TOLERANCE
            failures += not ok
            table.add_row(
                family, act or "-", ("learnable" if scale else "fixed") if act else "-",
                str(params), f"{worst:.2e}", "[green]✓[/green]" if ok else "[red]✗[/red]",
            )
    except CollageError as e:
        _fail(e, verbose)

    console.print(table)
    if failures:
        console.print(f"[bold red]✗ {failures} of {len(cases)} checks above {CHECK_TOLERANCE:g}[/bold red]")
        raise typer.Exit(4)
    console.print(f"[bold green]✓ All {len(cases)} checks passed[/bold green]")


@app.command()
def compare(
    input: Optional[Path] = typer.Option(None, "--input", "-i", help="RGB PNG (default: a 64x64 procedural image)"),
    models: str = typer.Option("scone,siren,rbm", "--models", help="Comma-separated families"),
    seeds: str = typer.Option("0,1,2", "--seeds", help="Comma-separated seeds"),
    layers: Optional[int] = LayersOption,
    hidden: Optional[int] = typer.Option(None, "--hidden", help="Hidden width of the first family"),
    iters: Optional[int] = ItersOption,
    at: int = typer.Option(500, "--at", help="Also report PSNR at this iteration"),
    match_params: bool = typer.Option(False, "--match-params", help="Size every family to the first one's parameter count"),
    out: Path = typer.Option(Path("./output/compare"), "--out", "-o", help="Directory for traces and comparison.csv"),
    settings_file: Optional[Path] = SettingsOption,
    force: bool = ForceOption,
    verbose: bool = VerboseOption,
    progress: bool = ProgressOption,
):
    """Train several families over several seeds on one image and tabulate PSNR."""
    try:
        settings = _load_settings(settings_file, verbose)
        families = [m.strip() for m in models.split(",") if m.strip()]
        for family in families:
            if family not in NETWORKS:
                raise UsageError(f"unknown model family {family!r}")
        seed_list = _split_ints(seeds, "--seeds")
        if not families or not seed_list:
            raise UsageError("need at least one family and one seed")

        if input is not None:
            dataset = load_image(input)
        else:
            dataset = ImageDataset(synthetic_image(64, 64, seed=0), source="procedural")
        prepare_run_directory(out, force)

        eval_every = math.gcd(at, settings.image.eval_every) if at > 0 else settings.image.eval_every
        configs = {}
        for family in families:
            flags = {"family": family, "layers": layers, "hidden": [hidden] if hidden else None, "iters": iters, "eval_every": eval_every}
            run = resolve_run(
                Task.IMAGE.value, settings, flags=flags, default_out=out,
                grid_hint=lambda: (dataset.height, dataset.width),
            )
            if match_params and configs:
                target = build_model(next(iter(configs.values())).model).count_parameters()
                run = run.model_copy(update={"model": match_width(run.model, target)})
            configs[family] = run

        rows = []
        with Progress(console=console, transient=True, disable=not progress) as bar:
            task = bar.add_task("Training", total=len(families) * len(seed_list))
            for family, base_run in configs.items():
                for seed in seed_list:
                    run = base_run.model_copy(update={
                        "model": base_run.model.model_copy(update={"seed": seed}),
                        "train": base_run.train.model_copy(update={"seed": seed}),
                    })
                    streams = RngStreams(seed)
                    model = build_model(run.model, streams)
                    result = train(model, dataset, run.train, streams, chunk=settings.eval_chunk)
                    trace = result.trace
                    write_trace(out / f"{family}_seed{seed}.csv", trace)
                    early = trace.loc[trace["iter"] == at, "psnr"]
                    rows.append({
                        "family": family,
                        "seed": seed,
                        "params": model.count_parameters(),
                        "psnr": float(trace["psnr"].iloc[-1]) if len(trace) else math.nan,
                        "ssim": float(trace["ssim"].iloc[-1]) if len(trace) else math.nan,
                        f"psnr_at_{at}": float(early.iloc[0]) if len(early) else math.nan,
                    })
                    bar.advance(task)
    except CollageError as e:
        _fail(e, verbose)

    frame = pd.DataFrame(rows)
    frame.to_csv(out / "comparison.csv", index=False, na_rep="")

    table = Table(title=f"PSNR over seeds {', '.join(map(str, seed_list))} ({dataset.height}x{dataset.width})")
    table.add_column("Family", style="cyan")
    table.add_column("Params", justify="right")
    table.add_column("PSNR (final)", justify="right")
    table.add_column(f"PSNR @ {at}", justify="right")
    table.add_column("SSIM", justify="right")
    for family, group in frame.groupby("family", sort=False):
        table.add_row(
            family,
            str(int(group["params"].iloc[0])),
            f"{group['psnr'].mean():.2f} ± {np.std(group['psnr']):.2f}",
            f"{group[f'psnr_at_{at}'].mean():.2f}",
            f"{group['ssim'].mean():.4f}",
        )
    console.print(table)
    console.print(f"[bold green]Comparison saved to:[/bold green] {out / 'comparison.csv'}")


@app.command()
def graph():
    """Print the fit workflow as a Mermaid diagram."""
    console.print(FitOrchestrator(Settings()).get_mermaid_diagram(), markup=False, highlight=False)


if __name__ == "__main__":
    app()
