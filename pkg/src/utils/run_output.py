"""
Run Directory and Debug Output Utilities
"""
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional
import logging
import math

import numpy as np
from pydantic import BaseModel, Field

from ..errors import UsageError

logger = logging.getLogger(__name__)

CONFIG_NAME = "config.txt"
DEBUG_DIR = "debug"
SUMMARY_NAME = "summary.json"


class StageRecord(BaseModel):
    """One stage as written to ``debug/NN_<stage>.json``."""
    stage: str
    step: int
    timestamp: str = Field(default_factory=lambda: datetime.now().isoformat())
    success: bool
    processing_time_ms: Optional[int] = None
    output: Any = None
    context: Dict[str, Any] = Field(default_factory=dict)
    error: Optional[str] = None


class RunSummary(BaseModel):
    """Whole-run outcome as written to ``debug/summary.json``."""
    run_dir: str
    timestamp: str = Field(default_factory=lambda: datetime.now().isoformat())
    total_success: bool
    total_processing_time_ms: int
    stage_results: Dict[str, Dict[str, Any]]


def prepare_run_directory(out: Path, force: bool = False, resume: Optional[Path] = None) -> Path:
    """Create ``out``; refuse a non-empty one unless forced or resuming from a checkpoint inside it."""
    out = Path(out)
    if out.exists() and not out.is_dir():
        raise UsageError(f"output path {out} exists and is not a directory")
    if out.exists() and any(out.iterdir()) and not force:
        inside = resume is not None and out.resolve() in Path(resume).resolve().parents
        if not inside:
            raise UsageError(f"output directory {out} is not empty; pass --force to overwrite")
    out.mkdir(parents=True, exist_ok=True)
    return out


def create_debug_directory(run_dir: Path) -> Path:
    debug_dir = Path(run_dir) / DEBUG_DIR
    debug_dir.mkdir(parents=True, exist_ok=True)
    return debug_dir


def save_stage_debug(
    debug_dir: Path,
    stage_name: str,
    step_number: int,
    success: bool,
    output_data: Any,
    context: Optional[Dict[str, Any]] = None,
    error: Optional[str] = None,
    processing_time: Optional[float] = None,
) -> Optional[Path]:
    """Write one stage record; a failure here is logged and never fails the run."""
    record = StageRecord(
        stage=stage_name,
        step=step_number,
        success=success,
        processing_time_ms=round(processing_time * 1000) if processing_time else None,
        output=to_jsonable(output_data),
        context=to_jsonable(context or {}),
        error=error,
    )
    return _write(Path(debug_dir) / f"{step_number:02d}_{stage_name}.json", record)


def save_debug_summary(
    debug_dir: Path,
    run_dir: Path,
    total_success: bool,
    total_time: float,
    stage_results: Dict[str, Dict[str, Any]],
) -> Optional[Path]:
    summary = RunSummary(
        run_dir=str(run_dir),
        total_success=total_success,
        total_processing_time_ms=round(total_time * 1000),
        stage_results={
            stage: {
                "success": result.get("success", False),
                "processing_time_ms": result.get("processing_time_ms"),
                "error": result.get("error"),
            }
            for stage, result in stage_results.items()
        },
    )
    return _write(Path(debug_dir) / SUMMARY_NAME, summary)


def _write(path: Path, record: BaseModel) -> Optional[Path]:
    try:
        path.write_text(record.model_dump_json(indent=2), encoding="utf-8")
        return path
    except (OSError, ValueError) as e:
        logger.warning(f"Failed to save debug output {path.name}: {e}")
        return None


def to_jsonable(obj: Any) -> Any:
    """Stage metadata to plain JSON values: numpy scalars unwrapped, NaN/inf as strings, paths as text."""
    if isinstance(obj, BaseModel):
        return to_jsonable(obj.model_dump())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return str(obj)
