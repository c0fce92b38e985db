"""
Evaluation Report Models
"""
from typing import Any, Dict, List, Optional
import math

import pandas as pd
from pydantic import BaseModel, Field


class FrameRow(BaseModel):
    """Per-frame video metrics."""
    frame: int
    psnr: float
    ssim: Optional[float] = None


class EvaluationReport(BaseModel):
    """Metrics of one model against its ground truth at one iteration."""
    task: str
    iteration: int
    psnr: Optional[float] = None
    ssim: Optional[float] = None
    psnr_std: Optional[float] = None
    ssim_std: Optional[float] = None
    iou: Optional[float] = None
    chamfer: Optional[float] = None
    frames: List[FrameRow] = Field(default_factory=list)

    def values(self) -> Dict[str, float]:
        """The scalar metrics that were computed, in a fixed order."""
        keys = ("psnr", "psnr_std", "ssim", "ssim_std", "iou", "chamfer")
        return {k: getattr(self, k) for k in keys if getattr(self, k) is not None}

    def select(self, names: List[str]) -> "EvaluationReport":
        """Drop every scalar metric not listed in ``names`` (stds follow their mean)."""
        keep = set(names) | {f"{n}_std" for n in names}
        update: Dict[str, Any] = {
            k: None for k in ("psnr", "psnr_std", "ssim", "ssim_std", "iou", "chamfer") if k not in keep
        }
        return self.model_copy(update=update)

    def frame_table(self) -> pd.DataFrame:
        frame = pd.DataFrame([row.model_dump() for row in self.frames], columns=["frame", "psnr", "ssim"])
        return frame

    def shape_table(self) -> pd.DataFrame:
        return pd.DataFrame([{"iter": self.iteration, "iou": self.iou, "chamfer": self.chamfer}])


def format_metric(name: str, value: Optional[float]) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "-"
    if name == "psnr" or name == "psnr_std":
        return "inf" if math.isinf(value) else f"{value:.2f} dB"
    if name == "chamfer":
        return f"{value:.3e}"
    return f"{value:.4f}"
