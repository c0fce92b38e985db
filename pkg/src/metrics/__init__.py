# Reconstruction metrics for images, videos and shapes
from .image import FrameStats, frame_metrics, gaussian_window, psnr, ssim, ssim_map
from .shape import (
    chamfer, eval_sdf_grid, export_grid, extract_level_set, iou, load_grid, nearest, occupancy,
)

__all__ = [
    "FrameStats", "frame_metrics", "gaussian_window", "psnr", "ssim", "ssim_map",
    "chamfer", "eval_sdf_grid", "export_grid", "extract_level_set", "iou", "load_grid", "nearest", "occupancy",
]
