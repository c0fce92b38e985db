"""
Image Quality Metrics: PSNR and SSIM
"""
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import DimensionError, DomainError

WINDOW = 11
WINDOW_SIGMA = 1.5
K1 = 0.01
K2 = 0.03


def _check_pair(a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"images differ in shape: {a.shape} vs {b.shape}")
    return a, b


def psnr(a: np.ndarray, b: np.ndarray, peak: float = 1.0) -> float:
    """10 log10(peak^2 / MSE) over every channel; +inf for identical images."""
    a, b = _check_pair(a, b)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


def gaussian_window(size: int = WINDOW, sigma: float = WINDOW_SIGMA) -> np.ndarray:
    """Normalized 1D Gaussian taps; the 2D window is their outer product."""
    offsets = np.arange(size) - (size - 1) / 2.0
    taps = np.exp(-(offsets ** 2) / (2.0 * sigma * sigma))
    return taps / taps.sum()


def _filter_valid(image: np.ndarray, taps: np.ndarray) -> np.ndarray:
    """Separable 2D correlation keeping only windows that fit inside the image."""
    rows = sliding_window_view(image, taps.size, axis=1) @ taps
    return sliding_window_view(rows, taps.size, axis=0) @ taps


def ssim_map(a: np.ndarray, b: np.ndarray, dynamic_range: float = 1.0) -> np.ndarray:
    """Local SSIM of two single-channel images over every valid 11x11 Gaussian window."""
    a, b = _check_pair(a, b)
    if a.ndim != 2:
        raise DimensionError(f"ssim_map needs a 2D channel, got shape {a.shape}")
    if min(a.shape) < WINDOW:
        raise DomainError(f"image {a.shape} is smaller than the {WINDOW}x{WINDOW} SSIM window")

    taps = gaussian_window()
    c1 = (K1 * dynamic_range) ** 2
    c2 = (K2 * dynamic_range) ** 2

    mu_a = _filter_valid(a, taps)
    mu_b = _filter_valid(b, taps)
    var_a = _filter_valid(a * a, taps) - mu_a * mu_a
    var_b = _filter_valid(b * b, taps) - mu_b * mu_b
    cov = _filter_valid(a * b, taps) - mu_a * mu_b

    numerator = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)
    denominator = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    return numerator / denominator


def ssim(a: np.ndarray, b: np.ndarray, dynamic_range: float = 1.0) -> float:
    """Single-scale SSIM, averaged over windows and then channels."""
    a, b = _check_pair(a, b)
    if a.ndim == 2:
        return float(np.mean(ssim_map(a, b, dynamic_range)))
    if a.ndim != 3:
        raise DimensionError(f"ssim needs H x W or H x W x C images, got shape {a.shape}")
    return float(np.mean([np.mean(ssim_map(a[..., c], b[..., c], dynamic_range)) for c in range(a.shape[2])]))


@dataclass
class FrameStats:
    """Per-frame scores of a video and their spread."""
    psnr: np.ndarray
    ssim: np.ndarray

    @property
    def psnr_mean(self) -> float:
        return float(np.mean(self.psnr))

    @property
    def psnr_std(self) -> float:
        return float(np.std(self.psnr))

    @property
    def ssim_mean(self) -> float:
        return float(np.mean(self.ssim))

    @property
    def ssim_std(self) -> float:
        return float(np.std(self.ssim))


def frame_metrics(a: np.ndarray, b: np.ndarray, with_ssim: bool = True) -> FrameStats:
    """PSNR (and SSIM when frames are large enough) of every frame of T x H x W x C clips."""
    a, b = _check_pair(a, b)
    if a.ndim != 4:
        raise DimensionError(f"videos must be T x H x W x C, got shape {a.shape}")
    psnrs = np.array([psnr(a[t], b[t]) for t in range(a.shape[0])])
    if with_ssim and min(a.shape[1:3]) >= WINDOW:
        ssims = np.array([ssim(a[t], b[t]) for t in range(a.shape[0])])
    else:
        ssims = np.full(a.shape[0], np.nan)
    return FrameStats(psnrs, ssims)
