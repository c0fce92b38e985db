"""
Weight Initialization Schemes
"""
import math

import numpy as np

from ..autodiff import Rng

BASIS_BOUND = math.sqrt(0.5)


def siren_first(rng: Rng, fan_out: int, fan_in: int) -> np.ndarray:
    """First-layer SIREN rule: U(-1/fan_in, 1/fan_in)."""
    bound = 1.0 / fan_in
    return rng.uniform(-bound, bound, (fan_out, fan_in))


def siren_hidden(rng: Rng, fan_out: int, fan_in: int, omega: float) -> np.ndarray:
    """Hidden-layer SIREN rule: U(-sqrt(6/fan_in), sqrt(6/fan_in)) / omega."""
    bound = math.sqrt(6.0 / fan_in) / omega
    return rng.uniform(-bound, bound, (fan_out, fan_in))


def fourier_basis(rng: Rng, fan_out: int, fan_in: int) -> np.ndarray:
    """Random projection of a Fourier basis layer: U(-sqrt(1/2), sqrt(1/2))."""
    return rng.uniform(-BASIS_BOUND, BASIS_BOUND, (fan_out, fan_in))


def gaussian_rff(rng: Rng, size: int, fan_in: int, sigma: float) -> np.ndarray:
    """Gaussian random Fourier feature matrix with entries N(0, sigma^2)."""
    return rng.normal(sigma, (size, fan_in))


def fan_in_uniform(rng: Rng, shape, fan_in: int) -> np.ndarray:
    """Default dense-layer rule U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for ReLU bodies."""
    bound = 1.0 / math.sqrt(fan_in)
    return rng.uniform(-bound, bound, shape)
