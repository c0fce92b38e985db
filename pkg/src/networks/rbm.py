"""
Random Binary Mask ablation

Same collage structure as SCONE, but the spatial masks are not learned:
each layer owns a fixed Bernoulli(0.5) mask of shape D x H x W on the
pixel grid, and every coordinate reads the mask of the cell it falls in.

    z_l = M_l[cell(x)] * omega0 (W_l z_{l-1} + b_l) * g_l(x)
"""
from typing import Optional, Tuple

import numpy as np

from ..autodiff import Rng, Tensor, constant, ewise, linear, scale, sin
from ..errors import ConfigError, InputError
from ..models.config import ModelConfig, ModelFamily
from .base import CoordinateNetwork, ForwardPass
from .init import fourier_basis, siren_first, siren_hidden

MASK_PROBABILITY = 0.5


def grid_cells(coords: np.ndarray, grid: Tuple[int, int]) -> Tuple[np.ndarray, np.ndarray]:
    """Nearest-cell (row, col) of each (x, y) coordinate on an H x W pixel-center grid."""
    height, width = grid
    if coords.size and np.max(np.abs(coords)) > 1.0 + 1e-9:
        raise InputError("coordinate outside [-1, 1]^2 does not resolve to a grid cell")
    cols = np.clip(np.floor((coords[:, 0] + 1.0) * 0.5 * width), 0, width - 1).astype(np.int64)
    rows = np.clip(np.floor((coords[:, 1] + 1.0) * 0.5 * height), 0, height - 1).astype(np.int64)
    return rows, cols


class RandomMaskNetwork(CoordinateNetwork):
    """Collage network with frozen random binary masks on the pixel grid."""

    def __init__(self, config: ModelConfig, rng: Optional[Rng] = None, mask_rng: Optional[Rng] = None):
        self._mask_rng = mask_rng
        super().__init__(config, rng)

    @property
    def hidden_layers(self) -> int:
        return self.config.layers - 1

    @property
    def grid(self) -> Tuple[int, int]:
        return tuple(self.config.rbm_grid)

    def _initialize(self, rng: Rng) -> None:
        c = self.config
        widths = c.hidden
        mask_rng = self._mask_rng or rng.derive("masks")
        height, width = self.grid
        self._add_parameter("W0", siren_first(rng, widths[0], c.in_dim))
        for layer in range(1, c.layers):
            self._add_parameter(f"W{layer}", siren_hidden(rng, widths[layer], widths[layer - 1], c.omega0))
            self._add_parameter(f"b{layer}", np.zeros(widths[layer]))
            self._add_frozen(f"B{layer}", fourier_basis(rng, widths[layer], c.in_dim))
            self._add_frozen(f"M{layer}", mask_rng.bernoulli(MASK_PROBABILITY, (widths[layer], height, width)))
        last = c.layers
        self._add_parameter(f"W{last}", siren_hidden(rng, c.out_dim, widths[-1], c.omega0))
        self._add_parameter(f"b{last}", np.zeros(c.out_dim))

    def forward(self, x: Tensor) -> ForwardPass:
        self.check_coords(x.data)
        c = self.config
        t = self.tensors
        rows, cols = grid_cells(x.data, self.grid)

        z = scale(linear(x, t["W0"]), c.omega0)
        features, masks = [], []
        for layer in range(1, c.layers):
            mask = constant(t[f"M{layer}"].data[:, rows, cols].T)
            basis = sin(scale(linear(x, t[f"B{layer}"]), c.omegas[layer - 1]))
            projected = scale(linear(z, t[f"W{layer}"], t[f"b{layer}"]), c.omega0)
            z = ewise("mul", ewise("mul", mask, projected), basis)
            masks.append(mask)
            features.append(z)
        out = linear(z, t[f"W{c.layers}"], t[f"b{c.layers}"])
        return ForwardPass(output=out, features=features, masks=masks)


def init_rbm(config: ModelConfig, rng: Rng, mask_rng: Optional[Rng] = None) -> RandomMaskNetwork:
    if config.family != ModelFamily.RBM.value:
        raise ConfigError(f"init_rbm needs family 'rbm', got {config.family!r}")
    return RandomMaskNetwork(config, rng, mask_rng)


def rbm_forward(model: RandomMaskNetwork, x) -> Tensor:
    return model(x if isinstance(x, Tensor) else constant(x))
