"""
Spatially Collaged Coordinate Network

Each hidden layer multiplies a fixed random Fourier basis of the input
coordinates by a learned soft spatial mask computed from the previous
layer, so every frequency only contributes where the mask lets it. The
output is a linear combination of the last layer's masked bases. Mask weights
follow the SIREN hidden rule (bound divided by omega0), so omega0 multiplies
the mask pre-activation the way it does in a sine layer.

    z0 = omega0 * (W0 x)
    M_l = act(omega0 * (W_l z_{l-1} + b_l))
    g_l = sin(omega_l * (B_l x))          B_l frozen
    z_l = M_l * g_l                       l = 1 .. L-1
    y  = W_L z_{L-1} + b_L
"""
from typing import List, Tuple

import numpy as np

from ..autodiff import Rng, Tensor, constant, ewise, linear, scale, sin
from ..errors import ConfigError
from ..models.config import ModelConfig, ModelFamily
from .activations import activation
from .base import CoordinateNetwork, ForwardPass
from .init import BASIS_BOUND, fourier_basis, siren_first, siren_hidden


class SconeNetwork(CoordinateNetwork):
    """Coordinate network that collages masked Fourier bases."""

    @property
    def hidden_layers(self) -> int:
        return self.config.layers - 1

    def _initialize(self, rng: Rng) -> None:
        c = self.config
        widths = c.hidden
        self._add_parameter("W0", siren_first(rng, widths[0], c.in_dim))
        if c.bias_in_basis:
            self._add_parameter("b0", np.zeros(widths[0]))
        for layer in range(1, c.layers):
            self._add_parameter(f"W{layer}", siren_hidden(rng, widths[layer], widths[layer - 1], c.omega0))
            self._add_parameter(f"b{layer}", np.zeros(widths[layer]))
            self._add_frozen(f"B{layer}", fourier_basis(rng, widths[layer], c.in_dim))
            if c.bias_in_basis:
                self._add_frozen(f"c{layer}", rng.uniform(-BASIS_BOUND, BASIS_BOUND, widths[layer]))
            if c.learnable_scale:
                self._add_parameter(f"s{layer}", np.ones(1))
        last = c.layers
        self._add_parameter(f"W{last}", siren_hidden(rng, c.out_dim, widths[-1], c.omega0))
        self._add_parameter(f"b{last}", np.zeros(c.out_dim))

    def basis(self, x: Tensor, layer: int) -> Tensor:
        """g_l(x) = sin(omega_l * (B_l x)); depends on frozen tensors only."""
        projected = linear(x, self.tensors[f"B{layer}"], self.tensors.get(f"c{layer}"))
        return sin(scale(projected, self.config.omegas[layer - 1]))

    def forward(self, x: Tensor) -> ForwardPass:
        self.check_coords(x.data)
        c = self.config
        act = activation(c.activation, c.learnable_scale)
        t = self.tensors

        z = scale(linear(x, t["W0"], t.get("b0")), c.omega0)
        features: List[Tensor] = []
        masks: List[Tensor] = []
        for layer in range(1, c.layers):
            pre = scale(linear(z, t[f"W{layer}"], t[f"b{layer}"]), c.omega0)
            mask = act(pre, t.get(f"s{layer}"))
            z = ewise("mul", mask, self.basis(x, layer))
            masks.append(mask)
            features.append(z)
        out = linear(z, t[f"W{c.layers}"], t[f"b{c.layers}"])
        return ForwardPass(output=out, features=features, masks=masks)


def init_scone(config: ModelConfig, rng: Rng) -> SconeNetwork:
    """Build a SCONE model with SIREN-style initialization; deterministic in ``rng``."""
    if config.family != ModelFamily.SCONE.value:
        raise ConfigError(f"init_scone needs family 'scone', got {config.family!r}")
    if config.omega0 <= 0 or any(w <= 0 for w in config.omegas):
        raise ConfigError("SCONE frequencies must be positive")
    return SconeNetwork(config, rng)


def scone_forward(model: SconeNetwork, x) -> Tuple[Tensor, List[Tensor]]:
    """Output plus the spatial masks of every hidden layer."""
    result = model.forward(x if isinstance(x, Tensor) else constant(x))
    return result.output, result.masks
