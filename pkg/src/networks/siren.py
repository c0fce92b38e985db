"""
SIREN: sine-activated MLP
"""
import numpy as np

from ..autodiff import Rng, Tensor, constant, linear, scale, sin
from ..errors import ConfigError
from ..models.config import ModelConfig, ModelFamily
from .base import CoordinateNetwork, ForwardPass
from .init import siren_first, siren_hidden


class SirenNetwork(CoordinateNetwork):
    """z0 = sin(omega0 (W0 x + b0)), z_l = sin(omega0 (W_l z + b_l)), linear readout."""

    def _initialize(self, rng: Rng) -> None:
        c = self.config
        widths = c.hidden
        self._add_parameter("W0", siren_first(rng, widths[0], c.in_dim))
        self._add_parameter("b0", np.zeros(widths[0]))
        for layer in range(1, c.layers):
            self._add_parameter(f"W{layer}", siren_hidden(rng, widths[layer], widths[layer - 1], c.omega0))
            self._add_parameter(f"b{layer}", np.zeros(widths[layer]))
        last = c.layers
        self._add_parameter(f"W{last}", siren_hidden(rng, c.out_dim, widths[-1], c.omega0))
        self._add_parameter(f"b{last}", np.zeros(c.out_dim))

    def forward(self, x: Tensor) -> ForwardPass:
        self.check_coords(x.data)
        c = self.config
        t = self.tensors
        z = x
        features = []
        for layer in range(c.layers):
            z = sin(scale(linear(z, t[f"W{layer}"], t[f"b{layer}"]), c.omega0))
            features.append(z)
        out = linear(z, t[f"W{c.layers}"], t[f"b{c.layers}"])
        return ForwardPass(output=out, features=features)


def init_siren(config: ModelConfig, rng: Rng) -> SirenNetwork:
    if config.family != ModelFamily.SIREN.value:
        raise ConfigError(f"init_siren needs family 'siren', got {config.family!r}")
    return SirenNetwork(config, rng)


def siren_forward(model: SirenNetwork, x) -> Tensor:
    return model(x if isinstance(x, Tensor) else constant(x))
