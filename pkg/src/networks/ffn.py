"""
Fourier Feature Network: Gaussian random Fourier encoding + ReLU MLP
"""
import math

import numpy as np

from ..autodiff import Rng, Tensor, concat, constant, cos, linear, relu, scale, sin
from ..errors import ConfigError
from ..models.config import ModelConfig, ModelFamily
from .base import CoordinateNetwork, ForwardPass
from .init import fan_in_uniform, gaussian_rff


class FourierFeatureNetwork(CoordinateNetwork):
    """gamma(x) = [cos(2 pi B x), sin(2 pi B x)] with frozen B ~ N(0, sigma^2), then ReLU layers."""

    def _initialize(self, rng: Rng) -> None:
        c = self.config
        self._add_frozen("B", gaussian_rff(rng, c.rff_size, c.in_dim, c.rff_sigma))
        fan_in = 2 * c.rff_size
        for layer, width in enumerate(c.hidden):
            self._add_parameter(f"W{layer}", fan_in_uniform(rng, (width, fan_in), fan_in))
            self._add_parameter(f"b{layer}", fan_in_uniform(rng, width, fan_in))
            fan_in = width
        last = c.layers
        self._add_parameter(f"W{last}", fan_in_uniform(rng, (c.out_dim, fan_in), fan_in))
        self._add_parameter(f"b{last}", fan_in_uniform(rng, c.out_dim, fan_in))

    def encode(self, x: Tensor) -> Tensor:
        projected = scale(linear(x, self.tensors["B"]), 2.0 * math.pi)
        return concat([cos(projected), sin(projected)], axis=1)

    def preactivations(self, x: np.ndarray) -> list:
        """Pre-ReLU values of every hidden layer, for locating kinks."""
        return [v.data for v in self._body(constant(x))[1]]

    def _body(self, x: Tensor):
        t = self.tensors
        z = self.encode(x)
        features, pre = [], []
        for layer in range(self.config.layers):
            v = linear(z, t[f"W{layer}"], t[f"b{layer}"])
            z = relu(v)
            pre.append(v)
            features.append(z)
        return z, pre, features

    def forward(self, x: Tensor) -> ForwardPass:
        self.check_coords(x.data)
        z, _, features = self._body(x)
        last = self.config.layers
        out = linear(z, self.tensors[f"W{last}"], self.tensors[f"b{last}"])
        return ForwardPass(output=out, features=features)


def init_ffn(config: ModelConfig, rng: Rng) -> FourierFeatureNetwork:
    if config.family != ModelFamily.FFN.value:
        raise ConfigError(f"init_ffn needs family 'ffn', got {config.family!r}")
    return FourierFeatureNetwork(config, rng)


def ffn_forward(model: FourierFeatureNetwork, x) -> Tensor:
    return model(x if isinstance(x, Tensor) else constant(x))
