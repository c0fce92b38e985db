"""
End-to-end gradient checks for whole networks
"""
from typing import Optional, Tuple

import numpy as np

from ..autodiff import Rng, constant, ewise, gradcheck, reduce_mean, square
from ..autodiff.gradcheck import DEFAULT_FLOOR
from ..errors import DomainError
from ..models.config import ModelConfig, ModelFamily
from . import build_model
from .base import CoordinateNetwork
from .ffn import FourierFeatureNetwork

CHECK_WIDTH = 8
CHECK_POINTS = 8
CHECK_TOLERANCE = 1e-4
CHECK_FLOOR = DEFAULT_FLOOR
KINK_MARGIN = 1e-4
MAX_RESAMPLES = 100


def check_config(
    family: str,
    activation: str = "sin2",
    learnable_scale: bool = False,
    seed: int = 0,
    width: int = CHECK_WIDTH,
) -> ModelConfig:
    """Small network with moderate frequencies, as used by the gradient checks."""
    return ModelConfig(
        family=family,
        in_dim=2,
        out_dim=1,
        layers=3,
        hidden=[width],
        omega0=2.0,
        omegas=[3.0, 2.0],
        activation=activation,
        learnable_scale=learnable_scale,
        rff_sigma=1.0,
        rff_size=4,
        rbm_grid=(4, 4) if family == ModelFamily.RBM.value else None,
        seed=seed,
    )


def _coords(model: CoordinateNetwork, rng: Rng, n: int) -> np.ndarray:
    for _ in range(MAX_RESAMPLES):
        x = rng.uniform(-0.9, 0.9, (n, model.config.in_dim))
        if not isinstance(model, FourierFeatureNetwork):
            return x
        if all(np.min(np.abs(v)) >= KINK_MARGIN for v in model.preactivations(x)):
            return x
    raise DomainError("could not draw coordinates away from ReLU kinks")


def check_model(
    model: CoordinateNetwork,
    seed: int = 0,
    n: int = CHECK_POINTS,
    floor: float = CHECK_FLOOR,
) -> float:
    """Max relative error of the gradient of an MSE loss w.r.t. every trainable tensor."""
    rng = Rng(seed, "gradcheck")
    x = constant(_coords(model, rng, n))
    target = constant(rng.uniform(-1.0, 1.0, (n, model.config.out_dim)))

    def loss(*_params):
        return reduce_mean(square(ewise("sub", model(x), target)))

    return gradcheck(loss, model.parameters(), floor=floor)


def check_family(
    family: str,
    activation: str = "sin2",
    learnable_scale: bool = False,
    seed: int = 0,
    width: Optional[int] = None,
) -> Tuple[float, int]:
    """Build a check-sized network and return (max relative error, trainable values)."""
    config = check_config(family, activation, learnable_scale, seed, width or CHECK_WIDTH)
    model = build_model(config)
    return check_model(model, seed), model.count_parameters()
