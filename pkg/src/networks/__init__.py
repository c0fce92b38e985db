# Coordinate network families, activation zoo and visualization
from typing import Union

from ..autodiff import Rng, RngStreams
from ..errors import ConfigError
from ..models.config import ModelConfig, ModelFamily
from .activations import ACTIVATIONS, activation, reference, verify_range
from .base import CoordinateNetwork, ForwardPass
from .ffn import FourierFeatureNetwork, ffn_forward, init_ffn
from .rbm import RandomMaskNetwork, grid_cells, init_rbm, rbm_forward
from .scone import SconeNetwork, init_scone, scone_forward
from .siren import SirenNetwork, init_siren, siren_forward

NETWORKS = {
    ModelFamily.SCONE.value: SconeNetwork,
    ModelFamily.SIREN.value: SirenNetwork,
    ModelFamily.FFN.value: FourierFeatureNetwork,
    ModelFamily.RBM.value: RandomMaskNetwork,
}


def build_model(config: ModelConfig, rng: Union[RngStreams, Rng, None] = None) -> CoordinateNetwork:
    """Construct and initialize the network a config describes.

    With ``RngStreams`` parameters come from the ``init`` stream and RBM masks
    from the ``masks`` stream; with no generator the run seed is used.
    """
    if rng is None:
        rng = RngStreams(config.seed)
    if isinstance(rng, RngStreams):
        init_rng, mask_rng = rng.init, rng.masks
    else:
        init_rng, mask_rng = rng, None

    if config.family == ModelFamily.RBM.value:
        return RandomMaskNetwork(config, init_rng, mask_rng)
    if config.family not in NETWORKS:
        raise ConfigError(f"unknown model family {config.family!r}")
    return NETWORKS[config.family](config, init_rng)


def count_parameters(model: CoordinateNetwork, trainable_only: bool = True) -> int:
    return model.count_parameters(trainable_only)


def match_width(config: ModelConfig, target: int, max_width: int = 1024) -> ModelConfig:
    """Widest uniform hidden width whose trainable parameter count stays within ``target``."""
    best = None
    for width in range(1, max_width + 1):
        candidate = config.model_copy(update={"hidden": [width] * config.layers})
        if build_model(candidate).count_parameters() > target:
            break
        best = candidate
    if best is None:
        raise ConfigError(f"no {config.family} width fits within {target} parameters")
    return best


__all__ = [
    "ACTIVATIONS", "activation", "reference", "verify_range",
    "CoordinateNetwork", "ForwardPass", "NETWORKS", "build_model", "count_parameters", "match_width",
    "SconeNetwork", "init_scone", "scone_forward",
    "SirenNetwork", "init_siren", "siren_forward",
    "FourierFeatureNetwork", "init_ffn", "ffn_forward",
    "RandomMaskNetwork", "init_rbm", "rbm_forward", "grid_cells",
]
