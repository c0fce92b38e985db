"""
Base Coordinate Network and Common Functionality
"""
from abc import ABC, abstractmethod
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple
import logging

import numpy as np

from ..autodiff import Rng, Tensor, constant, no_grad, parameter
from ..errors import DimensionError, InputError
from ..models.config import ModelConfig

COORD_TOLERANCE = 1e-9


@dataclass
class ForwardPass:
    """Output of one forward pass plus the per-layer tensors used for visualization."""
    output: Tensor
    features: List[Tensor] = field(default_factory=list)
    masks: List[Tensor] = field(default_factory=list)


class CoordinateNetwork(ABC):
    """Abstract base class for all coordinate network families.

    Parameters live in one ordered mapping so checkpoints, optimizers and
    gradient checks always see them in the same order. Frozen tensors (random
    bases, binary masks) are stored alongside with ``requires_grad=False``.
    """

    def __init__(self, config: ModelConfig, rng: Optional[Rng] = None):
        self.config = config
        self.logger = logging.getLogger(self.__class__.__name__)
        self.tensors: "OrderedDict[str, Tensor]" = OrderedDict()
        if rng is not None:
            self._initialize(rng)
            self.logger.debug(
                f"Initialized {config.family} with {self.count_parameters()} trainable / "
                f"{self.count_parameters(trainable_only=False)} total values"
            )

    @abstractmethod
    def _initialize(self, rng: Rng) -> None:
        """Draw every tensor from ``rng``, in a fixed order."""

    @abstractmethod
    def forward(self, x: Tensor) -> ForwardPass:
        """Map an N x in_dim coordinate batch to N x out_dim values."""

    @property
    def hidden_layers(self) -> int:
        """Number of activated hidden layers (one montage each)."""
        return self.config.layers

    # Parameter bookkeeping

    def _add_parameter(self, name: str, values: np.ndarray) -> Tensor:
        self.tensors[name] = parameter(values, name)
        return self.tensors[name]

    def _add_frozen(self, name: str, values: np.ndarray) -> Tensor:
        self.tensors[name] = constant(values, name)
        return self.tensors[name]

    def parameters(self) -> List[Tensor]:
        """Trainable tensors in registration order."""
        return [t for t in self.tensors.values() if t.requires_grad]

    def named_parameters(self) -> Iterator[Tuple[str, Tensor]]:
        return ((name, t) for name, t in self.tensors.items() if t.requires_grad)

    def frozen(self) -> Dict[str, Tensor]:
        return {name: t for name, t in self.tensors.items() if not t.requires_grad}

    def zero_grad(self) -> None:
        for t in self.tensors.values():
            t.zero_grad()

    def count_parameters(self, trainable_only: bool = True) -> int:
        return sum(t.size for t in self.tensors.values() if t.requires_grad or not trainable_only)

    def state_arrays(self) -> "OrderedDict[str, np.ndarray]":
        return OrderedDict((name, t.numpy()) for name, t in self.tensors.items())

    def load_state_arrays(self, arrays: Dict[str, np.ndarray]) -> None:
        missing = set(self.tensors) - set(arrays)
        unexpected = set(arrays) - set(self.tensors)
        if missing or unexpected:
            raise DimensionError(
                f"state does not match {self.config.family}: missing {sorted(missing)}, "
                f"unexpected {sorted(unexpected)}"
            )
        for name, t in self.tensors.items():
            t.assign(arrays[name])

    # Evaluation

    def check_coords(self, coords: np.ndarray) -> None:
        if coords.ndim != 2 or coords.shape[1] != self.config.in_dim:
            raise DimensionError(
                f"{self.config.family} expects N x {self.config.in_dim} coordinates, got {coords.shape}"
            )
        if coords.size and np.max(np.abs(coords)) > 1.0 + COORD_TOLERANCE:
            raise InputError(
                f"coordinates must lie in [-1, 1]^{self.config.in_dim}; max |x| = {np.max(np.abs(coords))}"
            )

    def __call__(self, x) -> Tensor:
        return self.forward(x if isinstance(x, Tensor) else constant(x)).output

    def predict(self, coords: np.ndarray, chunk: int = 16384) -> np.ndarray:
        """Tape-free evaluation in fixed-order chunks."""
        coords = np.asarray(coords, dtype=np.float64)
        with no_grad():
            rows = [
                self.forward(constant(coords[start:start + chunk])).output.data
                for start in range(0, coords.shape[0], chunk)
            ]
        if not rows:
            return np.zeros((0, self.config.out_dim))
        return np.concatenate(rows, axis=0)

    def trace(self, coords: np.ndarray) -> ForwardPass:
        """Tape-free forward pass keeping every layer's responses."""
        with no_grad():
            return self.forward(constant(np.asarray(coords, dtype=np.float64)))
