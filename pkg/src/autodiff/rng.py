"""
Seeded Random Streams

Every run is seeded once. Each consumer (parameter init, batch sampler, SDF
noise, binary masks) draws from its own stream derived from that seed, so
adding draws in one consumer never shifts another.

Algorithm: numpy's PCG64 (a 128-bit permuted linear congruential generator)
seeded through ``SeedSequence(seed, spawn_key=(crc32(stream path),))``.
"""
import zlib
from typing import Any, Dict, Sequence, Tuple, Union

import numpy as np

from ..errors import ContractError

Shape = Union[int, Tuple[int, ...], None]

SEED_MASK = (1 << 64) - 1


class Rng:
    """A named, reproducible random stream."""

    def __init__(self, seed: int, stream: str = ""):
        self.seed = int(seed) & SEED_MASK
        self.stream = stream
        if stream:
            sequence = np.random.SeedSequence(self.seed, spawn_key=(zlib.crc32(stream.encode("utf-8")),))
        else:
            sequence = np.random.SeedSequence(self.seed)
        self._generator = np.random.Generator(np.random.PCG64(sequence))

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed}, stream={self.stream or '<root>'!r})"

    def derive(self, name: str) -> "Rng":
        """Independent child stream; same (seed, path) always gives the same draws."""
        path = f"{self.stream}/{name}" if self.stream else name
        return Rng(self.seed, path)

    def uniform(self, low: float, high: float, shape: Shape = None) -> np.ndarray:
        return self._generator.uniform(low, high, size=shape)

    def normal(self, scale: float, shape: Shape = None) -> np.ndarray:
        return self._generator.normal(0.0, scale, size=shape)

    def laplace(self, scale: float, shape: Shape = None) -> np.ndarray:
        return self._generator.laplace(0.0, scale, size=shape)

    def integers(self, high: int, shape: Shape = None) -> np.ndarray:
        return self._generator.integers(0, high, size=shape)

    def bernoulli(self, p: float, shape: Shape = None) -> np.ndarray:
        return (self._generator.random(size=shape) < p).astype(np.float64)

    def state(self) -> Dict[str, Any]:
        return self._generator.bit_generator.state

    def set_state(self, state: Dict[str, Any]) -> None:
        self._generator.bit_generator.state = state


class RngStreams:
    """The per-run family of streams, saved and restored as one unit."""

    NAMES: Sequence[str] = ("init", "sampler", "noise", "masks")

    def __init__(self, seed: int):
        self.seed = int(seed) & SEED_MASK
        root = Rng(self.seed)
        self.streams: Dict[str, Rng] = {name: root.derive(name) for name in self.NAMES}

    def __getitem__(self, name: str) -> Rng:
        return self.streams[name]

    @property
    def init(self) -> Rng:
        return self.streams["init"]

    @property
    def sampler(self) -> Rng:
        return self.streams["sampler"]

    @property
    def noise(self) -> Rng:
        return self.streams["noise"]

    @property
    def masks(self) -> Rng:
        return self.streams["masks"]

    def state(self) -> Dict[str, Any]:
        return {"seed": self.seed, "streams": {name: rng.state() for name, rng in self.streams.items()}}

    def set_state(self, state: Dict[str, Any], strict: bool = True) -> None:
        if strict and int(state["seed"]) != self.seed:
            raise ContractError(f"RNG state belongs to seed {state['seed']}, not {self.seed}")
        for name, stream_state in state["streams"].items():
            self.streams[name].set_state(stream_state)
