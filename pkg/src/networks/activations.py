"""
Mask Activation Zoo

Every activation maps the real line into [0, 1] so it can act as a soft
spatial mask. Functions bounded on another range are min-max normalized
(the ``n_`` prefix); the learnable-scale variant multiplies the input by a
trainable scalar before the nonlinearity.
"""
from functools import lru_cache
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from ..autodiff import Tensor, ewise, exp, scale, sigmoid, sin, square, tanh, unary
from ..errors import ConfigError

TapeFn = Callable[[Tensor], Tensor]
ArrayFn = Callable[[np.ndarray], np.ndarray]


def _sin2(v: Tensor) -> Tensor:
    return square(sin(v))


def _gauss(v: Tensor) -> Tensor:
    return exp(unary("neg", square(v)))


def _n_tanh(v: Tensor) -> Tensor:
    return ewise("add", scale(tanh(v), 0.5), 0.5)


def _n_sin(v: Tensor) -> Tensor:
    return ewise("add", scale(sin(v), 0.5), 0.5)


def _n_cos(v: Tensor) -> Tensor:
    return ewise("add", scale(unary("cos", v), 0.5), 0.5)


ACTIVATIONS: Dict[str, Tuple[TapeFn, ArrayFn]] = {
    "sin2": (_sin2, lambda v: np.sin(v) ** 2),
    "sigmoid": (sigmoid, lambda v: 0.5 * (np.tanh(0.5 * v) + 1.0)),
    "gauss": (_gauss, lambda v: np.exp(-v * v)),
    "n_tanh": (_n_tanh, lambda v: 0.5 * np.tanh(v) + 0.5),
    "n_sin": (_n_sin, lambda v: 0.5 * np.sin(v) + 0.5),
    "n_cos": (_n_cos, lambda v: 0.5 * np.cos(v) + 0.5),
}


def _lookup(name: str) -> Tuple[TapeFn, ArrayFn]:
    key = getattr(name, "value", name)
    if key not in ACTIVATIONS:
        raise ConfigError(f"unknown activation {key!r}; expected one of {sorted(ACTIVATIONS)}")
    return ACTIVATIONS[key]


def activation(name: str, learnable_scale: bool = False) -> Callable[..., Tensor]:
    """Return ``f(v, s=None)``; with ``learnable_scale`` the input is first multiplied by ``s``."""
    fn, _ = _lookup(name)

    def apply(v: Tensor, s: Optional[Tensor] = None) -> Tensor:
        if learnable_scale:
            if s is None:
                raise ConfigError(f"{name} with learnable scale needs its scale parameter")
            v = ewise("mul", s, v)
        return fn(v)

    return apply


def reference(name: str) -> ArrayFn:
    """Plain numpy version of an activation (no tape)."""
    return _lookup(name)[1]


@lru_cache(maxsize=None)
def verify_range(name: str, samples: int = 100_000, bound: float = 50.0) -> None:
    """Sample the activation on [-bound, bound]; reject anything leaving [0, 1]."""
    values = reference(name)(np.linspace(-bound, bound, samples))
    if not np.all(np.isfinite(values)) or values.min() < 0.0 or values.max() > 1.0:
        raise ConfigError(
            f"activation {name!r} leaves [0, 1] on [-{bound}, {bound}]: range [{values.min()}, {values.max()}]"
        )
