"""
Adam Optimizer and Cosine Learning-Rate Schedule
"""
import math
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Tuple

import numpy as np

from ..autodiff import Tensor
from ..models.config import TrainConfig


@dataclass
class AdamState:
    """First/second moments per trainable tensor and the step counter."""
    m: "OrderedDict[str, np.ndarray]" = field(default_factory=OrderedDict)
    v: "OrderedDict[str, np.ndarray]" = field(default_factory=OrderedDict)
    t: int = 0

    @classmethod
    def zeros(cls, params: Iterable[Tuple[str, Tensor]]) -> "AdamState":
        state = cls()
        for name, tensor in params:
            state.m[name] = np.zeros(tensor.shape)
            state.v[name] = np.zeros(tensor.shape)
        return state


def adam_step(
    params: Mapping[str, Tensor],
    state: AdamState,
    lr: float,
    config: TrainConfig = TrainConfig(),
) -> None:
    """One bias-corrected Adam update from each tensor's ``grad``; no weight decay.

    Tensors that do not require gradients are never touched.
    """
    state.t += 1
    t = state.t
    b1, b2, eps = config.beta1, config.beta2, config.eps
    correction1 = 1.0 - b1 ** t
    correction2 = 1.0 - b2 ** t
    for name, tensor in params.items():
        if not tensor.requires_grad:
            continue
        g = tensor.grad
        if name not in state.m:
            state.m[name] = np.zeros(tensor.shape)
            state.v[name] = np.zeros(tensor.shape)
        m = b1 * state.m[name] + (1.0 - b1) * g
        v = b2 * state.v[name] + (1.0 - b2) * (g * g)
        state.m[name] = m
        state.v[name] = v
        m_hat = m / correction1
        v_hat = v / correction2
        tensor.assign(tensor.data - lr * m_hat / (np.sqrt(v_hat) + eps))


def cosine_lr(t: int, config: TrainConfig) -> float:
    """lr_min + (lr0 - lr_min) (1 + cos(pi t / T)) / 2, clamped to lr_min past T."""
    total = config.iters
    if t >= total:
        return config.lr0 if total == 0 else config.lr_min
    return config.lr_min + 0.5 * (config.lr0 - config.lr_min) * (1.0 + math.cos(math.pi * t / total))
