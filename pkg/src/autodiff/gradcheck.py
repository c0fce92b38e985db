"""
Finite-Difference Gradient Checking
"""
from typing import Callable, Sequence, Union

import numpy as np

from ..errors import ContractError
from .tensor import Tensor, no_grad

DEFAULT_STEP = 1e-6
DEFAULT_FLOOR = 1e-8


def gradcheck(
    f: Callable[..., Tensor],
    inputs: Sequence[Union[Tensor, np.ndarray]],
    h: float = DEFAULT_STEP,
    floor: float = DEFAULT_FLOOR,
) -> float:
    """Compare reverse-mode gradients of scalar ``f(*inputs)`` with central differences.

    Returns max over every input coordinate of
    ``|autodiff - numeric| / max(floor, |numeric|)``. Tensor inputs are used in
    place (so ``f`` may close over a model that owns them) and are restored
    afterwards; arrays are wrapped as fresh trainable leaves.
    """
    leaves = [x if isinstance(x, Tensor) else Tensor(x, requires_grad=True) for x in inputs]
    saved_flags = [leaf.requires_grad for leaf in leaves]
    for leaf in leaves:
        leaf.requires_grad = True
        leaf.zero_grad()

    try:
        root = f(*leaves)
        if root.size != 1:
            raise ContractError(f"gradcheck needs a scalar-valued function, got shape {root.shape}")
        root.backward()
        analytic = [np.array(leaf.grad) for leaf in leaves]

        worst = 0.0
        for leaf, grad in zip(leaves, analytic):
            original = leaf.numpy()
            flat = original.reshape(-1)
            for i in range(flat.size):
                shifted = flat.copy()
                shifted[i] = flat[i] + h
                leaf.assign(shifted.reshape(original.shape))
                with no_grad():
                    plus = f(*leaves).item()
                shifted[i] = flat[i] - h
                leaf.assign(shifted.reshape(original.shape))
                with no_grad():
                    minus = f(*leaves).item()
                leaf.assign(original)

                numeric = (plus - minus) / (2.0 * h)
                error = abs(grad.reshape(-1)[i] - numeric) / max(floor, abs(numeric))
                worst = max(worst, error)
        return worst
    finally:
        for leaf, flag in zip(leaves, saved_flags):
            leaf.requires_grad = flag
            leaf.zero_grad()
