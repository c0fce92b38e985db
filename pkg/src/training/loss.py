"""
Reconstruction Loss
"""
from ..autodiff import Tensor, as_tensor, ewise, reduce_mean, square
from ..errors import DimensionError


def mse_loss(pred, target) -> Tensor:
    """Mean over all N*c elements of the squared error."""
    pred, target = as_tensor(pred), as_tensor(target)
    if pred.shape != target.shape:
        raise DimensionError(f"prediction {pred.shape} and target {target.shape} differ")
    return reduce_mean(square(ewise("sub", pred, target)))
