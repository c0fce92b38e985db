# Tensor core: dense tensors, reverse-mode autodiff, seeded streams
from .tensor import Tensor, as_tensor, constant, grad_enabled, no_grad, parameter
from .ops import (
    bias_add, concat, cos, ewise, exp, linear, matmul, reduce_mean, relu,
    scale, sigmoid, sin, square, tanh, transpose, unary,
)
from .gradcheck import gradcheck
from .rng import Rng, RngStreams

__all__ = [
    "Tensor", "as_tensor", "constant", "grad_enabled", "no_grad", "parameter",
    "bias_add", "concat", "cos", "ewise", "exp", "linear", "matmul", "reduce_mean",
    "relu", "scale", "sigmoid", "sin", "square", "tanh", "transpose", "unary",
    "gradcheck", "Rng", "RngStreams",
]
