"""
Differentiable Operations

Exactly the operation set the coordinate networks need. Broadcasting is
limited to scalar-vs-tensor in ``ewise`` and the explicit row broadcast
of ``bias_add``.
"""
from typing import Optional, Sequence

import numpy as np

from ..errors import DimensionError, DomainError
from .tensor import Tensor, as_tensor, grad_enabled

EWISE_OPS = ("add", "sub", "mul")
UNARY_OPS = ("sin", "cos", "tanh", "sigmoid", "exp", "square", "neg", "scale", "relu")


def _result(value: np.ndarray, op: str, *parents) -> Tensor:
    """Build an output node; only inputs that need gradients are kept on the tape."""
    live = tuple((p, vjp) for p, vjp in parents if p.requires_grad) if grad_enabled() else ()
    return Tensor(value, requires_grad=bool(live), _parents=live, _op=op, _owned=True)


def _is_scalar(t: Tensor) -> bool:
    return t.size == 1


def _reduce_to(grad: np.ndarray, target: Tensor) -> np.ndarray:
    """Sum a full-shape gradient back down to a scalar operand."""
    if grad.shape == target.shape:
        return grad
    return np.full(target.shape, np.sum(grad))


def matmul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.data.ndim != 2 or b.data.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError(f"matmul shape mismatch: {a.shape} x {b.shape}")
    A, B = a.data, b.data
    return _result(
        A @ B, "matmul",
        (a, lambda g: g @ B.T),
        (b, lambda g: A.T @ g),
    )


def ewise(op: str, a, b) -> Tensor:
    """Element-wise add/sub/mul of equal shapes, or of a scalar with a tensor."""
    if op not in EWISE_OPS:
        raise DomainError(f"unknown element-wise op {op!r}; expected one of {EWISE_OPS}")
    a, b = as_tensor(a), as_tensor(b)
    if a.shape != b.shape and not (_is_scalar(a) or _is_scalar(b)):
        raise DimensionError(f"element-wise {op} shape mismatch: {a.shape} vs {b.shape}")
    A, B = a.data, b.data
    if _is_scalar(a) and a.shape != b.shape:
        A = A.reshape(())
    if _is_scalar(b) and a.shape != b.shape:
        B = B.reshape(())

    if op == "add":
        value = A + B
        da = lambda g: _reduce_to(g, a)
        db = lambda g: _reduce_to(g, b)
    elif op == "sub":
        value = A - B
        da = lambda g: _reduce_to(g, a)
        db = lambda g: _reduce_to(-g, b)
    else:
        value = A * B
        da = lambda g: _reduce_to(g * B, a)
        db = lambda g: _reduce_to(g * A, b)
    return _result(value, op, (a, da), (b, db))


def unary(op: str, a, c: Optional[float] = None) -> Tensor:
    """Element-wise map with its analytic derivative. ``scale`` multiplies by ``c``."""
    a = as_tensor(a)
    x = a.data
    if op == "sin":
        value = np.sin(x)
        local = lambda: np.cos(x)
    elif op == "cos":
        value = np.cos(x)
        local = lambda: -np.sin(x)
    elif op == "tanh":
        value = np.tanh(x)
        local = lambda: 1.0 - value * value
    elif op == "sigmoid":
        # tanh form never overflows
        value = 0.5 * (np.tanh(0.5 * x) + 1.0)
        local = lambda: value * (1.0 - value)
    elif op == "exp":
        value = np.exp(x)
        local = lambda: value
    elif op == "square":
        value = x * x
        local = lambda: 2.0 * x
    elif op == "neg":
        return _result(-x, op, (a, lambda g: -g))
    elif op == "scale":
        if c is None:
            raise DomainError("scale needs a constant factor")
        factor = float(c)
        return _result(factor * x, op, (a, lambda g: factor * g))
    elif op == "relu":
        value = np.maximum(x, 0.0)
        local = lambda: (x > 0).astype(np.float64)
    else:
        raise DomainError(f"unknown unary op {op!r}; expected one of {UNARY_OPS}")
    # Derivatives are only evaluated by backward()
    return _result(value, op, (a, lambda g: g * local()))


def sin(a) -> Tensor:
    return unary("sin", a)


def cos(a) -> Tensor:
    return unary("cos", a)


def tanh(a) -> Tensor:
    return unary("tanh", a)


def sigmoid(a) -> Tensor:
    return unary("sigmoid", a)


def exp(a) -> Tensor:
    return unary("exp", a)


def square(a) -> Tensor:
    return unary("square", a)


def relu(a) -> Tensor:
    return unary("relu", a)


def scale(a, c: float) -> Tensor:
    return unary("scale", a, c)


def reduce_mean(a) -> Tensor:
    """Arithmetic mean over every element.

    The sum runs over the flattened, contiguous array so numpy's pairwise
    summation always visits the elements in the same order.
    """
    a = as_tensor(a)
    n = a.size
    if n == 0:
        raise DomainError("reduce_mean of an empty tensor")
    flat = np.ascontiguousarray(a.data).reshape(-1)
    value = np.add.reduce(flat) / n
    shape = a.shape
    return _result(np.asarray(value), "mean", (a, lambda g: np.full(shape, float(g.reshape(-1)[0]) / n)))


def transpose(a) -> Tensor:
    a = as_tensor(a)
    if a.data.ndim != 2:
        raise DimensionError(f"transpose needs a matrix, got shape {a.shape}")
    return _result(a.data.T.copy(), "transpose", (a, lambda g: g.T))


def bias_add(a, b) -> Tensor:
    """Add row vector ``b`` (length D) to every row of ``a`` (N x D)."""
    a, b = as_tensor(a), as_tensor(b)
    if a.data.ndim != 2 or b.data.reshape(-1).shape[0] != a.shape[1]:
        raise DimensionError(f"bias_add shape mismatch: {a.shape} + {b.shape}")
    row = b.data.reshape(1, -1)
    b_shape = b.shape
    return _result(
        a.data + row, "bias_add",
        (a, lambda g: g),
        (b, lambda g: np.add.reduce(g, axis=0).reshape(b_shape)),
    )


def concat(tensors: Sequence, axis: int = 1) -> Tensor:
    """Concatenate matrices along columns (``axis=1``) or rows (``axis=0``)."""
    parts = [as_tensor(t) for t in tensors]
    if not parts:
        raise DomainError("concat of zero tensors")
    try:
        value = np.concatenate([p.data for p in parts], axis=axis)
    except ValueError as e:
        shapes = ", ".join(str(p.shape) for p in parts)
        raise DimensionError(f"concat shape mismatch along axis {axis}: {shapes}") from e

    bounds = np.cumsum([0] + [p.shape[axis] for p in parts])
    parents = []
    for part, start, stop in zip(parts, bounds[:-1], bounds[1:]):
        index = [slice(None)] * value.ndim
        index[axis] = slice(int(start), int(stop))
        sl = tuple(index)
        parents.append((part, lambda g, sl=sl: g[sl]))
    return _result(value, "concat", *parents)


def linear(x, weight, bias=None) -> Tensor:
    """Rows of ``x`` mapped through ``weight`` (D_out x D_in), plus an optional bias."""
    out = matmul(x, transpose(weight))
    return out if bias is None else bias_add(out, bias)
