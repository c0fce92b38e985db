"""
Dense Tensor with Reverse-Mode Differentiation
"""
from contextlib import contextmanager
from typing import Callable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import ContractError

ArrayLike = Union[np.ndarray, Sequence, float, int]
VJP = Callable[[np.ndarray], np.ndarray]


class Tensor:
    """A 64-bit dense array that records how it was computed.

    Leaves created with ``requires_grad=True`` are trainable parameters. Every
    operation in ``autodiff.ops`` returns a new Tensor holding references to its
    inputs together with the vector-Jacobian product for each of them, so the
    tape is rebuilt on every forward pass.
    """

    __slots__ = ("data", "_grad", "requires_grad", "name", "_parents", "_op")

    def __init__(
        self,
        data: ArrayLike,
        requires_grad: bool = False,
        name: Optional[str] = None,
        _parents: Tuple[Tuple["Tensor", VJP], ...] = (),
        _op: str = "",
        _owned: bool = False,
    ):
        # Op results are fresh arrays and are frozen without a copy
        array = np.asarray(data, dtype=np.float64) if _owned else np.array(data, dtype=np.float64)
        array.flags.writeable = False
        self.data = array
        self._grad: Optional[np.ndarray] = None
        self.requires_grad = requires_grad
        self.name = name
        self._parents = _parents
        self._op = _op

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}{label}, op={self._op or 'leaf'!r})"

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def is_leaf(self) -> bool:
        return not self._parents

    @property
    def grad(self) -> np.ndarray:
        """Accumulated gradient; zeros until a backward pass reaches this node."""
        if self._grad is None:
            return np.zeros_like(self.data)
        return self._grad

    @grad.setter
    def grad(self, value: np.ndarray) -> None:
        self._grad = np.asarray(value, dtype=np.float64)

    def item(self) -> float:
        if self.data.size != 1:
            raise ContractError(f"item() needs a single element, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        """Writable copy of the value."""
        return np.array(self.data)

    def assign(self, values: np.ndarray) -> None:
        """Replace a leaf's value in place (optimizer updates, checkpoint loads)."""
        values = np.asarray(values, dtype=np.float64)
        if values.shape != self.shape:
            raise ContractError(f"cannot assign shape {values.shape} to tensor of shape {self.shape}")
        array = np.array(values)
        array.flags.writeable = False
        self.data = array

    def zero_grad(self) -> None:
        self._grad = None

    def detach(self) -> "Tensor":
        return Tensor(self.data, requires_grad=False, name=self.name)

    def backward(self) -> None:
        """Accumulate d(self)/d(node) into ``grad`` of every reachable node.

        Gradients add onto whatever is already stored, so two calls without
        ``zero_grad`` double every gradient.
        """
        if self.data.size != 1:
            raise ContractError(f"backward() needs a scalar root, got shape {self.shape}")

        pending = {id(self): np.ones_like(self.data)}
        for node in reversed(self._topological_order()):
            upstream = pending.pop(id(node), None)
            if upstream is None:
                continue
            if node.requires_grad or node is self:
                node._grad = upstream if node._grad is None else node._grad + upstream
            for parent, vjp in node._parents:
                if not parent.requires_grad:
                    continue
                contribution = vjp(upstream)
                key = id(parent)
                pending[key] = pending[key] + contribution if key in pending else contribution

    def _topological_order(self) -> List["Tensor"]:
        order: List[Tensor] = []
        seen = set()
        stack: List[Tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent, _ in node._parents:
                if id(parent) not in seen:
                    stack.append((parent, False))
        return order

    # Operator sugar; the real definitions live in autodiff.ops

    def __add__(self, other):
        from .ops import ewise
        return ewise("add", self, other)

    def __radd__(self, other):
        from .ops import ewise
        return ewise("add", other, self)

    def __sub__(self, other):
        from .ops import ewise
        return ewise("sub", self, other)

    def __rsub__(self, other):
        from .ops import ewise
        return ewise("sub", other, self)

    def __mul__(self, other):
        from .ops import ewise
        return ewise("mul", self, other)

    def __rmul__(self, other):
        from .ops import ewise
        return ewise("mul", other, self)

    def __neg__(self):
        from .ops import unary
        return unary("neg", self)

    def __matmul__(self, other):
        from .ops import matmul
        return matmul(self, other)


def as_tensor(value: Union["Tensor", ArrayLike]) -> Tensor:
    """Wrap plain numbers and arrays as constant leaves."""
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def parameter(data: ArrayLike, name: str) -> Tensor:
    return Tensor(data, requires_grad=True, name=name)


def constant(data: ArrayLike, name: Optional[str] = None) -> Tensor:
    return Tensor(data, requires_grad=False, name=name)


_grad_enabled = True


def grad_enabled() -> bool:
    return _grad_enabled


@contextmanager
def no_grad() -> Iterator[None]:
    """Evaluate without recording a tape (rendering, metrics, finite differences)."""
    global _grad_enabled
    previous = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = previous
