"""Dense tensor with reverse-mode automatic differentiation."""

from contextlib import contextmanager
from typing import Any, Callable, Iterator, Optional, Sequence

import numpy as np

from ..errors import UsageError

# Backward closures map the upstream gradient to one gradient (or None) per parent.
BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]

_grad_enabled = True
_default_dtype: type = np.float32


class no_grad:
    """Context manager that stops graph recording (inference, rendering)."""

    def __enter__(self):
        global _grad_enabled
        self.prev = _grad_enabled
        _grad_enabled = False

    def __exit__(self, *args):
        global _grad_enabled
        _grad_enabled = self.prev


def is_grad_enabled() -> bool:
    return _grad_enabled


@contextmanager
def float64_mode() -> Iterator[None]:
    """
    Create every tensor in 64-bit precision inside the block.

    Training runs in float32; the 64-bit mode exists for finite-difference
    gradient checks.
    """
    global _default_dtype
    prev = _default_dtype
    _default_dtype = np.float64
    try:
        yield
    finally:
        _default_dtype = prev


def default_dtype() -> type:
    return _default_dtype


class Tensor:
    """
    Row-major float array that records the operations producing it.

    Attributes:
        data: Underlying numpy array (float32, or float64 in 64-bit mode)
        requires_grad: Whether gradients flow to this tensor
        grad: Accumulated gradient for leaf tensors, same shape as data
    """

    def __init__(
        self,
        data: Any,
        requires_grad: bool = False,
        _parents: tuple["Tensor", ...] = (),
        _backward: Optional[BackwardFn] = None,
        _op: str = "",
    ):
        self.data = np.asarray(data, dtype=_default_dtype)
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self._parents = _parents
        self._backward = _backward
        self._op = _op

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def is_leaf(self) -> bool:
        return not self._parents

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        return float(self.data.reshape(-1)[0])

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def backward(self, retain_graph: bool = False) -> None:
        backward(self, retain_graph=retain_graph)

    def __repr__(self) -> str:
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}{flag})"

    # Operators delegate to autodiff.ops

    def __add__(self, other):
        from .ops import add
        return add(self, other)

    def __radd__(self, other):
        from .ops import add
        return add(other, self)

    def __sub__(self, other):
        from .ops import sub
        return sub(self, other)

    def __rsub__(self, other):
        from .ops import sub
        return sub(other, self)

    def __mul__(self, other):
        from .ops import mul
        return mul(self, other)

    def __rmul__(self, other):
        from .ops import mul
        return mul(other, self)

    def __truediv__(self, other):
        from .ops import div
        return div(self, other)

    def __neg__(self):
        from .ops import neg
        return neg(self)

    def __matmul__(self, other):
        from .ops import matmul
        return matmul(self, other)


def as_tensor(value: Any) -> Tensor:
    """Wrap constants; tensors pass through unchanged."""
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def make_result(
    data: np.ndarray,
    parents: tuple[Tensor, ...],
    backward_fn: BackwardFn,
    op: str,
) -> Tensor:
    """Build an op output, recording the graph only when some parent needs gradients."""
    needs_grad = _grad_enabled and any(p.requires_grad for p in parents)
    if not needs_grad:
        return Tensor(data)
    return Tensor(data, requires_grad=True, _parents=parents, _backward=backward_fn, _op=op)


def _topological_order(root: Tensor) -> list[Tensor]:
    order: list[Tensor] = []
    visited: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if parent.requires_grad and id(parent) not in visited:
                stack.append((parent, False))
    return order


def backward(loss: Tensor, retain_graph: bool = False) -> None:
    """
    Propagate d(loss)/d(x) into ``x.grad`` for every leaf x with requires_grad.

    Gradients accumulate additively, both across fan-out inside one graph and
    across repeated calls (clear them with ``zero_grad``). The graph is released
    after the pass unless ``retain_graph`` is set.

    Args:
        loss: Scalar tensor produced by recorded operations
        retain_graph: Keep the recorded graph for another backward pass

    Raises:
        UsageError: If loss is not a scalar or its graph was already released
    """
    if loss.size != 1:
        raise UsageError(f"backward() needs a scalar loss, got shape {loss.shape}")
    if not loss.requires_grad:
        raise UsageError("backward() on a tensor that does not require gradients")
    if not loss.is_leaf and loss._backward is None:
        raise UsageError("Graph already released; pass retain_graph=True to backward twice")

    order = _topological_order(loss)
    grads: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}

    for node in reversed(order):
        g = grads.pop(id(node), None)
        if g is None:
            continue
        if node.is_leaf:
            node.grad = g.copy() if node.grad is None else node.grad + g
            continue
        if node._backward is None:
            raise UsageError("Graph already released; pass retain_graph=True to backward twice")
        parent_grads = node._backward(g)
        for parent, pg in zip(node._parents, parent_grads):
            if pg is None or not parent.requires_grad:
                continue
            key = id(parent)
            if key in grads:
                grads[key] = grads[key] + pg
            else:
                grads[key] = pg

    if not retain_graph:
        for node in order:
            if not node.is_leaf:
                node._backward = None


__all__ = [
    "Tensor",
    "no_grad",
    "float64_mode",
    "default_dtype",
    "is_grad_enabled",
    "as_tensor",
    "make_result",
    "backward",
]
