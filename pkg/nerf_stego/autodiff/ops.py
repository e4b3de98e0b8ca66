"""Differentiable primitives: elementwise math, reductions, dense and conv layers."""

from typing import Any, Optional, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import DimensionError
from .tensor import Tensor, as_tensor, make_result


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to ``shape``."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, dim in enumerate(shape):
        if dim == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _check_broadcast(a: Tensor, b: Tensor, op: str) -> None:
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError as e:
        raise DimensionError(f"{op}: shapes {a.shape} and {b.shape} do not broadcast") from e


# Elementwise arithmetic


def add(a: Any, b: Any) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a, b, "add")
    return make_result(
        a.data + b.data,
        (a, b),
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)),
        "add",
    )


def sub(a: Any, b: Any) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a, b, "sub")
    return make_result(
        a.data - b.data,
        (a, b),
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)),
        "sub",
    )


def mul(a: Any, b: Any) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a, b, "mul")
    return make_result(
        a.data * b.data,
        (a, b),
        lambda g: (_unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)),
        "mul",
    )


def div(a: Any, b: Any) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a, b, "div")
    out = a.data / b.data
    return make_result(
        out,
        (a, b),
        lambda g: (
            _unbroadcast(g / b.data, a.shape),
            _unbroadcast(-g * out / b.data, b.shape),
        ),
        "div",
    )


def neg(a: Tensor) -> Tensor:
    return make_result(-a.data, (a,), lambda g: (-g,), "neg")


def exp(a: Tensor) -> Tensor:
    out = np.exp(a.data)
    return make_result(out, (a,), lambda g: (g * out,), "exp")


# Activations


def relu(x: Tensor) -> Tensor:
    """max(0, x); the gradient at exactly 0 is 0."""
    mask = x.data > 0
    return make_result(np.where(mask, x.data, 0).astype(x.data.dtype), (x,),
                       lambda g: (g * mask,), "relu")


def sigmoid(x: Tensor) -> Tensor:
    """
    Numerically stable logistic function.

    Outputs stay strictly inside (0, 1) even where the exact value rounds to an
    endpoint in the working precision.
    """
    z = np.exp(-np.abs(x.data))
    out = np.where(x.data >= 0, 1.0 / (1.0 + z), z / (1.0 + z)).astype(x.data.dtype)
    dtype = out.dtype
    out = np.clip(out, np.finfo(dtype).tiny, np.nextafter(dtype.type(1), dtype.type(0)))
    return make_result(out, (x,), lambda g: (g * out * (1 - out),), "sigmoid")


# Shape and reductions


def reshape(a: Tensor, shape: Sequence[int]) -> Tensor:
    return make_result(
        a.data.reshape(shape), (a,), lambda g: (g.reshape(a.shape),), "reshape"
    )


def sum(a: Tensor, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:  # noqa: A001
    def _backward(g: np.ndarray):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.shape).copy(),)

    return make_result(a.data.sum(axis=axis, keepdims=keepdims), (a,), _backward, "sum")


def mean(a: Tensor, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:
    count = a.size if axis is None else a.shape[axis]
    return sum(a, axis=axis, keepdims=keepdims) * (1.0 / count)


def cumsum(a: Tensor, axis: int = -1) -> Tensor:
    """Inclusive running sum; the gradient is the reversed running sum."""
    def _backward(g: np.ndarray):
        return (np.flip(np.cumsum(np.flip(g, axis), axis=axis), axis),)

    return make_result(np.cumsum(a.data, axis=axis), (a,), _backward, "cumsum")


def concat(tensors: Sequence[Any], axis: int = -1) -> Tensor:
    parts = tuple(as_tensor(t) for t in tensors)
    sizes = [p.shape[axis] for p in parts]
    bounds = np.cumsum(sizes)[:-1]
    try:
        out = np.concatenate([p.data for p in parts], axis=axis)
    except ValueError as e:
        raise DimensionError(f"concat: incompatible shapes {[p.shape for p in parts]}") from e
    return make_result(out, parts, lambda g: tuple(np.split(g, bounds, axis=axis)), "concat")


# Dense layers


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError(f"matmul: cannot multiply {a.shape} by {b.shape}")
    return make_result(
        a.data @ b.data,
        (a, b),
        lambda g: (g @ b.data.T, a.data.T @ g),
        "matmul",
    )


def affine(x: Tensor, w: Tensor, b: Tensor) -> Tensor:
    """
    Fully-connected layer out = W x + b.

    Args:
        x: Input vector (N,) or row batch (B, N)
        w: Weights (M, N)
        b: Bias (M,)

    Returns:
        (M,) or (B, M) tensor

    Raises:
        DimensionError: On any shape disagreement
    """
    if w.ndim != 2 or b.shape != (w.shape[0],) or x.ndim not in (1, 2) or x.shape[-1] != w.shape[1]:
        raise DimensionError(
            f"affine: x {x.shape}, W {w.shape}, b {b.shape} are not compatible"
        )
    out = x.data @ w.data.T + b.data

    def _backward(g: np.ndarray):
        gx = g @ w.data
        if x.ndim == 1:
            gw = np.outer(g, x.data)
            gb = g
        else:
            gw = g.T @ x.data
            gb = g.sum(axis=0)
        return gx, gw, gb

    return make_result(out, (x, w, b), _backward, "affine")


# Convolution and pooling


def conv2d(x: Tensor, kernels: Tensor, bias: Tensor, stride: int = 1, padding: int = 0) -> Tensor:
    """
    2D cross-correlation of a C_in x H x W input with C_out x C_in x K x K kernels.

    Output size is floor((H + 2*padding - K) / stride) + 1 per spatial axis.

    Raises:
        DimensionError: On channel mismatch or a kernel larger than the padded input
    """
    if x.ndim != 3 or kernels.ndim != 4:
        raise DimensionError(f"conv2d: expected CxHxW input and OxCxKxK kernels, got "
                             f"{x.shape} and {kernels.shape}")
    c_out, c_in, kh, kw = kernels.shape
    if x.shape[0] != c_in:
        raise DimensionError(f"conv2d: input has {x.shape[0]} channels, kernels expect {c_in}")
    if bias.shape != (c_out,):
        raise DimensionError(f"conv2d: bias shape {bias.shape} != ({c_out},)")
    if stride < 1 or padding < 0:
        raise DimensionError("conv2d: stride must be positive and padding non-negative")
    _, h, w = x.shape
    if h + 2 * padding < kh or w + 2 * padding < kw:
        raise DimensionError(f"conv2d: kernel {kh}x{kw} larger than padded input {h}x{w}")

    xp = np.pad(x.data, ((0, 0), (padding, padding), (padding, padding))) if padding else x.data
    windows = sliding_window_view(xp, (kh, kw), axis=(1, 2))[:, ::stride, ::stride]
    h_out, w_out = windows.shape[1], windows.shape[2]
    out = np.tensordot(kernels.data, windows, axes=([1, 2, 3], [0, 3, 4]))
    out += bias.data[:, None, None]

    def _backward(g: np.ndarray):
        gk = np.tensordot(g, windows, axes=([1, 2], [1, 2]))
        gb = g.sum(axis=(1, 2))
        gcols = np.tensordot(kernels.data, g, axes=([0], [0]))  # C x K x K x H' x W'
        gxp = np.zeros_like(xp)
        for i in range(kh):
            for j in range(kw):
                gxp[:, i:i + stride * (h_out - 1) + 1:stride,
                    j:j + stride * (w_out - 1) + 1:stride] += gcols[:, i, j]
        gx = gxp[:, padding:padding + h, padding:padding + w] if padding else gxp
        return gx, gk, gb

    return make_result(out, (x, kernels, bias), _backward, "conv2d")


def maxpool2d(x: Tensor, k: int, stride: int) -> Tensor:
    """
    Max pooling in floor mode; ties route the gradient to the first maximum.

    Raises:
        DimensionError: If the window exceeds the input
    """
    if x.ndim != 3:
        raise DimensionError(f"maxpool2d: expected CxHxW input, got {x.shape}")
    c, h, w = x.shape
    if k < 1 or stride < 1:
        raise DimensionError("maxpool2d: window and stride must be positive")
    if k > h or k > w:
        raise DimensionError(f"maxpool2d: window {k} larger than input {h}x{w}")

    windows = sliding_window_view(x.data, (k, k), axis=(1, 2))[:, ::stride, ::stride]
    h_out, w_out = windows.shape[1], windows.shape[2]
    flat = windows.reshape(c, h_out, w_out, k * k)
    idx = flat.argmax(axis=-1)
    out = np.take_along_axis(flat, idx[..., None], axis=-1)[..., 0]

    def _backward(g: np.ndarray):
        ch = np.arange(c)[:, None, None]
        rows = np.arange(h_out)[None, :, None] * stride + idx // k
        cols = np.arange(w_out)[None, None, :] * stride + idx % k
        gx = np.zeros_like(x.data)
        np.add.at(gx, (np.broadcast_to(ch, idx.shape), rows, cols), g)
        return (gx,)

    return make_result(out, (x,), _backward, "maxpool2d")


# Losses


def mse_loss(pred: Tensor, target: Any) -> Tensor:
    """Mean of squared differences over every element."""
    target = as_tensor(target)
    if pred.shape != target.shape:
        raise DimensionError(f"mse_loss: prediction {pred.shape} vs target {target.shape}")
    diff = pred.data - target.data
    n = diff.size
    out = np.asarray((diff * diff).sum() / n, dtype=pred.data.dtype)
    return make_result(
        out,
        (pred, target),
        lambda g: (g * 2.0 * diff / n, -g * 2.0 * diff / n),
        "mse_loss",
    )


__all__ = [
    "add",
    "sub",
    "mul",
    "div",
    "neg",
    "exp",
    "relu",
    "sigmoid",
    "reshape",
    "sum",
    "mean",
    "cumsum",
    "concat",
    "matmul",
    "affine",
    "conv2d",
    "maxpool2d",
    "mse_loss",
]
