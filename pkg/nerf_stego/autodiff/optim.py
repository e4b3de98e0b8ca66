"""Adam optimizer."""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..errors import ConfigError, NumericError
from .tensor import Tensor


@dataclass
class AdamState:
    """Moment buffers, step counter and hyperparameters of one Adam run."""
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)
    t: int = 0
    lr: float = 1e-5
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.lr <= 0:
            raise ConfigError(f"Learning rate must be positive, got {self.lr}")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ConfigError(f"Adam betas must lie in [0, 1), got {self.beta1}, {self.beta2}")

    @classmethod
    def for_params(cls, params: Sequence[Tensor], lr: float = 1e-5, **kwargs) -> "AdamState":
        return cls(
            m=[np.zeros_like(p.data) for p in params],
            v=[np.zeros_like(p.data) for p in params],
            lr=lr,
            **kwargs,
        )


def adam_step(
    params: Sequence[Tensor],
    grads: Sequence[Optional[np.ndarray]],
    state: AdamState,
) -> AdamState:
    """
    Apply one bias-corrected Adam update in place.

    Args:
        params: Parameter tensors, updated in place
        grads: One gradient per parameter (None counts as zero)
        state: Moment buffers; its step counter is incremented by one

    Returns:
        The same state object, advanced

    Raises:
        NumericError: If any gradient holds NaN/Inf; nothing is modified then
    """
    if len(params) != len(grads) or len(params) != len(state.m):
        raise ConfigError("Adam state does not match the parameter set")
    for i, (p, g) in enumerate(zip(params, grads)):
        if g is None:
            continue
        if g.shape != p.shape or state.m[i].shape != p.shape:
            raise ConfigError(f"Gradient {i} shape {g.shape} does not match parameter {p.shape}")
        if not np.all(np.isfinite(g)):
            raise NumericError(f"Non-finite gradient for parameter {i}; Adam step rejected")

    state.t += 1
    b1, b2 = state.beta1, state.beta2
    correction1 = 1.0 - b1 ** state.t
    correction2 = 1.0 - b2 ** state.t
    for i, (p, g) in enumerate(zip(params, grads)):
        if g is None:
            g = np.zeros_like(p.data)
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * g
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g
        m_hat = state.m[i] / correction1
        v_hat = state.v[i] / correction2
        p.data = (p.data - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)).astype(p.data.dtype)
    return state


class Adam:
    """Stateful wrapper around :func:`adam_step` reading ``param.grad``."""

    def __init__(self, params: Sequence[Tensor], lr: float = 1e-5,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.params = list(params)
        self.state = AdamState.for_params(self.params, lr=lr, beta1=beta1, beta2=beta2, eps=eps)

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()

    def step(self) -> None:
        adam_step(self.params, [p.grad for p in self.params], self.state)


__all__ = ["AdamState", "adam_step", "Adam"]
