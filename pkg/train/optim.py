"""
Adam over named parameter arrays, updated in place.

Moments are kept per parameter name and created lazily as zeros on first use.
"""

from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from core.utils import ConfigError, ShapeMismatch


@dataclass
class AdamState:
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)
    t: int = 0


def adam_step(
    params: Dict[str, np.ndarray],
    grads: Dict[str, np.ndarray],
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
    weight_decay: float = 0.0,
):
    """
    One bias-corrected Adam update of every array in `params`.

    Args:
        params: Live arrays, modified in place
        grads: Gradients keyed like params
        state: Moments and step counter, modified in place
        weight_decay: L2 coefficient added to the gradient (0 disables it)

    Returns:
        (params, state)

    Raises:
        ShapeMismatch: If a gradient is missing or shaped differently from its parameter
    """
    for name, arr in params.items():
        if name not in grads:
            raise ShapeMismatch(f"No gradient for parameter '{name}'")
        if grads[name].shape != arr.shape:
            raise ShapeMismatch(
                f"Gradient for '{name}' is {grads[name].shape}, parameter is {arr.shape}"
            )

    state.t += 1
    bc1 = 1.0 - beta1 ** state.t
    bc2 = 1.0 - beta2 ** state.t
    step_size = lr / bc1

    for name, arr in params.items():
        g = grads[name]
        if weight_decay:
            g = g + weight_decay * arr
        if name not in state.m:
            state.m[name] = np.zeros_like(arr)
            state.v[name] = np.zeros_like(arr)
        m, v = state.m[name], state.v[name]
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * (g * g)
        arr -= step_size * m / (np.sqrt(v / bc2) + eps)
    return params, state


class Adam:
    """Stateful wrapper that owns the moments between steps."""

    def __init__(
        self,
        lr: float = 1e-4,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
        weight_decay: float = 0.0,
    ):
        if lr < 0.0:
            raise ConfigError(f"Learning rate must be >= 0, got {lr}")
        if not (0.0 <= beta1 < 1.0 and 0.0 <= beta2 < 1.0):
            raise ConfigError(f"Adam betas must lie in [0, 1), got {beta1}, {beta2}")
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.weight_decay = weight_decay
        self.state = AdamState()

    @property
    def steps(self) -> int:
        return self.state.t

    def step(self, params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray]) -> None:
        adam_step(
            params,
            grads,
            self.state,
            self.lr,
            self.beta1,
            self.beta2,
            self.eps,
            self.weight_decay,
        )


def global_norm(grads: Dict[str, np.ndarray]) -> float:
    return float(np.sqrt(sum(float(np.sum(g * g)) for g in grads.values())))


def clip_gradients(
    grads: Dict[str, np.ndarray], max_norm: Optional[float]
) -> Dict[str, np.ndarray]:
    """Rescale so the global L2 norm is at most max_norm; None or 0 disables clipping."""
    if not max_norm:
        return grads
    if max_norm < 0.0:
        raise ConfigError(f"Clip norm must be >= 0, got {max_norm}")
    norm = global_norm(grads)
    if norm <= max_norm:
        return grads
    scale = max_norm / norm
    return {name: g * scale for name, g in grads.items()}
