"""
Node functions: the per-time connectivity profile J(t).

Two node functions are supported, plus their linear combination:

- IC (instantaneous correlation): J_ij = |d_i d_j| with d = x(t) minus the
  temporal mean of the window. The full outer product keeps its diagonal unless
  `keep_diagonal` is false.
- LDE (local Dirichlet energy): J_ij = (x_i - x_j)^2, zero on the diagonal.

Everything here accepts a window (N, T) or a batch of windows (B, N, T) and
produces slices stacked time-first: (T, N, N) or (B, T, N, N).
"""

import re
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from core.utils import ConfigError

IC = "ic"
LDE = "lde"
COMBO = "combo"

VARIANTS = (IC, LDE, COMBO)


@dataclass(frozen=True)
class NodeFunctionKind:
    """Which node function to evaluate, and its options."""

    variant: str = LDE
    alpha: float = 1.0
    beta: float = 1.0
    keep_diagonal: bool = True

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(
                f"Unknown node function '{self.variant}'. Choose from {', '.join(VARIANTS)}"
            )
        if not (np.isfinite(self.alpha) and np.isfinite(self.beta)):
            raise ConfigError("Combo weights must be finite")

    @property
    def uses_ic(self) -> bool:
        return self.variant in (IC, COMBO)

    @property
    def uses_lde(self) -> bool:
        return self.variant in (LDE, COMBO)

    @property
    def factor_rank(self) -> int:
        """Columns of the factors L, R with J(t) = L(t) R(t)ᵀ."""
        return (1 if self.uses_ic else 0) + (3 if self.uses_lde else 0)

    @property
    def ic_weight(self) -> float:
        return self.alpha if self.variant == COMBO else 1.0

    @property
    def lde_weight(self) -> float:
        return self.beta if self.variant == COMBO else 1.0

    def label(self) -> str:
        if self.variant == COMBO:
            return f"combo:{self.alpha:g},{self.beta:g}"
        return self.variant

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "alpha": self.alpha,
            "beta": self.beta,
            "keep_diagonal": self.keep_diagonal,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "NodeFunctionKind":
        return cls(
            variant=payload["variant"],
            alpha=float(payload.get("alpha", 1.0)),
            beta=float(payload.get("beta", 1.0)),
            keep_diagonal=bool(payload.get("keep_diagonal", True)),
        )


_COMBO_PATTERN = re.compile(r"^combo:([^,]+),([^,]+)$")


def parse_node_function(text: str, keep_diagonal: bool = True) -> NodeFunctionKind:
    """
    Parse a node function flag: `ic`, `lde` or `combo:ALPHA,BETA`.

    Raises:
        ConfigError: If the text matches none of the forms
    """
    value = text.strip().lower()
    if value in (IC, LDE):
        return NodeFunctionKind(variant=value, keep_diagonal=keep_diagonal)
    match = _COMBO_PATTERN.match(value)
    if match:
        try:
            alpha, beta = float(match.group(1)), float(match.group(2))
        except ValueError:
            raise ConfigError(f"Invalid combo weights in '{text}'")
        return NodeFunctionKind(COMBO, alpha, beta, keep_diagonal)
    raise ConfigError(
        f"Invalid node function '{text}'. Expected ic, lde or combo:ALPHA,BETA"
    )


def node_function_lde(x_t) -> np.ndarray:
    x = np.asarray(x_t, dtype=np.float64)
    diff = np.subtract.outer(x, x)
    return diff * diff


def node_function_ic(x_t, temporal_mean, keep_diagonal: bool = True) -> np.ndarray:
    d = np.asarray(x_t, dtype=np.float64) - np.asarray(temporal_mean, dtype=np.float64)
    j = np.abs(np.multiply.outer(d, d))
    if not keep_diagonal:
        np.fill_diagonal(j, 0.0)
    return j


def node_function_combo(
    x_t, temporal_mean, alpha: float, beta: float, keep_diagonal: bool = True
) -> np.ndarray:
    """alpha * IC + beta * LDE, entrywise."""
    return alpha * node_function_ic(x_t, temporal_mean, keep_diagonal) + (
        beta * node_function_lde(x_t)
    )


def evaluate_node_function(x_t, temporal_mean, kind: NodeFunctionKind) -> np.ndarray:
    """Single-time dispatch on `kind`."""
    if kind.variant == LDE:
        return node_function_lde(x_t)
    if kind.variant == IC:
        return node_function_ic(x_t, temporal_mean, kind.keep_diagonal)
    return node_function_combo(
        x_t, temporal_mean, kind.alpha, kind.beta, kind.keep_diagonal
    )


def centered_deviations(x: np.ndarray) -> np.ndarray:
    """x minus its mean over the time axis, returned time-first: (..., T, N)."""
    d = x - x.mean(axis=-1, keepdims=True)
    return np.swapaxes(d, -1, -2)


def node_function_tensor(x, kind: NodeFunctionKind) -> np.ndarray:
    """
    J(t) for every time step of a window.

    Args:
        x: (N, T) window or (B, N, T) batch
        kind: Node function selection

    Returns:
        (T, N, N) or (B, T, N, N) stack of symmetric slices.
    """
    x = np.asarray(x, dtype=np.float64)
    out = None
    if kind.uses_ic:
        d = centered_deviations(x)
        ic = np.abs(d[..., :, None] * d[..., None, :])
        if not kind.keep_diagonal:
            n = x.shape[-2]
            ic = ic * (1.0 - np.eye(n))
        out = kind.ic_weight * ic if kind.variant == COMBO else ic
    if kind.uses_lde:
        xs = np.swapaxes(x, -1, -2)
        diff = xs[..., :, None] - xs[..., None, :]
        lde = diff * diff
        lde = kind.lde_weight * lde if kind.variant == COMBO else lde
        out = lde if out is None else out + lde
    return out


def lde_factors(x_t) -> Tuple[np.ndarray, np.ndarray]:
    """
    Rank-3 factors of the LDE profile: J = L Rᵀ = u1ᵀ - 2xxᵀ + 1uᵀ, u = x∘x.

    x_t may be a single (N,) sample or a time-first stack (..., N).

    Returns:
        (L, R), each (..., N, 3).
    """
    x = np.asarray(x_t, dtype=np.float64)
    ones = np.ones_like(x)
    u = x * x
    left = np.stack([u, -2.0 * x, ones], axis=-1)
    right = np.stack([ones, x, u], axis=-1)
    return left, right


def ic_factors(x_t, temporal_mean) -> Tuple[np.ndarray, np.ndarray]:
    """Rank-1 factors of the IC profile with its diagonal kept: J = |d||d|ᵀ, (..., N, 1)."""
    d = np.abs(np.asarray(x_t, dtype=np.float64) - np.asarray(temporal_mean))
    return d[..., None], d[..., None]


def ic_abs_subgradient(u):
    """Derivative of |u|, with 0 chosen at u = 0."""
    return np.sign(u)
