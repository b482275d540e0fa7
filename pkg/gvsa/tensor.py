"""
Graph-variate tensors: Ω(t) = W ∘ J(t), stored densely per slice or implicitly.

Construction order for a window X (N, T), following the layer definition:

    1. X' = zscore_nodes(X) when zave is on
    2. J(t) from X' for every t (node_function_tensor)
    3. Ω(t) = W ∘ J(t)
    4. Ω(t) <- D^{-1/2}(Ω(t) + I)D^{-1/2} when renormalize is on

A leading batch axis is accepted everywhere.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from core.utils import DimMismatch, check_finite
from gvsa.node_functions import (
    NodeFunctionKind,
    ic_factors,
    lde_factors,
    node_function_tensor,
)
from gvsa.supports import SupportMatrix
from linalg.dense import batched_matvec

logger = logging.getLogger(__name__)

ZAVE_EPS = 1e-5
RENORM_EPS = 1e-5

SupportLike = Union[SupportMatrix, np.ndarray]


def support_values(support: SupportLike) -> np.ndarray:
    """The effective (N, N) matrix of a SupportMatrix, or an array as given."""
    if isinstance(support, SupportMatrix):
        return support.effective()
    return np.asarray(support, dtype=np.float64)


def zscore_nodes(x, eps: float = ZAVE_EPS) -> np.ndarray:
    """
    Z-score each time sample across nodes.

    For every column t: (x(t) - mean_i x_i(t)) / (std_i x_i(t) + eps), with the
    unbiased (N - 1) standard deviation. Works on (N, T) or (B, N, T).
    """
    x = np.asarray(x, dtype=np.float64)
    mu = x.mean(axis=-2, keepdims=True)
    std = x.std(axis=-2, ddof=1, keepdims=True)
    return (x - mu) / (std + eps)


def renormalize_parts(
    slices: np.ndarray, eps: float = RENORM_EPS
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Renormalize and return the intermediates backward passes need.

    Returns:
        (out, deg, inv) where deg are the row sums of slices + I and
        inv = max(deg, eps)^{-1/2}.
    """
    n = slices.shape[-1]
    shifted = slices + np.eye(n)
    deg = shifted.sum(axis=-1)
    inv = 1.0 / np.sqrt(np.maximum(deg, eps))
    out = inv[..., :, None] * shifted * inv[..., None, :]
    return out, deg, inv


def renormalize_dynamic(slices, eps: float = RENORM_EPS) -> np.ndarray:
    """
    D^{-1/2}(A + I)D^{-1/2} slice-wise, with degrees clamped below at eps.

    Negative or zero degrees are clamped to eps as well, so the output is always
    finite. Works on a single (N, N) slice or any stack (..., N, N).
    """
    slices = np.asarray(slices, dtype=np.float64)
    return renormalize_parts(slices, eps)[0]


@dataclass
class GraphVariateTensor:
    """Per-time slices Ω(t), time-first: (T, N, N) or (B, T, N, N)."""

    slices: np.ndarray
    renormalized: bool
    kind: NodeFunctionKind

    @property
    def length(self) -> int:
        return self.slices.shape[-3]

    @property
    def node_count(self) -> int:
        return self.slices.shape[-1]

    def apply(self, x) -> np.ndarray:
        """Ω(t) x(t) for every t."""
        return batched_matvec(self.slices, np.asarray(x, dtype=np.float64))


def _check_support(x: np.ndarray, w: np.ndarray) -> None:
    if x.ndim not in (2, 3):
        raise DimMismatch(f"Signal must be (N, T) or (B, N, T), got {x.shape}")
    n = x.shape[-2]
    if w.shape != (n, n):
        raise DimMismatch(f"Support is {w.shape} but the signal has {n} nodes")


def graph_variate_tensor(
    x,
    support: SupportLike,
    kind: NodeFunctionKind,
    renormalize: bool = False,
    zave: bool = False,
) -> GraphVariateTensor:
    """
    Build Ω(t) = W ∘ J(t) for a window or a batch of windows.

    Args:
        x: (N, T) or (B, N, T) signal
        support: SupportMatrix or plain (N, N) array
        kind: Node function
        renormalize: Apply renormalize_dynamic to every slice
        zave: Z-score x across nodes per time sample before building J

    Raises:
        DimMismatch: If the support size does not match the node count
    """
    x = np.asarray(x, dtype=np.float64)
    w = support_values(support)
    _check_support(x, w)
    check_finite("signal", x)

    if zave:
        x = zscore_nodes(x)
    slices = w * node_function_tensor(x, kind)
    if renormalize:
        slices = renormalize_dynamic(slices)
    logger.debug(
        f"Built graph-variate tensor {slices.shape} ({kind.label()}, renormalize={renormalize})"
    )
    return GraphVariateTensor(slices=slices, renormalized=renormalize, kind=kind)


def _time_first(x: np.ndarray) -> np.ndarray:
    return np.swapaxes(x, -1, -2)


class LowRankGraphVariateOperator:
    """
    Ω(t) applied without storing it.

    J(t) is kept as factors L(t) R(t)ᵀ (rank 3 for LDE, rank 1 for IC, both for
    a combination), so Ω(t) v = Σ_k l_k ∘ (W (r_k ∘ v)). IC without its
    diagonal subtracts the diagonal term explicitly. Renormalization uses the
    degrees Ω(t)·1 + 1 computed through the same operator.
    """

    def __init__(
        self,
        x,
        support: SupportLike,
        kind: NodeFunctionKind,
        renormalize: bool = False,
        zave: bool = False,
        eps: float = RENORM_EPS,
    ):
        x = np.asarray(x, dtype=np.float64)
        self.w = support_values(support)
        _check_support(x, self.w)
        if zave:
            x = zscore_nodes(x)
        self.kind = kind
        self.shape = x.shape
        self.left, self.right, self.diagonal = self._factors(x, kind)
        self.inv: Optional[np.ndarray] = None
        if renormalize:
            deg = self._raw_apply(np.ones(self.left.shape[:-1])) + 1.0
            self.inv = 1.0 / np.sqrt(np.maximum(deg, eps))

    @property
    def rank(self) -> int:
        return self.left.shape[-1]

    def _factors(self, x: np.ndarray, kind: NodeFunctionKind):
        xs = _time_first(x)
        lefts, rights = [], []
        diagonal = None
        if kind.uses_ic:
            mean = _time_first(x.mean(axis=-1, keepdims=True))
            left, right = ic_factors(xs, mean)
            lefts.append(kind.ic_weight * left)
            rights.append(right)
            if not kind.keep_diagonal:
                diagonal = kind.ic_weight * right[..., 0] ** 2 * np.diag(self.w)
        if kind.uses_lde:
            left, right = lde_factors(xs)
            lefts.append(kind.lde_weight * left)
            rights.append(right)
        return np.concatenate(lefts, axis=-1), np.concatenate(rights, axis=-1), diagonal

    def _raw_apply(self, vs: np.ndarray) -> np.ndarray:
        """Ω(t) v(t) with v time-first (..., T, N)."""
        inner = np.einsum("ij,...tjk->...tik", self.w, self.right * vs[..., None])
        out = np.einsum("...tik,...tik->...ti", self.left, inner)
        if self.diagonal is not None:
            out = out - self.diagonal * vs
        return out

    def apply(self, v) -> np.ndarray:
        """
        Ω(t) v(t) for every t.

        Args:
            v: Array shaped like the signal the operator was built from

        Returns:
            Array of the same shape.
        """
        v = np.asarray(v, dtype=np.float64)
        if v.shape != self.shape:
            raise DimMismatch(f"Operator built for {self.shape}, got {v.shape}")
        vs = _time_first(v)
        if self.inv is None:
            return _time_first(self._raw_apply(vs))
        scaled = self.inv * vs
        out = self.inv * (self._raw_apply(scaled) + scaled)
        return _time_first(out)

    def densify(self) -> np.ndarray:
        """Materialize the slices, (..., T, N, N). Meant for testing."""
        j = np.einsum("...tik,...tjk->...tij", self.left, self.right)
        slices = self.w * j
        if self.diagonal is not None:
            idx = np.arange(self.w.shape[0])
            slices[..., idx, idx] -= self.diagonal
        if self.inv is not None:
            n = self.w.shape[0]
            slices = self.inv[..., :, None] * (slices + np.eye(n)) * self.inv[..., None, :]
        return slices
