"""
Naive Kronecker-expanded graph-variate convolution.

The full (NT)×(NT) kernel is materialized: block (t, s) equals
L_T[t, s] · Ω(s), and the kernel is applied to the time-major vectorization of
X. This costs O(N²T²) in time and memory and serves as the reference the
batched path is checked and benchmarked against.
"""

import logging
from typing import Optional

import numpy as np

from core.config import get_settings
from core.utils import DimMismatch, MemoryBudgetExceeded
from gvsa.node_functions import NodeFunctionKind
from gvsa.tensor import SupportLike, graph_variate_tensor, zscore_nodes
from linalg.dense import as_matrix, require_square

logger = logging.getLogger(__name__)


def path_adjacency(t_len: int) -> np.ndarray:
    """Adjacency of the path graph over T time steps."""
    adjacency = np.zeros((t_len, t_len))
    idx = np.arange(t_len - 1)
    adjacency[idx, idx + 1] = 1.0
    adjacency[idx + 1, idx] = 1.0
    return adjacency


def kron_kernel(slices: np.ndarray, temporal: np.ndarray) -> np.ndarray:
    """The (NT, NT) kernel with block (t, s) = temporal[t, s] · slices[s]."""
    t_len, n, _ = slices.shape
    blocks = temporal[:, None, :, None] * np.transpose(slices, (1, 0, 2))[None, :, :, :]
    return blocks.reshape(t_len * n, t_len * n)


def kron_apply_naive(
    x,
    support: SupportLike,
    kind: NodeFunctionKind,
    temporal,
    renormalize: bool = False,
    zave: bool = False,
    max_dim: Optional[int] = None,
) -> np.ndarray:
    """
    Apply the Kronecker-expanded kernel to a window or a batch of windows.

    Args:
        x: (N, T) or (B, N, T) signal
        support: SupportMatrix or (N, N) array
        kind: Node function for J(t)
        temporal: (T, T) temporal adjacency L_T
        zave: Z-score x across nodes per time sample; the kernel is built from
            and applied to the z-scored signal
        max_dim: Cap on N·T (default GVNN_KRON_MAX_DIM, 8192)

    Returns:
        Array shaped like `x`.

    Raises:
        MemoryBudgetExceeded: If N·T exceeds the cap
        DimMismatch / NotSquare: On incompatible shapes
    """
    x = np.asarray(x, dtype=np.float64)
    temporal = as_matrix(temporal, "temporal adjacency")
    t_len = require_square(temporal, "temporal adjacency")
    if x.shape[-1] != t_len:
        raise DimMismatch(f"L_T is {temporal.shape} but the signal has {x.shape[-1]} samples")

    n = x.shape[-2]
    cap = max_dim if max_dim is not None else get_settings().kron_max_dim
    if n * t_len > cap:
        raise MemoryBudgetExceeded(
            f"Naive Kronecker kernel of order {n * t_len} exceeds the cap {cap}"
        )

    if zave:
        x = zscore_nodes(x)
    tensor = graph_variate_tensor(x, support, kind, renormalize=renormalize)
    if x.ndim == 2:
        return _apply_one(tensor.slices, temporal, x)
    return np.stack(
        [_apply_one(tensor.slices[b], temporal, x[b]) for b in range(x.shape[0])]
    )


def _apply_one(slices: np.ndarray, temporal: np.ndarray, x: np.ndarray) -> np.ndarray:
    n, t_len = x.shape
    kernel = kron_kernel(slices, temporal)
    y = kernel @ x.T.reshape(-1)
    return y.reshape(t_len, n).T
