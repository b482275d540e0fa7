"""
Dense matrix and tensor helpers.

Matrices are float64 `numpy.ndarray`s in row-major order. Per-time slice stacks
are (T, N, N) tensors with time outermost, so each slice used by a batched
mat-vec is contiguous; a leading batch axis (B, T, N, N) is accepted wherever
a stack is.
"""

import numpy as np

from core.utils import DimMismatch, NotSquare, check_finite


def as_matrix(values, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D float64 array."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise DimMismatch(f"{name} must be 2-D, got shape {arr.shape}")
    check_finite(name, arr)
    return arr


def require_square(a: np.ndarray, name: str = "matrix") -> int:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSquare(f"{name} must be square, got shape {a.shape}")
    return a.shape[0]


def sym(a: np.ndarray) -> np.ndarray:
    """Symmetric part (A + Aᵀ)/2 of the last two axes."""
    return 0.5 * (a + np.swapaxes(a, -1, -2))


def is_symmetric(a: np.ndarray, tol: float = 1e-10) -> bool:
    return bool(np.all(np.abs(a - np.swapaxes(a, -1, -2)) <= tol))


def batched_matvec(slices: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """
    One mat-vec per time step: out[:, t] = slices[t] @ vectors[:, t].

    Args:
        slices: (T, N, N) or (B, T, N, N)
        vectors: (N, T) or (B, N, T)

    Returns:
        Array shaped like `vectors`.
    """
    if slices.ndim != vectors.ndim + 1:
        raise DimMismatch(
            f"slices {slices.shape} and vectors {vectors.shape} have incompatible ranks"
        )
    t_len, n_rows, n_cols = slices.shape[-3:]
    if slices.shape[:-3] != vectors.shape[:-2] or vectors.shape[-2:] != (n_cols, t_len):
        raise DimMismatch(
            f"slices {slices.shape} do not match vectors {vectors.shape}"
        )
    return np.einsum("...tij,...jt->...it", slices, vectors)


def loop_matvec(slices: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Reference per-time loop for batched_matvec (single instance only)."""
    t_len = slices.shape[0]
    out = np.zeros((slices.shape[1], t_len))
    for t in range(t_len):
        out[:, t] = slices[t] @ vectors[:, t]
    return out
