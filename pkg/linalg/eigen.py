"""
Symmetric eigensolver and rank estimation.

`sym_eig` is a cyclic Jacobi solver. Each sweep visits every off-diagonal pair
once, in round-robin order: the N(N-1)/2 pairs are grouped into N-1 rounds of
disjoint pairs, and the rotations of one round commute, so a round is applied
as a single orthogonal similarity with numpy. The ordering is fixed, which makes
results deterministic for a given input.
"""

import logging
from functools import lru_cache
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from core.config import get_settings
from core.utils import NonConvergence
from linalg.dense import as_matrix, require_square, sym

logger = logging.getLogger(__name__)

MAX_ORDER = 4096


class SymmetricSpectrum(NamedTuple):
    """Eigenvalues in ascending order and orthonormal eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.eigenvalues))) if self.eigenvalues.size else 0.0


@lru_cache(maxsize=64)
def _round_robin_rounds(n: int) -> Tuple[Tuple[np.ndarray, np.ndarray], ...]:
    """Disjoint (p, q) index pairs per round, p < q, covering every pair once."""
    m = n if n % 2 == 0 else n + 1
    players = list(range(m))
    rounds: List[Tuple[np.ndarray, np.ndarray]] = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p >= n or q >= n:
                continue
            ps.append(min(p, q))
            qs.append(max(p, q))
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        # keep player 0 fixed, rotate the rest
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _max_off_diagonal(a: np.ndarray) -> float:
    off = np.abs(a - np.diag(np.diag(a)))
    return float(off.max()) if off.size else 0.0


def sym_eig(
    a, tol: float = 1e-12, max_sweeps: Optional[int] = None
) -> SymmetricSpectrum:
    """
    Eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Args:
        a: Square matrix; symmetrized as (A + Aᵀ)/2 before decomposition
        tol: Sweeps stop once the largest off-diagonal magnitude is below
            tol * max(1, max|A|)
        max_sweeps: Sweep limit (default from GVNN_JACOBI_MAX_SWEEPS, 100)

    Returns:
        SymmetricSpectrum with ascending eigenvalues.

    Raises:
        NotSquare: If `a` is not square
        NonConvergence: If the off-diagonal mass is still above tolerance
    """
    a = as_matrix(a)
    n = require_square(a)
    if n > MAX_ORDER:
        raise NonConvergence(f"Matrix order {n} exceeds the solver limit {MAX_ORDER}")
    if max_sweeps is None:
        max_sweeps = get_settings().jacobi_max_sweeps

    work = sym(a).copy()
    vecs = np.eye(n)
    threshold = tol * max(1.0, float(np.abs(work).max()) if n else 0.0)
    rounds = _round_robin_rounds(n) if n > 1 else ()

    sweeps = 0
    while _max_off_diagonal(work) >= threshold:
        if sweeps >= max_sweeps:
            raise NonConvergence(
                f"Jacobi did not converge in {max_sweeps} sweeps "
                f"(off-diagonal {_max_off_diagonal(work):.3e}, tolerance {threshold:.3e})"
            )
        for p, q in rounds:
            apq = work[p, q]
            active = np.abs(apq) > 0.0
            if not active.any():
                continue
            theta = np.zeros_like(apq)
            theta[active] = (work[q, q][active] - work[p, p][active]) / (
                2.0 * apq[active]
            )
            with np.errstate(over="ignore"):
                t = np.where(theta >= 0.0, 1.0, -1.0) / (
                    np.abs(theta) + np.sqrt(theta * theta + 1.0)
                )
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c

            # work <- Rᵀ work R, with R the product of this round's rotations
            row_p, row_q = work[p, :], work[q, :]
            work[p, :] = c[:, None] * row_p - s[:, None] * row_q
            work[q, :] = s[:, None] * row_p + c[:, None] * row_q
            col_p, col_q = work[:, p], work[:, q]
            work[:, p] = col_p * c - col_q * s
            work[:, q] = col_p * s + col_q * c
            work[p[active], q[active]] = 0.0
            work[q[active], p[active]] = 0.0

            vec_p, vec_q = vecs[:, p], vecs[:, q]
            vecs[:, p] = vec_p * c - vec_q * s
            vecs[:, q] = vec_p * s + vec_q * c
        sweeps += 1

    logger.debug(f"Jacobi converged after {sweeps} sweeps (n={n})")
    eigenvalues = np.diag(work).copy()
    order = np.argsort(eigenvalues, kind="stable")
    return SymmetricSpectrum(eigenvalues[order], vecs[:, order])


def singular_values(a, symmetric_tol: float = 1e-10) -> np.ndarray:
    """
    Singular values in descending order.

    Symmetric input uses |eigenvalues| of A directly; anything else uses the
    square roots of the eigenvalues of AᵀA.
    """
    a = as_matrix(a)
    if a.size == 0:
        return np.zeros(0)
    if a.shape[0] == a.shape[1] and np.all(np.abs(a - a.T) <= symmetric_tol):
        values = np.abs(sym_eig(a).eigenvalues)
    else:
        gram = a.T @ a
        values = np.sqrt(np.clip(sym_eig(gram).eigenvalues, 0.0, None))
    return np.sort(values)[::-1]


def numeric_rank(a, rel_tol: float = 1e-9) -> int:
    """Number of singular values above rel_tol times the largest one."""
    if not 0.0 < rel_tol < 1.0:
        raise ValueError(f"rel_tol must lie in (0, 1), got {rel_tol}")
    values = singular_values(a)
    if values.size == 0 or values[0] == 0.0:
        return 0
    return int(np.count_nonzero(values > rel_tol * values[0]))
