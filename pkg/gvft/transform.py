"""
Graph-Variate Fourier Transform.

Every time sample x(t) is projected onto the eigenbasis U_t of its own raw
Ω(t) = W ∘ J(t): x̂(t) = U_tᵀ x(t). Eigenvectors are only defined up to sign, so
each one is flipped to make its largest-magnitude entry positive (the first
such entry on ties). With this convention identical inputs give bit-identical
coefficients.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from core.utils import DimMismatch
from gvsa.node_functions import NodeFunctionKind
from gvsa.tensor import SupportLike, graph_variate_tensor
from linalg.dense import as_matrix
from linalg.eigen import SymmetricSpectrum, sym_eig

logger = logging.getLogger(__name__)

SIGN_CONVENTION = "max-abs-entry-positive"


@dataclass
class GvftResult:
    """Coefficients X̂ (N, T) and the per-time bases they were computed in."""

    coefficients: np.ndarray
    bases: List[SymmetricSpectrum]
    sign_convention: str = SIGN_CONVENTION
    eigenvalues: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        # (N, T): column t holds the spectrum of Ω(t)
        if self.bases:
            self.eigenvalues = np.stack([b.eigenvalues for b in self.bases], axis=1)
        else:
            self.eigenvalues = np.zeros((self.coefficients.shape[0], 0))

    def column_energy(self) -> np.ndarray:
        return np.sum(self.coefficients * self.coefficients, axis=0)


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude entry is positive."""
    if vectors.size == 0:
        return vectors
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0.0] = 1.0
    return vectors * signs


def _canonical_spectrum(omega: np.ndarray) -> SymmetricSpectrum:
    spectrum = sym_eig(omega)
    return SymmetricSpectrum(spectrum.eigenvalues, fix_signs(spectrum.eigenvectors))


def gvft(
    x,
    support: SupportLike,
    kind: NodeFunctionKind,
    workers: Optional[int] = None,
) -> GvftResult:
    """
    Forward transform of a signal (N, T).

    Args:
        x: Signal, nodes by time
        support: SupportMatrix or (N, N) array
        kind: Node function for J(t)
        workers: When > 1, eigendecompositions run on a thread pool; results
            are gathered in time order

    Returns:
        GvftResult with coefficients[:, t] = U_tᵀ x(t)

    Raises:
        NonConvergence: From the eigensolver
    """
    x = as_matrix(x, "signal")
    tensor = graph_variate_tensor(x, support, kind, renormalize=False, zave=False)
    slices = list(tensor.slices)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            bases = list(pool.map(_canonical_spectrum, slices))
    else:
        bases = [_canonical_spectrum(s) for s in slices]

    coefficients = np.zeros_like(x)
    for t, basis in enumerate(bases):
        coefficients[:, t] = basis.eigenvectors.T @ x[:, t]
    logger.debug(f"GVFT of {x.shape[0]} nodes x {x.shape[1]} samples ({kind.label()})")
    return GvftResult(coefficients=coefficients, bases=bases)


def inverse_gvft(result: GvftResult) -> np.ndarray:
    """Column t of the output is U_t x̂(t)."""
    coefficients = np.asarray(result.coefficients, dtype=np.float64)
    if coefficients.ndim != 2 or len(result.bases) != coefficients.shape[1]:
        raise DimMismatch(
            f"{len(result.bases)} bases for coefficients of shape {coefficients.shape}"
        )
    out = np.zeros_like(coefficients)
    for t, basis in enumerate(result.bases):
        if basis.eigenvectors.shape[1] != coefficients.shape[0]:
            raise DimMismatch(f"Basis {t} does not match {coefficients.shape[0]} nodes")
        out[:, t] = basis.eigenvectors @ coefficients[:, t]
    return out
