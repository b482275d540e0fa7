"""
Numerical checks of the spectral properties of Ω = W ∘ J.

Each check computes both sides of one inequality and returns a
SpectralBoundReport. Checks raise HypothesisViolated when their inputs fall
outside the claim's hypotheses; a violated inequality is data, not an error.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from core.utils import HypothesisViolated
from gvft.transform import gvft
from gvsa.node_functions import (
    NodeFunctionKind,
    node_function_ic,
    node_function_lde,
    parse_node_function,
)
from gvsa.tensor import SupportLike, support_values
from linalg.dense import as_matrix, is_symmetric, require_square
from linalg.eigen import numeric_rank, singular_values, sym_eig
from theory.reports import ClaimId, SpectralBoundReport

logger = logging.getLogger(__name__)

RANK_TOL = 1e-7
TRACE_TOL = 1e-10
PARSEVAL_TOL = 1e-8


def _vector(x_t, n: int, name: str = "x_t") -> np.ndarray:
    x = np.asarray(x_t, dtype=np.float64).reshape(-1)
    if x.size != n:
        raise HypothesisViolated(f"{name} has {x.size} entries for a {n}x{n} support")
    return x


def _symmetric(w) -> np.ndarray:
    w = as_matrix(support_values(w), "W")
    require_square(w, "W")
    if not is_symmetric(w):
        raise HypothesisViolated("W is not symmetric")
    return w


def _positive_definite(w) -> Tuple[np.ndarray, np.ndarray]:
    """W and its ascending spectrum; W must be strictly positive definite."""
    w = _symmetric(w)
    spectrum = sym_eig(w).eigenvalues
    if spectrum.size == 0 or spectrum[0] <= 0.0:
        low = spectrum[0] if spectrum.size else float("nan")
        raise HypothesisViolated(f"W is not positive definite (min eigenvalue {low:.3e})")
    return w, spectrum


def _deviations(x_t, mean, n: int) -> np.ndarray:
    x = _vector(x_t, n)
    mean = np.zeros(n) if mean is None else _vector(mean, n, "mean")
    d = x - mean
    zero = np.flatnonzero(d == 0.0)
    if zero.size:
        raise HypothesisViolated(f"Deviation of node {int(zero[0])} is zero")
    return d


def _ic_omega(d: np.ndarray, w: np.ndarray) -> np.ndarray:
    return w * node_function_ic(d, np.zeros_like(d))


def check_rank_lift_ic(
    x_t, w, mean=None, rel_tol: float = RANK_TOL
) -> SpectralBoundReport:
    """
    Ω = |D| W |D| is positive definite and of full rank.

    Encoded as -λ_min(Ω) <= -rel_tol * λ_max(Ω).
    """
    w, _ = _positive_definite(w)
    n = w.shape[0]
    d = _deviations(x_t, mean, n)
    omega = _ic_omega(d, w)
    values = sym_eig(omega).eigenvalues
    rank = numeric_rank(omega, rel_tol)
    return SpectralBoundReport.compare(
        ClaimId.RANK_LIFT_IC,
        lhs=-values[0],
        rhs=-rel_tol * values[-1],
        n=n,
        inputs={"d": d, "w": w},
        details={"min_eigenvalue": values[0], "rank": rank},
        holds=rank == n,
    )


def check_gershgorin_dirichlet(x_t, w) -> SpectralBoundReport:
    """ρ(W ∘ J_LDE) <= 2 E_abs, E_abs = ½ Σ |W_ij| (x_i - x_j)²."""
    w = _symmetric(w)
    n = w.shape[0]
    x = _vector(x_t, n)
    omega = w * node_function_lde(x)
    energy = 0.5 * float(np.sum(np.abs(omega)))
    radius = sym_eig(omega).spectral_radius
    return SpectralBoundReport.compare(
        ClaimId.GERSHGORIN_DIRICHLET,
        lhs=radius,
        rhs=2.0 * energy,
        n=n,
        inputs={"x_t": x, "w": w},
        details={"energy_abs": energy},
    )


def check_lde_rank_lift(x, w, rel_tol: float = RANK_TOL) -> SpectralBoundReport:
    """
    rank J_LDE <= 3 while W ∘ J_LDE has full rank.

    The margin is on the smallest singular value of W ∘ J relative to the
    largest: -σ_min <= -rel_tol * σ_max.
    """
    w = _symmetric(w)
    n = w.shape[0]
    x = _vector(x, n, "x")
    if np.unique(x).size != n:
        raise HypothesisViolated("x has repeated values")
    off = ~np.eye(n, dtype=bool)
    if np.any(w[off] == 0.0):
        raise HypothesisViolated("W has a zero off-diagonal entry")

    j = node_function_lde(x)
    omega = w * j
    rank_j = numeric_rank(j, rel_tol)
    sigma = singular_values(omega)
    rank_omega = int(np.count_nonzero(sigma > rel_tol * sigma[0])) if sigma[0] > 0 else 0
    return SpectralBoundReport.compare(
        ClaimId.LDE_RANK_LIFT,
        lhs=-sigma[-1],
        rhs=-rel_tol * sigma[0],
        n=n,
        inputs={"x": x, "w": w},
        details={"rank_j": rank_j, "rank_omega": rank_omega, "min_singular_value": sigma[-1]},
        holds=rank_j <= 3 and rank_omega == n,
    )


def check_indefiniteness_lde(x, w) -> SpectralBoundReport:
    """
    W ∘ J_LDE has zero trace, so a nonzero one has eigenvalues of both signs.

    lhs = max(λ_min, -λ_max, |trace| - 1e-10), rhs = 0.
    """
    w = _symmetric(w)
    n = w.shape[0]
    x = _vector(x, n, "x")
    omega = w * node_function_lde(x)
    if not np.any(omega):
        return SpectralBoundReport.degenerate(
            ClaimId.INDEFINITENESS_LDE, n, "W ∘ J is zero (constant x or empty support)"
        )
    trace = float(np.trace(omega))
    values = sym_eig(omega).eigenvalues
    lhs = max(values[0], -values[-1], abs(trace) - TRACE_TOL)
    return SpectralBoundReport.compare(
        ClaimId.INDEFINITENESS_LDE,
        lhs=lhs,
        rhs=0.0,
        n=n,
        inputs={"x": x, "w": w},
        details={"trace": trace, "min_eigenvalue": values[0], "max_eigenvalue": values[-1]},
    )


def check_amplitude_scaling_bounds(x_t, w, mean=None) -> SpectralBoundReport:
    """
    Every eigenvalue of |D| W |D| lies in [m² λ_min(W), M² λ_max(W)].

    m and M are the smallest and largest |d_i|. The largest violation of
    either end, divided by max(1, M² λ_max(W)), is compared against 0.
    """
    w, w_values = _positive_definite(w)
    n = w.shape[0]
    x = _vector(x_t, n)
    d = x - (np.zeros(n) if mean is None else _vector(mean, n, "mean"))
    m, big_m = float(np.min(np.abs(d))), float(np.max(np.abs(d)))
    lower = m * m * w_values[0]
    upper = big_m * big_m * w_values[-1]
    values = sym_eig(_ic_omega(d, w)).eigenvalues
    scale = max(1.0, upper)
    violation = max(lower - values[0], values[-1] - upper) / scale
    return SpectralBoundReport.compare(
        ClaimId.AMPLITUDE_SCALING,
        lhs=violation,
        rhs=0.0,
        n=n,
        inputs={"d": d, "w": w},
        details={"lower": lower, "upper": upper, "min": values[0], "max": values[-1]},
    )


def check_condition_number(x_t, w, mean=None) -> SpectralBoundReport:
    """κ(|D| W |D|) <= (d_max / d_min)² κ(W)."""
    w, w_values = _positive_definite(w)
    n = w.shape[0]
    d = np.abs(_deviations(x_t, mean, n))
    values = sym_eig(_ic_omega(d, w)).eigenvalues
    if values[0] <= 0.0:
        kappa = float("inf")
    else:
        kappa = float(values[-1] / values[0])
    bound = float((d.max() / d.min()) ** 2 * (w_values[-1] / w_values[0]))
    return SpectralBoundReport.compare(
        ClaimId.CONDITION_NUMBER,
        lhs=kappa,
        rhs=bound,
        n=n,
        inputs={"d": d, "w": w},
        details={"kappa_w": w_values[-1] / w_values[0]},
    )


def check_gershgorin_discs_ic(x_t, w, mean=None) -> SpectralBoundReport:
    """
    Every eigenvalue of |D| W |D| lies in a disc centred at W_ii d_i² with
    radius |d_i| Σ_{j≠i} |W_ij| |d_j|, and in the coarse interval
    [min centre - r_max, max centre + r_max].
    """
    w, _ = _positive_definite(w)
    n = w.shape[0]
    x = _vector(x_t, n)
    d = np.abs(x - (np.zeros(n) if mean is None else _vector(mean, n, "mean")))
    omega = _ic_omega(d, w)
    centres = np.diag(omega).copy()
    off = np.abs(omega)
    np.fill_diagonal(off, 0.0)
    radii = off.sum(axis=1)
    values = sym_eig(omega).eigenvalues

    # distance outside the nearest disc, per eigenvalue
    outside = np.min(np.abs(values[:, None] - centres[None, :]) - radii[None, :], axis=1)
    r_max = float(radii.max())
    coarse = max(
        float(centres.min()) - r_max - values[0],
        values[-1] - float(centres.max()) - r_max,
    )
    scale = max(1.0, float(np.max(centres + radii)))
    lhs = max(float(outside.max()), coarse) / scale
    return SpectralBoundReport.compare(
        ClaimId.GERSHGORIN_DISCS_IC,
        lhs=lhs,
        rhs=0.0,
        n=n,
        inputs={"d": d, "w": w},
        details={
            "r_max": r_max,
            "right_half_plane": bool(np.all(centres - radii > 0.0)),
        },
    )


def check_parseval(
    x, w: SupportLike, kind: Optional[NodeFunctionKind] = None
) -> SpectralBoundReport:
    """‖x̂(t)‖ = ‖x(t)‖ for every column, and for the whole signal."""
    x = as_matrix(x, "signal")
    kind = kind or parse_node_function("ic")
    w_values = as_matrix(support_values(w), "W")
    result = gvft(x, w_values, kind)
    before = np.sqrt(np.sum(x * x, axis=0))
    after = np.sqrt(result.column_energy())
    column_dev = np.abs(after - before) / np.maximum(1.0, before)
    total_before = float(np.linalg.norm(x))
    total_dev = abs(float(np.linalg.norm(result.coefficients)) - total_before) / max(
        1.0, total_before
    )
    lhs = max(float(column_dev.max()) if column_dev.size else 0.0, total_dev)
    return SpectralBoundReport.compare(
        ClaimId.PARSEVAL,
        lhs=lhs,
        rhs=PARSEVAL_TOL,
        n=x.shape[0],
        inputs={"x": x, "w": w_values, "kind": kind.label()},
        details={"columns": x.shape[1], "kind": kind.label()},
    )
