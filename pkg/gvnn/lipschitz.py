"""
Global Lipschitz bound of the two-tap map F(X) = σ(a_t x(t) + b_t Ω(t) x(t)).

With W symmetric and nonnegative, α = max row sum of W bounds ‖W‖, and

    IC:   L = a* + α b* M²     M = max |x_i(t) - mean_t x_i|
    LDE:  L = a* + 4 α b* B²   B = max |x_i(t)|

where a* = max|a_t| and b* = max|b_t|. A combination of both node functions
takes the weighted sum of the two Ω terms. The bound concerns the raw map: Θ,
z-scoring and renormalization are not part of it. Because Ω depends on the
signal, M and B are taken as maxima over both signals of the pair.
"""

from typing import NamedTuple

import numpy as np

from core.utils import DimMismatch, NegativeSupport
from gvnn.layer import GvnnLayerParams, leaky_relu
from gvsa.node_functions import COMBO
from gvsa.tensor import graph_variate_tensor
from linalg.dense import as_matrix


class LipschitzBound(NamedTuple):
    bound: float
    ratio: float
    alpha: float
    a_star: float
    b_star: float


def two_tap_map(x, params: GvnnLayerParams) -> np.ndarray:
    """σ(a_t x(t) + b_t Ω(t) x(t)) on the raw signal, Ω built from x itself."""
    x = as_matrix(x, "signal")
    tensor = graph_variate_tensor(
        x, params.support.effective(), params.kind, renormalize=False, zave=False
    )
    return leaky_relu(x * params.a + tensor.apply(x) * params.b, params.slope)


def _amplitudes(x: np.ndarray, x2: np.ndarray):
    deviation = max(
        float(np.max(np.abs(x - x.mean(axis=1, keepdims=True)))),
        float(np.max(np.abs(x2 - x2.mean(axis=1, keepdims=True)))),
    )
    magnitude = max(float(np.max(np.abs(x))), float(np.max(np.abs(x2))))
    return deviation, magnitude


def lipschitz_bound(params: GvnnLayerParams, x, x2) -> LipschitzBound:
    """
    Evaluate the bound and the observed ratio ‖F(X) - F(X')‖_F / ‖X - X'‖_F.

    The ratio is 0 when X = X'.

    Raises:
        NegativeSupport: If the effective support has a negative entry
        DimMismatch: If the two signals differ in shape
    """
    x = as_matrix(x, "signal")
    x2 = as_matrix(x2, "signal")
    if x.shape != x2.shape:
        raise DimMismatch(f"Signals differ in shape: {x.shape} vs {x2.shape}")
    w = params.support.effective()
    if np.any(w < 0.0):
        raise NegativeSupport(
            "The Lipschitz bound needs a nonnegative support; pass |W| instead"
        )

    alpha = float(np.max(w.sum(axis=1)))
    a_star = float(np.max(np.abs(params.a)))
    b_star = float(np.max(np.abs(params.b)))
    deviation, magnitude = _amplitudes(x, x2)

    kind = params.kind
    omega_norm = 0.0
    if kind.uses_ic:
        weight = abs(kind.ic_weight) if kind.variant == COMBO else 1.0
        omega_norm += weight * alpha * deviation**2
    if kind.uses_lde:
        weight = abs(kind.lde_weight) if kind.variant == COMBO else 1.0
        omega_norm += weight * 4.0 * alpha * magnitude**2
    bound = a_star + b_star * omega_norm

    distance = float(np.linalg.norm(x - x2))
    if distance == 0.0:
        ratio = 0.0
    else:
        ratio = float(np.linalg.norm(two_tap_map(x, params) - two_tap_map(x2, params))) / distance
    return LipschitzBound(bound=bound, ratio=ratio, alpha=alpha, a_star=a_star, b_star=b_star)
