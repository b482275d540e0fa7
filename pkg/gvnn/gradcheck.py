"""
Central finite-difference checks for the manual gradients.

Each entry of each array is perturbed by ±step in place and the scalar loss is
re-evaluated. Entries whose perturbation flips the sign of a non-smooth
quantity (a leaky ReLU pre-activation, a centered deviation under |·|, a
clamped degree) are reported as skipped: the difference quotient straddles
a kink there and says nothing about the gradient.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Tuple

import numpy as np

from gvnn.layer import GvnnLayerParams, gvnn_backward, gvnn_forward
from gvnn.model import GvnnModel

logger = logging.getLogger(__name__)

LossFn = Callable[[], Tuple[float, np.ndarray]]


@dataclass
class GradientCheckResult:
    max_error: float = 0.0
    worst: str = ""
    checked: int = 0
    skipped: List[str] = field(default_factory=list)

    def passed(self, tolerance: float = 1e-4) -> bool:
        return self.max_error < tolerance


def relative_error(analytic, numeric, floor: float = 1e-8) -> np.ndarray:
    analytic = np.asarray(analytic)
    numeric = np.asarray(numeric)
    denom = np.maximum(floor, np.abs(analytic) + np.abs(numeric))
    return np.abs(analytic - numeric) / denom


def finite_difference_check(
    loss_fn: LossFn,
    arrays: Dict[str, np.ndarray],
    grads: Dict[str, np.ndarray],
    step: float = 1e-5,
    floor: float = 1e-8,
) -> GradientCheckResult:
    """
    Compare analytic gradients against central differences.

    Args:
        loss_fn: Returns (loss, kink signature) for the current array values
        arrays: Live arrays to perturb, keyed like `grads`
        grads: Analytic gradients
        step: Perturbation size
        floor: Lower bound of the relative-error denominator
    """
    result = GradientCheckResult()
    _, base_signature = loss_fn()
    for name, arr in arrays.items():
        analytic = grads[name]
        for idx in np.ndindex(arr.shape):
            saved = arr[idx]
            arr[idx] = saved + step
            up, up_signature = loss_fn()
            arr[idx] = saved - step
            down, down_signature = loss_fn()
            arr[idx] = saved
            label = f"{name}{list(idx)}"
            if not (
                np.array_equal(up_signature, base_signature)
                and np.array_equal(down_signature, base_signature)
            ):
                result.skipped.append(label)
                continue
            numeric = (up - down) / (2.0 * step)
            error = float(relative_error(analytic[idx], numeric, floor))
            result.checked += 1
            if error > result.max_error:
                result.max_error, result.worst = error, label
    logger.debug(
        f"Gradient check: {result.checked} entries, max relative error "
        f"{result.max_error:.3e} at {result.worst or '-'}, {len(result.skipped)} skipped"
    )
    return result


def check_layer_gradients(
    params: GvnnLayerParams, x: np.ndarray, weights: np.ndarray, step: float = 1e-5
) -> GradientCheckResult:
    """Check every layer parameter and the input for the loss sum(weights ∘ Y)."""
    x = np.array(x, dtype=np.float64)
    _, cache = gvnn_forward(x, params)
    grads, d_input = gvnn_backward(cache, weights, params)

    def loss_fn():
        y, c = gvnn_forward(x, params)
        return float(np.sum(weights * y)), c.kink_signature()

    arrays = dict(params.arrays())
    arrays["input"] = x
    grads = dict(grads)
    grads["input"] = d_input
    return finite_difference_check(loss_fn, arrays, grads, step)


def check_model_gradients(
    model: GvnnModel, x: np.ndarray, weights: np.ndarray, step: float = 1e-5
) -> GradientCheckResult:
    """Check every model parameter and the input for the loss sum(weights ∘ prediction)."""
    x = np.array(x, dtype=np.float64)
    _, cache = model.forward(x)
    gradient_set = model.backward(cache, weights)

    def loss_fn():
        pred, c = model.forward(x)
        return float(np.sum(weights * pred)), c.kink_signature()

    arrays = dict(model.parameters())
    arrays["input"] = x
    grads = dict(gradient_set.params)
    grads["input"] = gradient_set.d_input
    return finite_difference_check(loss_fn, arrays, grads, step)
