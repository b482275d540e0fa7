"""Mean squared error with its gradient."""

from typing import Tuple

import numpy as np

from core.utils import DimMismatch


def mse_loss(pred, target) -> Tuple[float, np.ndarray]:
    """
    Mean of (pred - target)^2 over every entry (B * N for a batch).

    Returns:
        (loss, d_pred) with d_pred = 2 (pred - target) / size
    """
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise DimMismatch(f"Prediction {pred.shape} and target {target.shape} differ")
    diff = pred - target
    return float(np.mean(diff * diff)), 2.0 * diff / diff.size
