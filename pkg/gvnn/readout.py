"""
MLP readout: flatten the final (N, T) layer output and map it to N forecasts.

Hidden layers use leaky ReLU; the output layer is linear. Weights are stored
(fan_in, fan_out) and initialized uniformly in ±1/sqrt(fan_in).
"""

from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from core.utils import CacheMismatch, DimMismatch
from gvnn.layer import DEFAULT_SLOPE, leaky_relu, leaky_relu_grad


@dataclass
class MlpReadout:
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    slope: float = DEFAULT_SLOPE

    @classmethod
    def initialize(
        cls,
        in_features: int,
        hidden: Sequence[int],
        out_features: int,
        rng: np.random.Generator,
        slope: float = DEFAULT_SLOPE,
    ) -> "MlpReadout":
        widths = [in_features, *hidden, out_features]
        weights, biases = [], []
        for fan_in, fan_out in zip(widths[:-1], widths[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            weights.append(rng.uniform(-bound, bound, (fan_in, fan_out)))
            biases.append(rng.uniform(-bound, bound, fan_out))
        return cls(weights=weights, biases=biases, slope=slope)

    @property
    def in_features(self) -> int:
        return self.weights[0].shape[0]

    @property
    def out_features(self) -> int:
        return self.weights[-1].shape[1]

    def arrays(self) -> Dict[str, np.ndarray]:
        out = {}
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            out[f"{k}.weight"] = w
            out[f"{k}.bias"] = b
        return out

    def forward(self, flat: np.ndarray) -> Tuple[np.ndarray, "ReadoutCache"]:
        if flat.ndim != 2 or flat.shape[1] != self.in_features:
            raise DimMismatch(
                f"Readout expects (B, {self.in_features}), got {flat.shape}"
            )
        inputs, pres = [], []
        h = flat
        last = len(self.weights) - 1
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            inputs.append(h)
            pre = h @ w + b
            pres.append(pre)
            h = pre if k == last else leaky_relu(pre, self.slope)
        return h, ReadoutCache(inputs=inputs, pres=pres)

    def backward(
        self, cache: "ReadoutCache", d_out: np.ndarray
    ) -> Tuple[Dict[str, np.ndarray], np.ndarray]:
        if d_out.shape != cache.pres[-1].shape:
            raise CacheMismatch(
                f"Readout gradient {d_out.shape} does not match output {cache.pres[-1].shape}"
            )
        grads = {}
        d_pre = d_out
        for k in range(len(self.weights) - 1, -1, -1):
            grads[f"{k}.weight"] = cache.inputs[k].T @ d_pre
            grads[f"{k}.bias"] = d_pre.sum(axis=0)
            d_h = d_pre @ self.weights[k].T
            if k > 0:
                d_pre = d_h * leaky_relu_grad(cache.pres[k - 1], self.slope)
        return grads, d_h


@dataclass
class ReadoutCache:
    inputs: List[np.ndarray] = field(default_factory=list)
    pres: List[np.ndarray] = field(default_factory=list)

    def kink_signature(self) -> np.ndarray:
        hidden = [(p > 0.0).ravel() for p in self.pres[:-1]]
        return np.concatenate(hidden) if hidden else np.zeros(0, dtype=bool)
