"""
Stacked graph-variate layers with an MLP readout.

Parameters are addressed by dotted names:

    layers.{k}.a, layers.{k}.b, layers.{k}.theta
    layers.{k}.support.weight | layers.{k}.support.lora_a | layers.{k}.support.lora_b
    readout.{k}.weight, readout.{k}.bias

`parameters()` returns the live arrays, so optimizers update the model in
place. Names listed in `frozen` are left out of `trainable_parameters()`.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

import numpy as np

from core.config_loader import derive_seed
from core.utils import DimMismatch, check_finite
from gvnn.layer import DEFAULT_SLOPE, GvnnLayerParams, LayerCache, gvnn_backward, gvnn_forward
from gvnn.readout import MlpReadout, ReadoutCache
from gvsa.node_functions import IC, LDE, NodeFunctionKind
from gvsa.supports import DENSE, SupportMatrix
from linalg.rng import make_rng

logger = logging.getLogger(__name__)

DEFAULT_KINDS = (NodeFunctionKind(LDE), NodeFunctionKind(IC))


@dataclass
class GradientSet:
    """Gradients keyed by parameter name, plus the gradient of the input."""

    params: Dict[str, np.ndarray]
    d_input: np.ndarray

    def __getitem__(self, name: str) -> np.ndarray:
        return self.params[name]

    def layer(self, k: int) -> Dict[str, np.ndarray]:
        prefix = f"layers.{k}."
        return {n[len(prefix):]: g for n, g in self.params.items() if n.startswith(prefix)}

    def global_norm(self) -> float:
        return float(np.sqrt(sum(float(np.sum(g * g)) for g in self.params.values())))


@dataclass
class ModelCache:
    layers: List[LayerCache]
    readout: ReadoutCache
    batched: bool

    def kink_signature(self) -> np.ndarray:
        parts = [c.kink_signature() for c in self.layers]
        parts.append(self.readout.kink_signature())
        return np.concatenate(parts)


@dataclass
class GvnnModel:
    layers: List[GvnnLayerParams]
    readout: MlpReadout
    frozen: Set[str] = field(default_factory=set)
    seed: Optional[int] = None

    def __post_init__(self):
        if not self.layers:
            raise DimMismatch("A model needs at least one layer")
        n, t_len = self.layers[0].node_count, self.layers[0].length
        for k, layer in enumerate(self.layers):
            if (layer.node_count, layer.length) != (n, t_len):
                raise DimMismatch(
                    f"Layer {k} is ({layer.node_count}, {layer.length}), expected ({n}, {t_len})"
                )
        if self.readout.in_features != n * t_len or self.readout.out_features != n:
            raise DimMismatch(
                f"Readout maps {self.readout.in_features} -> {self.readout.out_features}, "
                f"expected {n * t_len} -> {n}"
            )
        unknown = set(self.frozen) - set(self.parameters())
        if unknown:
            raise DimMismatch(f"Cannot freeze unknown parameters: {sorted(unknown)}")

    @property
    def node_count(self) -> int:
        return self.layers[0].node_count

    @property
    def length(self) -> int:
        return self.layers[0].length

    def parameters(self) -> Dict[str, np.ndarray]:
        out = {}
        for k, layer in enumerate(self.layers):
            for name, arr in layer.arrays().items():
                out[f"layers.{k}.{name}"] = arr
        for name, arr in self.readout.arrays().items():
            out[f"readout.{name}"] = arr
        return out

    def trainable_parameters(self) -> Dict[str, np.ndarray]:
        return {n: a for n, a in self.parameters().items() if n not in self.frozen}

    def parameter_count(self) -> int:
        return int(sum(a.size for a in self.trainable_parameters().values()))

    def state(self) -> Dict[str, np.ndarray]:
        """Copies of every parameter array."""
        return {n: a.copy() for n, a in self.parameters().items()}

    def load_state(self, state: Dict[str, np.ndarray]) -> None:
        """Overwrite the live arrays in place from a `state()` snapshot."""
        for name, arr in self.parameters().items():
            arr[...] = state[name]

    def forward(self, x) -> Tuple[np.ndarray, ModelCache]:
        """
        Predict N values per window.

        Args:
            x: (N, T) window or (B, N, T) batch

        Returns:
            ((N,) or (B, N) predictions, cache)
        """
        x = np.asarray(x, dtype=np.float64)
        batched = x.ndim == 3
        h = x if batched else x[None]
        caches = []
        for layer in self.layers:
            h, cache = gvnn_forward(h, layer)
            caches.append(cache)
        flat = h.reshape(h.shape[0], -1)
        pred, readout_cache = self.readout.forward(flat)
        check_finite("prediction", pred)
        cache = ModelCache(layers=caches, readout=readout_cache, batched=batched)
        return (pred if batched else pred[0]), cache

    def predict(self, x) -> np.ndarray:
        return self.forward(x)[0]

    def backward(self, cache: ModelCache, d_pred) -> GradientSet:
        """Gradients of a scalar loss given its gradient with respect to the predictions."""
        d_pred = np.asarray(d_pred, dtype=np.float64)
        if not cache.batched:
            d_pred = d_pred[None]
        grads: Dict[str, np.ndarray] = {}
        readout_grads, d_flat = self.readout.backward(cache.readout, d_pred)
        for name, grad in readout_grads.items():
            grads[f"readout.{name}"] = grad

        d_h = d_flat.reshape(d_flat.shape[0], self.node_count, self.length)
        for k in range(len(self.layers) - 1, -1, -1):
            layer_grads, d_h = gvnn_backward(cache.layers[k], d_h, self.layers[k])
            for name, grad in layer_grads.items():
                grads[f"layers.{k}.{name}"] = grad

        ordered = {name: grads[name] for name in self.parameters()}
        return GradientSet(params=ordered, d_input=d_h if cache.batched else d_h[0])

    def describe(self) -> Dict[str, object]:
        return {
            "nodes": self.node_count,
            "window": self.length,
            "layers": [
                {
                    "node_function": layer.kind.label(),
                    "support": layer.support.parameterization,
                    "rank": layer.support.rank,
                    "renormalize": layer.renormalize,
                    "zave": layer.zave,
                }
                for layer in self.layers
            ],
            "hidden": [w.shape[1] for w in self.readout.weights[:-1]],
            "trainable_parameters": self.parameter_count(),
            "frozen": sorted(self.frozen),
        }


def model_forward(x, model: GvnnModel) -> np.ndarray:
    return model.predict(x)


def model_backward(cache: ModelCache, d_pred, model: GvnnModel) -> GradientSet:
    return model.backward(cache, d_pred)


def build_model(
    n: int,
    t_len: int,
    support: Union[SupportMatrix, np.ndarray],
    kinds: Optional[Sequence[NodeFunctionKind]] = None,
    hidden: Sequence[int] = (128,),
    seed: int = 124,
    support_param: str = DENSE,
    rank: Optional[int] = None,
    renormalize: bool = True,
    zave: bool = True,
    slope: float = DEFAULT_SLOPE,
    init_a: float = 1.0,
    init_b: float = 0.1,
    theta_noise: float = 0.01,
    freeze_b: bool = False,
) -> GvnnModel:
    """
    Build a model with one layer per node function and a fresh support per layer.

    Args:
        n: Node count
        t_len: Window length
        support: Base support (its effective matrix is used as the base)
        kinds: Node function per layer (default: LDE then IC)
        hidden: Readout hidden widths
        seed: Root seed; layer and readout streams are derived from it
        support_param: fixed, dense, lora or hira
        rank: Low-rank factor rank (default max(1, N // 8))
        freeze_b: Start b at 0 and keep it there (support-free ablation)
    """
    kinds = list(kinds) if kinds else list(DEFAULT_KINDS)
    base = support.effective() if isinstance(support, SupportMatrix) else np.asarray(support)
    if base.shape != (n, n):
        raise DimMismatch(f"Support {base.shape} does not match {n} nodes")

    layers = []
    for k, kind in enumerate(kinds):
        rng = make_rng(derive_seed(f"layer{k}", seed))
        layer_support = SupportMatrix.build(base.copy(), support_param, rank, rng)
        layers.append(
            GvnnLayerParams.initialize(
                t_len,
                layer_support,
                kind,
                rng,
                renormalize=renormalize,
                zave=zave,
                slope=slope,
                init_a=init_a,
                init_b=0.0 if freeze_b else init_b,
                theta_noise=theta_noise,
            )
        )
    readout = MlpReadout.initialize(
        n * t_len, list(hidden), n, make_rng(derive_seed("readout", seed)), slope
    )
    frozen = {f"layers.{k}.b" for k in range(len(layers))} if freeze_b else set()
    model = GvnnModel(layers=layers, readout=readout, frozen=frozen, seed=seed)
    logger.info(
        f"Built model: {len(layers)} layers ({', '.join(k.label() for k in kinds)}), "
        f"{support_param} support, {model.parameter_count()} trainable parameters"
    )
    return model
