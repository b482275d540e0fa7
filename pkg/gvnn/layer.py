"""
The graph-variate layer and its exact reverse-mode gradients.

Forward, for an input X (N, T) or a batch (B, N, T):

    X' = zscore_nodes(X)                  (when zave)
    A(t) = W ∘ J(t),  J built from X'
    S(t) = D^{-1/2}(A(t) + I)D^{-1/2}      (when renormalize; else S = A)
    G[:, t] = S(t) X'[:, t]
    Z = X' diag(a) + G diag(b)
    P = Z Θ
    Y = leaky_relu(P)

Backward differentiates every step, including the dependence of J on X', the
renormalization (with zero gradient where the degree clamp is active) and the
z-scoring. Parameter gradients are summed over the batch.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from core.utils import CacheMismatch, DimMismatch, NonFinite
from gvsa.node_functions import COMBO, NodeFunctionKind, centered_deviations, ic_abs_subgradient
from gvsa.node_functions import node_function_tensor
from gvsa.supports import SupportMatrix
from gvsa.tensor import RENORM_EPS, ZAVE_EPS, renormalize_parts
from linalg.dense import batched_matvec

logger = logging.getLogger(__name__)

DEFAULT_SLOPE = 0.01


def leaky_relu(values: np.ndarray, slope: float) -> np.ndarray:
    return np.where(values > 0.0, values, slope * values)


def leaky_relu_grad(values: np.ndarray, slope: float) -> np.ndarray:
    return np.where(values > 0.0, 1.0, slope)


@dataclass
class GvnnLayerParams:
    """Learnable and structural parameters of one layer."""

    a: np.ndarray
    b: np.ndarray
    theta: np.ndarray
    support: SupportMatrix
    kind: NodeFunctionKind
    renormalize: bool = True
    zave: bool = True
    slope: float = DEFAULT_SLOPE

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=np.float64)
        self.b = np.asarray(self.b, dtype=np.float64)
        self.theta = np.asarray(self.theta, dtype=np.float64)
        t_len = self.a.shape[0]
        if self.a.shape != (t_len,) or self.b.shape != (t_len,):
            raise DimMismatch(f"a and b must both be ({t_len},), got {self.a.shape}, {self.b.shape}")
        if self.theta.shape != (t_len, t_len):
            raise DimMismatch(f"theta must be ({t_len}, {t_len}), got {self.theta.shape}")

    @classmethod
    def initialize(
        cls,
        t_len: int,
        support: SupportMatrix,
        kind: NodeFunctionKind,
        rng: np.random.Generator,
        renormalize: bool = True,
        zave: bool = True,
        slope: float = DEFAULT_SLOPE,
        init_a: float = 1.0,
        init_b: float = 0.1,
        theta_noise: float = 0.01,
    ) -> "GvnnLayerParams":
        """a = init_a, b = init_b, Θ = I + theta_noise · N(0, 1)."""
        theta = np.eye(t_len) + theta_noise * rng.standard_normal((t_len, t_len))
        return cls(
            a=np.full(t_len, float(init_a)),
            b=np.full(t_len, float(init_b)),
            theta=theta,
            support=support,
            kind=kind,
            renormalize=renormalize,
            zave=zave,
            slope=slope,
        )

    @property
    def length(self) -> int:
        return self.a.shape[0]

    @property
    def node_count(self) -> int:
        return self.support.n

    def arrays(self) -> Dict[str, np.ndarray]:
        """Live trainable arrays keyed by their short names."""
        out = {"a": self.a, "b": self.b, "theta": self.theta}
        for name, arr in self.support.trainable_arrays().items():
            out[f"support.{name}"] = arr
        return out


@dataclass
class LayerCache:
    """Forward intermediates, all with a leading batch axis."""

    x: np.ndarray
    xz: np.ndarray
    centered: Optional[np.ndarray]
    scale: Optional[np.ndarray]
    std: Optional[np.ndarray]
    j: np.ndarray
    w: np.ndarray
    raw: np.ndarray
    slices: np.ndarray
    deg: Optional[np.ndarray]
    inv: Optional[np.ndarray]
    g: np.ndarray
    z: np.ndarray
    pre: np.ndarray
    y: np.ndarray
    batched: bool
    params_id: int = field(default=0)

    def kink_signature(self) -> np.ndarray:
        """Signs of every quantity the forward map is non-smooth in."""
        parts = [(self.pre > 0.0).ravel()]
        if self.deg is not None:
            parts.append((self.deg > RENORM_EPS).ravel())
        parts.append((centered_deviations(self.xz) > 0.0).ravel())
        return np.concatenate(parts)


def _check(name: str, value: np.ndarray) -> None:
    if not np.all(np.isfinite(value)):
        raise NonFinite(f"Non-finite values in layer {name}")


def gvnn_forward(x, params: GvnnLayerParams):
    """
    Run one layer.

    Args:
        x: (N, T) input or (B, N, T) batch
        params: Layer parameters

    Returns:
        (Y, cache) with Y shaped like x

    Raises:
        DimMismatch: If x does not match the layer's N and T
        NonFinite: If any intermediate leaves the finite range
    """
    x = np.asarray(x, dtype=np.float64)
    batched = x.ndim == 3
    if not batched:
        x = x[None]
    if x.ndim != 3 or x.shape[1:] != (params.node_count, params.length):
        raise DimMismatch(
            f"Layer expects (B, {params.node_count}, {params.length}), got {x.shape}"
        )
    _check("input", x)

    centered = scale = std = None
    if params.zave:
        centered = x - x.mean(axis=1, keepdims=True)
        std = np.sqrt(np.sum(centered * centered, axis=1, keepdims=True) / (x.shape[1] - 1))
        scale = std + ZAVE_EPS
        xz = centered / scale
    else:
        xz = x

    j = node_function_tensor(xz, params.kind)
    w = params.support.effective()
    raw = w * j
    deg = inv = None
    if params.renormalize:
        slices, deg, inv = renormalize_parts(raw, RENORM_EPS)
    else:
        slices = raw
    _check("connectivity", slices)

    g = batched_matvec(slices, xz)
    z = xz * params.a + g * params.b
    pre = z @ params.theta
    _check("pre-activation", pre)
    y = leaky_relu(pre, params.slope)

    cache = LayerCache(
        x=x,
        xz=xz,
        centered=centered,
        scale=scale,
        std=std,
        j=j,
        w=w,
        raw=raw,
        slices=slices,
        deg=deg,
        inv=inv,
        g=g,
        z=z,
        pre=pre,
        y=y,
        batched=batched,
        params_id=id(params),
    )
    return (y if batched else y[0]), cache


def _renormalize_backward(d_slices, raw, deg, inv):
    """Gradient with respect to the raw slices A given one for S."""
    n = raw.shape[-1]
    shifted = raw + np.eye(n)
    d_shifted = d_slices * inv[..., :, None] * inv[..., None, :]
    weighted = d_slices * shifted
    d_inv = np.einsum("...ij,...j->...i", weighted, inv) + np.einsum(
        "...ji,...j->...i", weighted, inv
    )
    active = deg > RENORM_EPS
    d_deg = np.where(active, -0.5 * d_inv * inv ** 3, 0.0)
    return d_shifted + d_deg[..., :, None]


def _node_function_backward(d_j, xz, kind: NodeFunctionKind) -> np.ndarray:
    """Gradient with respect to X' (B, N, T) given one for J (B, T, N, N)."""
    xs = np.swapaxes(xz, -1, -2)
    d_xs = np.zeros_like(xs)
    if kind.uses_lde:
        weight = kind.lde_weight if kind.variant == COMBO else 1.0
        e = d_j + np.swapaxes(d_j, -1, -2)
        row = e.sum(axis=-1)
        d_xs += 2.0 * weight * (xs * row - np.einsum("...kj,...j->...k", e, xs))
    if kind.uses_ic:
        weight = kind.ic_weight if kind.variant == COMBO else 1.0
        d = centered_deviations(xz)
        d_prod = weight * d_j * ic_abs_subgradient(d[..., :, None] * d[..., None, :])
        if not kind.keep_diagonal:
            d_prod = d_prod * (1.0 - np.eye(xz.shape[-2]))
        f = d_prod + np.swapaxes(d_prod, -1, -2)
        d_d = np.einsum("...ij,...j->...i", f, d)
        # d = x' - mean over time
        d_xs += d_d - d_d.mean(axis=-2, keepdims=True)
    return np.swapaxes(d_xs, -1, -2)


def _zscore_backward(d_xz, centered, scale, std, n: int) -> np.ndarray:
    d_scale = -np.sum(d_xz * centered, axis=1, keepdims=True) / (scale * scale)
    safe = np.where(std > 0.0, std, 1.0)
    d_std_dc = np.where(std > 0.0, centered / ((n - 1) * safe), 0.0)
    d_c = d_xz / scale + d_scale * d_std_dc
    return d_c - d_c.mean(axis=1, keepdims=True)


def gvnn_backward(cache: LayerCache, d_y, params: GvnnLayerParams):
    """
    Reverse-mode pass through one layer.

    Args:
        cache: From gvnn_forward with the same params
        d_y: Gradient with respect to the layer output, shaped like it
        params: The layer parameters used in the forward call

    Returns:
        (grads, d_input): grads keyed like `params.arrays()`, d_input shaped
        like the forward input

    Raises:
        CacheMismatch: If the cache does not belong to params or d_y
    """
    d_y = np.asarray(d_y, dtype=np.float64)
    if not cache.batched:
        d_y = d_y[None]
    if cache.params_id != id(params) or d_y.shape != cache.y.shape:
        raise CacheMismatch(
            f"Gradient of shape {d_y.shape} does not match cached output {cache.y.shape}"
        )

    d_pre = d_y * leaky_relu_grad(cache.pre, params.slope)
    d_theta = np.einsum("bnt,bns->ts", cache.z, d_pre)
    d_z = d_pre @ params.theta.T

    d_a = np.sum(d_z * cache.xz, axis=(0, 1))
    d_b = np.sum(d_z * cache.g, axis=(0, 1))
    d_xz = d_z * params.a
    d_g = d_z * params.b

    d_xz += np.einsum("btij,bit->bjt", cache.slices, d_g)
    d_slices = np.einsum("bit,bjt->btij", d_g, cache.xz)
    if cache.deg is not None:
        d_raw = _renormalize_backward(d_slices, cache.raw, cache.deg, cache.inv)
    else:
        d_raw = d_slices

    d_w = np.sum(d_raw * cache.j, axis=(0, 1))
    d_j = d_raw * cache.w
    d_xz += _node_function_backward(d_j, cache.xz, params.kind)

    if cache.centered is not None:
        d_x = _zscore_backward(d_xz, cache.centered, cache.scale, cache.std, cache.x.shape[1])
    else:
        d_x = d_xz

    grads = {"a": d_a, "b": d_b, "theta": d_theta}
    for name, grad in params.support.support_gradient(d_w).items():
        grads[f"support.{name}"] = grad
    for name, grad in grads.items():
        _check(f"gradient {name}", grad)
    return grads, (d_x if cache.batched else d_x[0])
