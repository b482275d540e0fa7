"""
Unit tests for the graph-variate layer forward and backward passes.
"""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "../..")))

from core.utils import CacheMismatch, DimMismatch
from gvnn.gradcheck import check_layer_gradients, relative_error
from gvnn.layer import GvnnLayerParams, gvnn_backward, gvnn_forward, leaky_relu
from gvsa.node_functions import NodeFunctionKind
from gvsa.supports import SupportMatrix, build_support_correlation
from gvsa.tensor import graph_variate_tensor, zscore_nodes

KINDS = {
    "lde": NodeFunctionKind("lde"),
    "ic": NodeFunctionKind("ic"),
    "ic-nodiag": NodeFunctionKind("ic", keep_diagonal=False),
    "combo": NodeFunctionKind("combo", alpha=0.7, beta=0.4),
}


def _base(seed, n):
    rng = np.random.default_rng(seed)
    return build_support_correlation(rng.standard_normal((n, 40))).effective()


def _support(param, base, rng):
    return SupportMatrix.build(base.copy(), param, 2, rng)


def _layer(seed=0, n=5, t_len=4, kind="lde", param="dense", renormalize=True, zave=True):
    rng = np.random.default_rng(seed)
    support = _support(param, _base(seed + 100, n), rng)
    params = GvnnLayerParams.initialize(
        t_len, support, KINDS[kind], rng, renormalize=renormalize, zave=zave, theta_noise=0.3
    )
    params.a[:] = rng.uniform(0.5, 1.5, t_len)
    params.b[:] = rng.uniform(-0.5, 0.5, t_len)
    return params


class TestForward:
    def test_passthrough(self):
        x = np.random.default_rng(1).standard_normal((4, 6))
        params = GvnnLayerParams(
            a=np.ones(6),
            b=np.zeros(6),
            theta=np.eye(6),
            support=SupportMatrix.fixed(_base(2, 4)),
            kind=KINDS["lde"],
            renormalize=True,
            zave=False,
            slope=1.0,
        )
        y, _ = gvnn_forward(x, params)
        np.testing.assert_array_equal(y, x)

    def test_zero_b_ignores_support(self):
        x = np.random.default_rng(3).standard_normal((5, 4))
        first = _layer(seed=3)
        first.b[:] = 0.0
        second = GvnnLayerParams(
            a=first.a.copy(),
            b=first.b.copy(),
            theta=first.theta.copy(),
            support=SupportMatrix.dense(np.random.default_rng(9).uniform(-1, 1, (5, 5))),
            kind=first.kind,
        )
        y1, _ = gvnn_forward(x, first)
        y2, _ = gvnn_forward(x, second)
        np.testing.assert_array_equal(y1, y2)

    @pytest.mark.parametrize("kind", sorted(KINDS))
    @pytest.mark.parametrize("renormalize", [False, True])
    @pytest.mark.parametrize("zave", [False, True])
    def test_matches_composition(self, kind, renormalize, zave):
        x = np.random.default_rng(4).standard_normal((5, 4))
        params = _layer(seed=4, kind=kind, renormalize=renormalize, zave=zave)
        xz = zscore_nodes(x) if zave else x
        tensor = graph_variate_tensor(
            xz, params.support.effective(), params.kind, renormalize=renormalize
        )
        z = xz * params.a + tensor.apply(xz) * params.b
        expected = leaky_relu(z @ params.theta, params.slope)
        y, _ = gvnn_forward(x, params)
        np.testing.assert_allclose(y, expected, rtol=0, atol=1e-12)

    def test_batch_matches_single(self):
        rng = np.random.default_rng(5)
        xs = rng.standard_normal((3, 5, 4))
        params = _layer(seed=5, kind="combo")
        batch, _ = gvnn_forward(xs, params)
        for k in range(3):
            single, _ = gvnn_forward(xs[k], params)
            np.testing.assert_allclose(batch[k], single, rtol=0, atol=1e-13)

    def test_wrong_shape(self):
        params = _layer()
        with pytest.raises(DimMismatch):
            gvnn_forward(np.zeros((5, 7)), params)


class TestBackward:
    def test_zero_output_gradient(self):
        x = np.random.default_rng(6).standard_normal((5, 4))
        params = _layer(seed=6, kind="ic")
        y, cache = gvnn_forward(x, params)
        grads, d_x = gvnn_backward(cache, np.zeros_like(y), params)
        for name, grad in grads.items():
            assert not np.any(grad), name
        assert not np.any(d_x)

    def test_gradient_keys_follow_parameters(self):
        x = np.random.default_rng(7).standard_normal((5, 4))
        params = _layer(seed=7, param="lora")
        y, cache = gvnn_forward(x, params)
        grads, _ = gvnn_backward(cache, np.ones_like(y), params)
        assert set(grads) == set(params.arrays())
        for name, arr in params.arrays().items():
            assert grads[name].shape == arr.shape

    def test_cache_from_other_params(self):
        x = np.random.default_rng(8).standard_normal((5, 4))
        params = _layer(seed=8)
        other = _layer(seed=9)
        y, cache = gvnn_forward(x, params)
        with pytest.raises(CacheMismatch):
            gvnn_backward(cache, np.ones_like(y), other)

    def test_gradient_shape_mismatch(self):
        x = np.random.default_rng(8).standard_normal((5, 4))
        params = _layer(seed=8)
        _, cache = gvnn_forward(x, params)
        with pytest.raises(CacheMismatch):
            gvnn_backward(cache, np.ones((5, 3)), params)

    @pytest.mark.parametrize("kind", sorted(KINDS))
    @pytest.mark.parametrize("renormalize", [False, True])
    @pytest.mark.parametrize("zave", [False, True])
    @pytest.mark.parametrize("param", ["fixed", "dense", "lora", "hira"])
    @pytest.mark.parametrize("shape", [(2, 4, 5), (2, 5, 4)])
    def test_finite_differences(self, kind, renormalize, zave, param, shape):
        # step 1e-5 on z-scored inputs
        rng = np.random.default_rng(10)
        x = zscore_nodes(rng.standard_normal(shape))
        weights = rng.standard_normal(shape)
        _, n, t_len = shape
        params = _layer(
            seed=11, n=n, t_len=t_len, kind=kind, param=param, renormalize=renormalize, zave=zave
        )
        result = check_layer_gradients(params, x, weights)
        assert result.checked > 0
        assert result.passed(1e-4), f"{result.worst}: {result.max_error:.3e}"

    def test_ic_uses_sign_subgradient_at_zero(self):
        # Node 0 sits exactly on its temporal mean at t = 1, so |d_0 d_j| is at its kink
        x = np.array(
            [
                [1.0, 0.0, -1.0],
                [0.3, -1.2, 0.8],
                [-0.7, 0.4, 1.1],
            ]
        )
        params = GvnnLayerParams(
            a=np.ones(3),
            b=np.ones(3),
            theta=np.eye(3),
            support=SupportMatrix.fixed(np.ones((3, 3))),
            kind=KINDS["ic"],
            renormalize=False,
            zave=False,
            slope=1.0,
        )
        y, cache = gvnn_forward(x, params)
        _, d_x = gvnn_backward(cache, np.ones_like(y), params)
        assert np.all(np.isfinite(d_x))

    def test_relative_error_floor(self):
        assert relative_error(0.0, 0.0) == 0.0
        assert relative_error(1e-12, 0.0) == pytest.approx(1e-4)
