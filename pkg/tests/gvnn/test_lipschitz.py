"""
Unit tests for the two-tap Lipschitz bound.
"""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "../..")))

from core.utils import DimMismatch, NegativeSupport
from gvnn.layer import GvnnLayerParams
from gvnn.lipschitz import lipschitz_bound, two_tap_map
from gvsa.node_functions import NodeFunctionKind
from gvsa.supports import SupportMatrix, build_support_correlation


def _params(seed, n=6, t_len=5, kind="ic", b_scale=0.5):
    rng = np.random.default_rng(seed)
    w = np.abs(build_support_correlation(rng.standard_normal((n, 60))).effective())
    return GvnnLayerParams(
        a=rng.uniform(-1.0, 1.0, t_len),
        b=rng.uniform(-b_scale, b_scale, t_len),
        theta=np.eye(t_len),
        support=SupportMatrix.fixed(w),
        kind=NodeFunctionKind(kind),
    )


class TestLipschitzBound:
    @pytest.mark.parametrize("kind", ["ic", "lde"])
    def test_random_pairs_respect_bound(self, kind):
        params = _params(1, kind=kind)
        rng = np.random.default_rng(2)
        for _ in range(200):
            x = rng.standard_normal((6, 5))
            x2 = rng.standard_normal((6, 5))
            result = lipschitz_bound(params, x, x2)
            assert result.ratio <= result.bound

    def test_zero_b_is_diagonal_scaling(self):
        params = _params(5, b_scale=0.0)
        rng = np.random.default_rng(6)
        for _ in range(50):
            result = lipschitz_bound(params, rng.standard_normal((6, 5)), rng.standard_normal((6, 5)))
            assert result.bound == result.a_star
            assert result.ratio <= result.a_star

    def test_alpha_is_max_row_sum(self):
        params = _params(7)
        x = np.random.default_rng(7).standard_normal((6, 5))
        result = lipschitz_bound(params, x, x + 1.0)
        assert result.alpha == pytest.approx(params.support.effective().sum(axis=1).max())

    def test_same_signal_ratio_zero(self):
        params = _params(8)
        x = np.random.default_rng(8).standard_normal((6, 5))
        assert lipschitz_bound(params, x, x).ratio == 0.0

    def test_negative_support(self):
        params = _params(9)
        params.support = SupportMatrix.fixed(-params.support.effective())
        x = np.zeros((6, 5))
        with pytest.raises(NegativeSupport):
            lipschitz_bound(params, x, x)

    def test_shape_mismatch(self):
        params = _params(10)
        with pytest.raises(DimMismatch):
            lipschitz_bound(params, np.zeros((6, 5)), np.zeros((6, 4)))

    def test_two_tap_map_without_support_term(self):
        params = _params(11, b_scale=0.0)
        params.a[:] = 2.0
        x = np.abs(np.random.default_rng(11).standard_normal((6, 5)))
        np.testing.assert_array_equal(two_tap_map(x, params), 2.0 * x)
