"""
Equivalence tests for the naive Kronecker-expanded convolution.
"""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "../..")))

from core.utils import MemoryBudgetExceeded
from gvsa.kron import kron_apply_naive, kron_kernel, path_adjacency
from gvsa.node_functions import NodeFunctionKind
from gvsa.tensor import graph_variate_tensor, zscore_nodes

LDE = NodeFunctionKind("lde")
IC = NodeFunctionKind("ic")


class TestKronApplyNaive:
    def test_identity_temporal_matches_batched_on_random_shapes(self):
        rng = np.random.default_rng(0)
        for trial in range(50):
            n = int(rng.integers(2, 17))
            t_len = int(rng.integers(1, 33))
            x = rng.standard_normal((n, t_len))
            a = rng.standard_normal((n, n))
            w = 0.5 * (a + a.T)
            kind = LDE if trial % 2 else IC
            batched = graph_variate_tensor(x, w, kind).apply(x)
            naive = kron_apply_naive(x, w, kind, np.eye(t_len))
            scale = max(1.0, np.max(np.abs(batched)))
            assert np.max(np.abs(naive - batched)) <= 1e-10 * scale

    def test_zero_temporal(self):
        x = np.random.default_rng(1).standard_normal((3, 4))
        np.testing.assert_array_equal(
            kron_apply_naive(x, np.ones((3, 3)), LDE, np.zeros((4, 4))), np.zeros((3, 4))
        )

    def test_hand_expanded_kernel(self):
        x = np.array([[1.0, 2.0], [3.0, 5.0]])
        temporal = np.array([[1.0, 2.0], [3.0, 4.0]])
        out = kron_apply_naive(x, np.ones((2, 2)), LDE, temporal)
        np.testing.assert_array_equal(out, [[102.0, 216.0], [40.0, 84.0]])

        omega0 = np.array([[0.0, 4.0], [4.0, 0.0]])
        omega1 = np.array([[0.0, 9.0], [9.0, 0.0]])
        expected = np.block([[1.0 * omega0, 2.0 * omega1], [3.0 * omega0, 4.0 * omega1]])
        slices = graph_variate_tensor(x, np.ones((2, 2)), LDE).slices
        np.testing.assert_array_equal(kron_kernel(slices, temporal), expected)

    def test_zave_applies_to_zscored_signal(self):
        rng = np.random.default_rng(5)
        x = 3.0 + 2.0 * rng.standard_normal((4, 6))
        w = rng.uniform(-1.0, 1.0, (4, 4))
        xz = zscore_nodes(x)
        expected = graph_variate_tensor(xz, w, IC, renormalize=True).apply(xz)
        got = kron_apply_naive(x, w, IC, np.eye(6), renormalize=True, zave=True)
        np.testing.assert_allclose(got, expected, rtol=0, atol=1e-12)
        raw = graph_variate_tensor(x, w, IC, renormalize=True, zave=True).apply(x)
        assert np.max(np.abs(got - raw)) > 1e-3

    def test_batch(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal((2, 4, 6))
        w = np.eye(4) + 0.1
        out = kron_apply_naive(x, w, IC, np.eye(6), renormalize=True)
        expected = graph_variate_tensor(x, w, IC, renormalize=True).apply(x)
        np.testing.assert_allclose(out, expected, atol=1e-10)

    def test_memory_cap(self):
        with pytest.raises(MemoryBudgetExceeded):
            kron_apply_naive(np.ones((4, 8)), np.eye(4), LDE, np.eye(8), max_dim=16)

    def test_path_adjacency(self):
        np.testing.assert_array_equal(
            path_adjacency(3), [[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]]
        )
