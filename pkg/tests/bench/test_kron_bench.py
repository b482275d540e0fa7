"""
Unit tests for the Kronecker benchmark.
"""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "../..")))

from bench import kron_bench
from bench.kron_bench import (
    BATCHED,
    NAIVE,
    _batched_apply,
    estimate_bytes,
    fit_exponent,
    run_benchmark,
    write_bench_csv,
)
from core.utils import ConfigError
from gvsa.node_functions import parse_node_function
from gvsa.tensor import LowRankGraphVariateOperator, graph_variate_tensor


class TestEstimateBytes:
    def test_naive_is_quadratic_in_t(self):
        assert estimate_bytes(NAIVE, 2, 4, 8) == 8 * 2 * (32**2 + 8 * 16)
        assert estimate_bytes(NAIVE, 1, 4, 16) - 8 * 16 * 16 == 4 * (
            estimate_bytes(NAIVE, 1, 4, 8) - 8 * 8 * 16
        )

    def test_batched_is_linear_in_t(self):
        # L, R and W(R ∘ x), each (B, T, N, rank)
        assert estimate_bytes(BATCHED, 2, 4, 8) == 8 * 3 * 2 * 8 * 4 * 3
        assert estimate_bytes(BATCHED, 3, 5, 20) == 2 * estimate_bytes(BATCHED, 3, 5, 10)

    def test_batched_counts_factor_rank(self):
        rank_one = estimate_bytes(BATCHED, 1, 6, 10, rank=1)
        assert 4 * rank_one == estimate_bytes(BATCHED, 1, 6, 10, rank=4)
        assert estimate_bytes(BATCHED, 1, 16, 512) < estimate_bytes(NAIVE, 1, 16, 512)

    def test_unknown_method(self):
        with pytest.raises(ConfigError):
            estimate_bytes("dense", 1, 1, 1)


class TestFitExponent:
    def test_power_law(self):
        lengths = [8, 16, 32, 64]
        assert fit_exponent(lengths, [3e-6 * t**2 for t in lengths]) == pytest.approx(2.0)

    def test_needs_two_points(self):
        with pytest.raises(ConfigError):
            fit_exponent([8], [1.0])


class TestRunBenchmark:
    def test_small_run(self):
        results = run_benchmark(batch=2, nodes=4, t_list=[8], repeats=1)
        assert [r.method for r in results] == [NAIVE, BATCHED]
        naive, batched = results
        assert naive.checksum == pytest.approx(batched.checksum, abs=1e-10)
        assert all(r.median_seconds >= 0.0 and r.exponent is None for r in results)

    def test_exponent_set_per_method(self):
        results = run_benchmark(batch=1, nodes=3, t_list=[4, 8], repeats=1, methods=[BATCHED])
        assert [r.length for r in results] == [4, 8]
        assert results[0].exponent == results[1].exponent is not None

    def test_memory_cap_skips_naive(self):
        results = run_benchmark(batch=1, nodes=4, t_list=[8], repeats=1, max_dim=16)
        naive, batched = results
        assert naive.skipped and naive.median_seconds is None
        assert not batched.skipped and batched.median_seconds is not None

    def test_parallel_matches_serial(self):
        serial = run_benchmark(batch=3, nodes=4, t_list=[6], repeats=1, methods=[BATCHED])
        pooled = run_benchmark(
            batch=3, nodes=4, t_list=[6], repeats=1, methods=[BATCHED], parallel=True
        )
        assert pooled[0].parallel
        assert pooled[0].checksum == pytest.approx(serial[0].checksum, rel=1e-12)

    def test_batched_runs_the_low_rank_operator(self, monkeypatch):
        built = []

        class Recording(LowRankGraphVariateOperator):
            def __init__(self, *args, **kwargs):
                super().__init__(*args, **kwargs)
                built.append(self.rank)

        monkeypatch.setattr(kron_bench, "LowRankGraphVariateOperator", Recording)
        results = run_benchmark(
            batch=2, nodes=4, t_list=[8], repeats=1, node_function="ic", methods=[BATCHED]
        )
        assert built and set(built) == {1}
        assert results[0].est_bytes == estimate_bytes(BATCHED, 2, 4, 8, rank=1)

    @pytest.mark.parametrize("node_function", ["lde", "ic", "combo:0.5,2"])
    def test_batched_matches_dense_slices(self, node_function):
        kind = parse_node_function(node_function)
        x = np.random.default_rng(3).standard_normal((2, 5, 7))
        support = np.abs(np.corrcoef(np.random.default_rng(4).standard_normal((5, 20))))
        expected = graph_variate_tensor(x, support, kind).apply(x)
        np.testing.assert_allclose(
            _batched_apply(x, support, kind, None), expected, rtol=1e-10, atol=1e-10
        )
        np.testing.assert_allclose(
            _batched_apply(x, support, kind, 2), expected, rtol=1e-10, atol=1e-10
        )

    def test_path_graph_timing(self):
        results = run_benchmark(batch=1, nodes=3, t_list=[5], repeats=1, path_graph=True)
        assert results[0].median_seconds is not None

    def test_invalid_arguments(self):
        with pytest.raises(ConfigError):
            run_benchmark(batch=0, t_list=[8])
        with pytest.raises(ConfigError):
            run_benchmark(t_list=[8], methods=["gpu"])

    def test_csv(self, tmp_path):
        results = run_benchmark(batch=1, nodes=3, t_list=[4], repeats=1, max_dim=4)
        path = write_bench_csv(tmp_path / "bench.csv", results, "#gvnn-kit v1 manifest=abc")
        lines = path.read_text().splitlines()
        assert lines[0] == "#gvnn-kit v1 manifest=abc"
        assert lines[1].startswith("method,B,N,T,median_seconds,est_bytes")
        assert lines[2].startswith("naive_kron,1,3,4,,")
        assert lines[2].endswith(",true,false")


@pytest.mark.slow
class TestScaling:
    def test_batched_exponent(self):
        results = run_benchmark(batch=8, nodes=16, t_list=[64, 128, 256, 512], methods=[BATCHED])
        assert 0.7 <= results[0].exponent <= 1.4

    def test_naive_exponent(self):
        results = run_benchmark(batch=2, nodes=16, t_list=[16, 32, 64], methods=[NAIVE])
        assert 1.6 <= results[0].exponent <= 2.5
