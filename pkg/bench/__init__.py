"""Complexity benchmark of the naive and batched graph-variate products."""

from bench.kron_bench import (
    BATCHED,
    NAIVE,
    BenchResult,
    estimate_bytes,
    fit_exponent,
    run_benchmark,
    write_bench_csv,
    write_bench_svg,
)

__all__ = [
    "BATCHED",
    "NAIVE",
    "BenchResult",
    "estimate_bytes",
    "fit_exponent",
    "run_benchmark",
    "write_bench_csv",
    "write_bench_svg",
]
