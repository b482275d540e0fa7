"""
Seeded random number source.

All randomness goes through numpy's `Generator` on the PCG64 bit generator.
PCG64 output for a given seed is fixed by numpy's stream-compatibility policy,
so sequences are reproducible across runs and platforms. Independent streams
for sub-components come from `make_rng(derive_seed(component, seed))`.
"""

import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    """Return a PCG64-backed generator for `seed`."""
    return np.random.Generator(np.random.PCG64(int(seed)))
