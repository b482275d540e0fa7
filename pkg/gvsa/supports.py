"""
Stable supports W and their trainable parameterizations.

A SupportMatrix holds the base support and, depending on its parameterization,
the arrays that training updates:

    fixed   effective = base                        (no trainable arrays)
    dense   effective = sym(weight)                 weight: (N, N)
    lora    effective = sym(base + lora_a @ lora_b) lora_a: (N, r), lora_b: (r, N)
    hira    effective = sym(base ∘ (lora_a @ lora_b))

sym(M) = (M + Mᵀ)/2 keeps the effective support symmetric whatever the factors.
The arrays returned by `trainable_arrays()` are the live arrays, so an
optimizer updating them in place updates the support.
"""

import logging
from typing import Dict, Optional, Tuple

import numpy as np

from core.utils import ConfigError, DimMismatch, ZeroVariance
from linalg.dense import as_matrix, require_square, sym

logger = logging.getLogger(__name__)

FIXED = "fixed"
DENSE = "dense"
LORA = "lora"
HIRA = "hira"

PARAMETERIZATIONS = (FIXED, DENSE, LORA, HIRA)


def default_rank(n: int) -> int:
    return max(1, n // 8)


class SupportMatrix:
    """The support W with one of four parameterizations."""

    def __init__(
        self,
        base,
        parameterization: str = FIXED,
        weight: Optional[np.ndarray] = None,
        lora_a: Optional[np.ndarray] = None,
        lora_b: Optional[np.ndarray] = None,
    ):
        if parameterization not in PARAMETERIZATIONS:
            raise ConfigError(
                f"Unknown support parameterization '{parameterization}'. "
                f"Choose from {', '.join(PARAMETERIZATIONS)}"
            )
        self.base = as_matrix(base, "support")
        n = require_square(self.base, "support")
        self.parameterization = parameterization
        self.weight = None
        self.lora_a = None
        self.lora_b = None

        if parameterization == DENSE:
            self.weight = np.array(
                self.base if weight is None else weight, dtype=np.float64
            )
            if self.weight.shape != (n, n):
                raise DimMismatch(f"Dense weight must be {(n, n)}, got {self.weight.shape}")
        elif parameterization in (LORA, HIRA):
            if lora_a is None or lora_b is None:
                raise ConfigError(f"{parameterization} support needs both factors")
            self.lora_a = np.array(lora_a, dtype=np.float64)
            self.lora_b = np.array(lora_b, dtype=np.float64)
            r = self.lora_a.shape[1] if self.lora_a.ndim == 2 else -1
            if self.lora_a.shape != (n, r) or self.lora_b.shape != (r, n):
                raise DimMismatch(
                    f"Low-rank factors must be (N, r) and (r, N); got "
                    f"{self.lora_a.shape} and {self.lora_b.shape}"
                )

    @classmethod
    def fixed(cls, base) -> "SupportMatrix":
        return cls(base, FIXED)

    @classmethod
    def dense(cls, base) -> "SupportMatrix":
        return cls(base, DENSE)

    @classmethod
    def additive_low_rank(
        cls,
        base,
        rank: Optional[int] = None,
        rng: Optional[np.random.Generator] = None,
        scale: float = 0.01,
    ) -> "SupportMatrix":
        """W = sym(base + AB), starting at AB = 0 (B = 0, A small noise)."""
        base = as_matrix(base, "support")
        n = base.shape[0]
        rank = rank or default_rank(n)
        rng = rng if rng is not None else np.random.default_rng(0)
        lora_a = scale * rng.standard_normal((n, rank))
        lora_b = np.zeros((rank, n))
        return cls(base, LORA, lora_a=lora_a, lora_b=lora_b)

    @classmethod
    def hadamard_low_rank(
        cls,
        base,
        rank: Optional[int] = None,
        rng: Optional[np.random.Generator] = None,
        scale: float = 0.01,
    ) -> "SupportMatrix":
        """W = sym(base ∘ AB), starting with AB close to the all-ones matrix."""
        base = as_matrix(base, "support")
        n = base.shape[0]
        rank = rank or default_rank(n)
        rng = rng if rng is not None else np.random.default_rng(0)
        level = 1.0 / np.sqrt(rank)
        lora_a = level + scale * rng.standard_normal((n, rank))
        lora_b = level + scale * rng.standard_normal((rank, n))
        return cls(base, HIRA, lora_a=lora_a, lora_b=lora_b)

    @classmethod
    def build(
        cls,
        base,
        parameterization: str,
        rank: Optional[int] = None,
        rng: Optional[np.random.Generator] = None,
    ) -> "SupportMatrix":
        if parameterization == FIXED:
            return cls.fixed(base)
        if parameterization == DENSE:
            return cls.dense(base)
        if parameterization == LORA:
            return cls.additive_low_rank(base, rank, rng)
        if parameterization == HIRA:
            return cls.hadamard_low_rank(base, rank, rng)
        raise ConfigError(f"Unknown support parameterization '{parameterization}'")

    @property
    def n(self) -> int:
        return self.base.shape[0]

    @property
    def rank(self) -> Optional[int]:
        return None if self.lora_a is None else self.lora_a.shape[1]

    @property
    def trainable(self) -> bool:
        return self.parameterization != FIXED

    def effective(self) -> np.ndarray:
        if self.parameterization == FIXED:
            return self.base
        if self.parameterization == DENSE:
            return sym(self.weight)
        product = self.lora_a @ self.lora_b
        if self.parameterization == LORA:
            return sym(self.base + product)
        return sym(self.base * product)

    def trainable_arrays(self) -> Dict[str, np.ndarray]:
        if self.parameterization == DENSE:
            return {"weight": self.weight}
        if self.parameterization in (LORA, HIRA):
            return {"lora_a": self.lora_a, "lora_b": self.lora_b}
        return {}

    def support_gradient(self, d_effective: np.ndarray) -> Dict[str, np.ndarray]:
        """
        Map a gradient with respect to effective() onto the trainable arrays.

        Args:
            d_effective: (N, N) gradient of the loss with respect to effective()

        Returns:
            Gradients keyed like `trainable_arrays()`.
        """
        d_m = sym(d_effective)
        if self.parameterization == DENSE:
            return {"weight": d_m}
        if self.parameterization == FIXED:
            return {}
        if self.parameterization == HIRA:
            d_m = d_m * self.base
        return {"lora_a": d_m @ self.lora_b.T, "lora_b": self.lora_a.T @ d_m}

    def copy(self) -> "SupportMatrix":
        return SupportMatrix(
            self.base.copy(),
            self.parameterization,
            weight=self.weight,
            lora_a=self.lora_a,
            lora_b=self.lora_b,
        )

    def __repr__(self) -> str:
        rank = f", rank={self.rank}" if self.rank is not None else ""
        return f"SupportMatrix(n={self.n}, parameterization={self.parameterization!r}{rank})"


def parse_support_param(text: str) -> Tuple[str, Optional[int]]:
    """
    Parse `fixed`, `dense`, `lora:R` or `hira:R` (the rank may be omitted).

    Raises:
        ConfigError: On an unknown form or a non-positive rank
    """
    value = text.strip().lower()
    name, _, rank_text = value.partition(":")
    if name not in PARAMETERIZATIONS:
        raise ConfigError(
            f"Invalid support parameterization '{text}'. "
            "Expected fixed, dense, lora:R or hira:R"
        )
    if not rank_text:
        return name, None
    if name in (FIXED, DENSE):
        raise ConfigError(f"'{name}' support takes no rank")
    try:
        rank = int(rank_text)
    except ValueError:
        raise ConfigError(f"Invalid rank in '{text}'")
    if rank < 1:
        raise ConfigError(f"Rank must be positive, got {rank}")
    return name, rank


def build_support_correlation(x, absolute: bool = False) -> SupportMatrix:
    """
    Long-term Pearson correlation of the node signals as a fixed support.

    Args:
        x: (N, T) signal, T >= 2
        absolute: Take |corr| entrywise

    Raises:
        ZeroVariance: If a node signal is constant
        DimMismatch: If T < 2
    """
    x = as_matrix(x, "signal")
    if x.shape[1] < 2:
        raise DimMismatch(f"Correlation needs at least 2 samples, got {x.shape[1]}")
    centered = x - x.mean(axis=1, keepdims=True)
    norms = np.sqrt(np.einsum("it,it->i", centered, centered))
    flat = np.flatnonzero(norms == 0.0)
    if flat.size:
        raise ZeroVariance(int(flat[0]))

    corr = (centered @ centered.T) / np.multiply.outer(norms, norms)
    corr = np.clip(sym(corr), -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    if absolute:
        corr = np.abs(corr)
    logger.debug(f"Built correlation support for {x.shape[0]} nodes over {x.shape[1]} samples")
    return SupportMatrix.fixed(corr)


def support_from_training_split(signal, dataset, absolute: bool = False) -> SupportMatrix:
    """Correlation support over the raw samples reached by training windows only."""
    x = as_matrix(signal, "signal")
    end = dataset.train_end_column + 1
    return build_support_correlation(x[:, :end], absolute)
