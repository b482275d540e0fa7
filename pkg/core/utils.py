"""
Shared errors and small helpers for gvnn-kit.

Every failure raised by the library derives from GvnnKitError and belongs to one
of four categories. The CLI maps the category onto its exit code, so callers
that only care about "what kind of failure" can catch the category.
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

logger = logging.getLogger(__name__)


class GvnnKitError(Exception):
    """Base class for every error raised by gvnn-kit."""

    exit_code = 1


class ConfigError(GvnnKitError):
    """Raised for invalid configuration values, files or flags."""

    exit_code = 2


class DataError(GvnnKitError):
    """Raised when input data or shapes cannot be used."""

    exit_code = 3


class NumericError(GvnnKitError):
    """Raised when a numerical procedure fails or leaves the finite range."""

    exit_code = 4


class VerificationError(GvnnKitError):
    """Raised when a bound check's hypothesis or a verification run fails."""

    exit_code = 5


class DimMismatch(DataError):
    pass


class NotSquare(DataError):
    pass


class ShapeMismatch(DataError):
    pass


class CacheMismatch(DataError):
    """Backward pass called with a cache that does not belong to the inputs."""

    pass


class RaggedRows(DataError):
    pass


class TooShort(DataError):
    pass


class CheckpointError(DataError):
    pass


class ParseError(DataError):
    """A CSV cell could not be parsed as a decimal number."""

    def __init__(self, row: int, col: int, value: str):
        super().__init__(f"Cannot parse value {value!r} at row {row}, column {col}")
        self.row = row
        self.col = col


class ZeroVariance(DataError):
    """A node signal is constant, so its correlation is undefined."""

    def __init__(self, node: int):
        super().__init__(f"Node {node} has zero variance")
        self.node = node


class NonConvergence(NumericError):
    pass


class NonFinite(NumericError):
    """A non-finite value appeared; `epoch` is set when raised by training."""

    def __init__(self, message: str, epoch: Optional[int] = None):
        super().__init__(message)
        self.epoch = epoch


class Divergence(NumericError):
    pass


class MemoryBudgetExceeded(NumericError):
    pass


class HypothesisViolated(VerificationError):
    pass


class NegativeSupport(VerificationError):
    pass


class VerificationFailed(VerificationError):
    pass


def check_finite(name: str, value: Union[np.ndarray, float]) -> None:
    """Raise NonFinite if `value` holds NaN or Inf."""
    if not np.all(np.isfinite(value)):
        raise NonFinite(f"Non-finite values in {name}")


def canonical_json(payload: Any) -> str:
    """Serialize with sorted keys and no whitespace, for hashing."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)


def digest_json(payload: Any, length: int = 16) -> str:
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()[
        :length
    ]


def sha256_file(path: Union[str, Path]) -> str:
    """Return the hex SHA-256 digest of a file's bytes."""
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def ensure_parent_dir(path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path
