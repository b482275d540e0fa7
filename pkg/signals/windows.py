"""
Sliding windows, chronological splits and per-sample normalization.

Window k covers raw columns [start_k, start_k + T_w) and its target is column
start_k + T_w - 1 + H. Windows are split in time order: the last 20% are test,
and the last 20% of the remainder are validation.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from core.utils import ConfigError, TooShort
from gvsa.tensor import ZAVE_EPS, zscore_nodes
from linalg.dense import as_matrix

logger = logging.getLogger(__name__)

TRAIN = "train"
VAL = "val"
TEST = "test"

SPLITS = (TRAIN, VAL, TEST)


def split_sizes(count: int) -> Tuple[int, int, int]:
    """(train, val, test) counts: 80/20 chronological, then 80/20 again."""
    trainval = (4 * count) // 5
    train = (4 * trainval) // 5
    return train, trainval - train, count - trainval


@dataclass
class WindowedDataset:
    """Raw windows (M, N, T_w), raw targets (M, N) and their split tags."""

    inputs: np.ndarray
    targets: np.ndarray
    starts: np.ndarray
    tags: np.ndarray
    window: int
    horizon: int
    stride: int

    def __len__(self) -> int:
        return self.inputs.shape[0]

    @property
    def node_count(self) -> int:
        return self.inputs.shape[1]

    def indices(self, split: str) -> np.ndarray:
        if split not in SPLITS:
            raise ConfigError(f"Unknown split '{split}'. Choose from {', '.join(SPLITS)}")
        return np.flatnonzero(self.tags == split)

    def split(self, split: str) -> Tuple[np.ndarray, np.ndarray]:
        """Raw (inputs, targets) of one split."""
        idx = self.indices(split)
        return self.inputs[idx], self.targets[idx]

    def target_column(self, k: int) -> int:
        return int(self.starts[k]) + self.window - 1 + self.horizon

    @property
    def train_end_column(self) -> int:
        """Last raw column touched by a training window or its target."""
        idx = self.indices(TRAIN)
        if idx.size == 0:
            raise TooShort("The training split is empty")
        return self.target_column(int(idx[-1]))

    def require_nonempty(self) -> None:
        for split in SPLITS:
            if self.indices(split).size == 0:
                raise TooShort(
                    f"Split '{split}' is empty ({len(self)} windows); use a longer signal"
                )


def make_windows(x, window: int, horizon: int, stride: int = 1) -> WindowedDataset:
    """
    Cut a signal (N, T) into forecasting windows.

    Raises:
        ConfigError: If window, horizon or stride is below 1
        TooShort: If T < window + horizon
    """
    x = as_matrix(x, "signal")
    if window < 1 or horizon < 1 or stride < 1:
        raise ConfigError(
            f"window, horizon and stride must be >= 1, got {window}, {horizon}, {stride}"
        )
    t_len = x.shape[1]
    if t_len < window + horizon:
        raise TooShort(f"Signal of length {t_len} cannot hold window {window} + horizon {horizon}")

    count = (t_len - window - horizon) // stride + 1
    starts = np.arange(count) * stride
    offsets = np.arange(window)
    inputs = np.transpose(x[:, starts[:, None] + offsets[None, :]], (1, 0, 2)).copy()
    targets = x[:, starts + window - 1 + horizon].T.copy()

    n_train, n_val, n_test = split_sizes(count)
    tags = np.array([TRAIN] * n_train + [VAL] * n_val + [TEST] * n_test)
    logger.info(
        f"Cut {count} windows (T_w={window}, H={horizon}, stride={stride}): "
        f"{n_train} train / {n_val} val / {n_test} test"
    )
    return WindowedDataset(
        inputs=inputs,
        targets=targets,
        starts=starts,
        tags=tags,
        window=window,
        horizon=horizon,
        stride=stride,
    )


def zscore_per_sample(window, eps: float = ZAVE_EPS) -> np.ndarray:
    """Per time column: subtract the channel mean, divide by channel std + eps."""
    return zscore_nodes(window, eps)


def normalize_window(window, target, eps: float = ZAVE_EPS) -> Tuple[np.ndarray, np.ndarray]:
    """
    Normalize a window and its target consistently.

    The window is z-scored per time column. The target uses the mean and std of
    the window's last column, which makes the normalized persistence forecast
    equal to the last normalized column.

    Args:
        window: (N, T_w) or (B, N, T_w)
        target: (N,) or (B, N)
    """
    window = np.asarray(window, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    last = window[..., -1]
    mu = last.mean(axis=-1, keepdims=True)
    std = last.std(axis=-1, ddof=1, keepdims=True)
    return zscore_per_sample(window, eps), (target - mu) / (std + eps)


def persistence_forecast(window) -> np.ndarray:
    """Predict the last observed column."""
    return np.asarray(window, dtype=np.float64)[..., -1].copy()
