"""
Unit tests for windowing, splits and per-sample normalization.
"""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "../..")))

from core.utils import ConfigError, TooShort
from signals.windows import (
    make_windows,
    normalize_window,
    persistence_forecast,
    split_sizes,
    zscore_per_sample,
)


class TestMakeWindows:
    def test_count(self):
        x = np.arange(20.0).reshape(2, 10)
        assert len(make_windows(x, 3, 1, 1)) == 7

    def test_count_with_stride(self):
        x = np.zeros((2, 30))
        assert len(make_windows(x, 3, 2, 4)) == (30 - 3 - 2) // 4 + 1

    def test_too_short(self):
        with pytest.raises(TooShort):
            make_windows(np.zeros((2, 6)), 3, 5)

    def test_exactly_long_enough(self):
        assert len(make_windows(np.zeros((2, 8)), 3, 5)) == 1

    def test_invalid_sizes(self):
        with pytest.raises(ConfigError):
            make_windows(np.zeros((2, 10)), 0, 1)

    def test_targets_follow_horizon(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((3, 40))
        data = make_windows(x, 4, 3, 2)
        for k in range(len(data)):
            start = data.starts[k]
            np.testing.assert_array_equal(data.inputs[k], x[:, start : start + 4])
            np.testing.assert_array_equal(data.targets[k], x[:, data.target_column(k)])
            assert data.target_column(k) == start + 4 - 1 + 3

    def test_split_sizes_for_hundred(self):
        assert split_sizes(100) == (64, 16, 20)
        data = make_windows(np.zeros((1, 103)), 3, 1)
        assert [data.indices(s).size for s in ("train", "val", "test")] == [64, 16, 20]

    def test_splits_are_chronological(self):
        data = make_windows(np.zeros((2, 57)), 3, 2)
        train, val, test = (data.indices(s) for s in ("train", "val", "test"))
        assert train.max() < val.min() < test.min()
        assert train.size + val.size + test.size == len(data)

    def test_train_end_column(self):
        data = make_windows(np.zeros((2, 103)), 3, 1)
        assert data.train_end_column == 63 + 3 - 1 + 1

    def test_require_nonempty(self):
        with pytest.raises(TooShort):
            make_windows(np.zeros((2, 5)), 3, 1).require_nonempty()

    def test_unknown_split(self):
        with pytest.raises(ConfigError):
            make_windows(np.zeros((2, 10)), 3, 1).indices("holdout")


class TestNormalization:
    def test_constant_column_maps_to_zero(self):
        window = np.ones((4, 3))
        np.testing.assert_array_equal(zscore_per_sample(window), np.zeros((4, 3)))

    def test_standardized_columns_unchanged(self):
        rng = np.random.default_rng(1)
        window = rng.standard_normal((6, 3))
        window = (window - window.mean(axis=0)) / window.std(axis=0, ddof=1)
        np.testing.assert_allclose(zscore_per_sample(window), window, atol=1e-4)

    def test_columns_standardized(self):
        window = np.random.default_rng(2).standard_normal((8, 5)) * 3.0 + 1.0
        z = zscore_per_sample(window)
        assert np.all(np.abs(z.mean(axis=0)) < 1e-10)
        assert np.all(np.abs(z.std(axis=0, ddof=1) - 1.0) < 1e-3)

    def test_target_uses_last_column_statistics(self):
        rng = np.random.default_rng(3)
        window = rng.standard_normal((5, 3))
        z_window, z_target = normalize_window(window, window[:, -1])
        np.testing.assert_allclose(z_target, z_window[:, -1], atol=1e-12)
        np.testing.assert_allclose(z_target, persistence_forecast(z_window), atol=1e-12)

    def test_batched(self):
        rng = np.random.default_rng(4)
        windows = rng.standard_normal((7, 5, 3))
        targets = rng.standard_normal((7, 5))
        z_windows, z_targets = normalize_window(windows, targets)
        for k in range(7):
            single_w, single_t = normalize_window(windows[k], targets[k])
            np.testing.assert_allclose(z_windows[k], single_w, atol=1e-13)
            np.testing.assert_allclose(z_targets[k], single_t, atol=1e-13)

    def test_persistence_is_last_column(self):
        window = np.arange(12.0).reshape(3, 4)
        np.testing.assert_array_equal(persistence_forecast(window), [3.0, 7.0, 11.0])
