"""
Unit tests for CSV signal reading and writing.
"""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "../..")))

from core.utils import DataError, ParseError, RaggedRows
from signals.csv_io import load_csv_signal, write_csv_signal


class TestLoadCsvSignal:
    def test_literal_file(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("1,2,3\n4.5,-6,7e-1\n")
        x = load_csv_signal(path)
        np.testing.assert_array_equal(x, [[1.0, 2.0, 3.0], [4.5, -6.0, 0.7]])

    def test_transpose(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("1,2,3\n4,5,6\n")
        np.testing.assert_array_equal(load_csv_signal(path, transpose=True), [[1, 4], [2, 5], [3, 6]])

    def test_transpose_twice(self, tmp_path):
        x = np.random.default_rng(0).standard_normal((3, 5))
        path = write_csv_signal(tmp_path / "x.csv", x)
        flipped = write_csv_signal(tmp_path / "t.csv", load_csv_signal(path, transpose=True))
        np.testing.assert_array_equal(load_csv_signal(flipped, transpose=True), x)

    def test_write_then_read_is_exact(self, tmp_path):
        x = np.random.default_rng(1).standard_normal((6, 40)) * 1e3
        path = write_csv_signal(tmp_path / "x.csv", x, header="#gvnn-kit v1 manifest=abc")
        assert path.read_text().splitlines()[0] == "#gvnn-kit v1 manifest=abc"
        np.testing.assert_array_equal(load_csv_signal(path), x)

    def test_comment_lines_skipped(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("# header\n1,2\n#middle\n3,4\n")
        assert load_csv_signal(path).shape == (2, 2)

    def test_parse_error_position(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("1,2,3\n4,abc,6\n")
        with pytest.raises(ParseError) as excinfo:
            load_csv_signal(path)
        assert (excinfo.value.row, excinfo.value.col) == (2, 2)

    def test_non_finite_rejected(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("1,nan\n")
        with pytest.raises(ParseError):
            load_csv_signal(path)

    def test_ragged_rows(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("1,2,3\n4,5\n")
        with pytest.raises(RaggedRows):
            load_csv_signal(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("# nothing here\n")
        with pytest.raises(DataError):
            load_csv_signal(path)
