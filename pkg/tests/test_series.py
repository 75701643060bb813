import numpy as np
import pytest

from mfmonitor.errors import ArgumentError, DomainError
from mfmonitor.series import MatrixSeries


def test_shape_and_readonly():
    x = MatrixSeries(np.zeros((4, 3, 2)))
    assert x.dims == (3, 2) and x.T == 4 and len(x) == 4
    with pytest.raises(ValueError):
        x.data[0, 0, 0] = 1.0


def test_single_matrix_promoted():
    x = MatrixSeries(np.ones((3, 2)))
    assert x.T == 1 and x.dims == (3, 2)


def test_nonfinite_reports_index():
    d = np.zeros((3, 2, 2))
    d[1, 0, 1] = np.nan
    with pytest.raises(DomainError, match=r"t=1, i=0, j=1"):
        MatrixSeries(d)


def test_check_window_errors():
    x = MatrixSeries(np.zeros((5, 2, 2)))
    assert x.check_window((1, 3)) == (1, 3)
    with pytest.raises(ArgumentError):
        x.check_window((3, 3))
    with pytest.raises(ArgumentError):
        x.check_window((0, 6))


def test_transpose_and_slice():
    d = np.arange(24.0).reshape(2, 3, 4)
    x = MatrixSeries(d)
    assert x.transpose().dims == (4, 3)
    np.testing.assert_array_equal(x.slice(1, 2).data[0], d[1])
