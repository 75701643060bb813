import numpy as np
import pytest

from conftest import power_iteration_spectrum
from mfmonitor.errors import ConvergenceError, DomainError, SymmetryError
from mfmonitor.linalg import (eigenvalue_ratio_k, eigh_sym, jacobi_eigh, top_eigenvalues)


def _sym(rng, n):
    a = rng.standard_normal((n, n))
    return (a + a.T) / 2


def test_identity():
    s = eigh_sym(np.eye(3))
    np.testing.assert_allclose(s.eigenvalues, [1, 1, 1])


def test_diagonal_axis_aligned():
    s = eigh_sym(np.diag([2.0, 5.0, -1.0]))
    np.testing.assert_allclose(s.eigenvalues, [5, 2, -1])
    np.testing.assert_allclose(np.abs(s.eigenvectors), np.eye(3)[:, [1, 0, 2]], atol=1e-12)


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_random_8x8_against_power_iteration(rng, method):
    a = _sym(rng, 8)
    s = eigh_sym(a, method=method)
    np.testing.assert_allclose(s.eigenvalues, power_iteration_spectrum(a), atol=1e-8)


def test_descending_and_sign_convention(rng):
    s = eigh_sym(_sym(rng, 6))
    assert np.all(np.diff(s.eigenvalues) <= 0)
    for col in s.eigenvectors.T:
        first = col[np.abs(col) > 1e-12][0]
        assert first > 0


def test_deterministic(rng):
    a = _sym(rng, 7)
    s1, s2 = eigh_sym(a), eigh_sym(a.copy())
    np.testing.assert_array_equal(s1.eigenvalues, s2.eigenvalues)
    np.testing.assert_array_equal(s1.eigenvectors, s2.eigenvectors)


def test_errors():
    with pytest.raises(SymmetryError):
        eigh_sym(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(DomainError):
        eigh_sym(np.array([[np.inf, 0.0], [0.0, 1.0]]))


def test_jacobi_budget_exhausted_carries_residual(rng):
    with pytest.raises(ConvergenceError) as err:
        jacobi_eigh(_sym(rng, 10), max_sweeps=1)
    assert err.value.residual > 0


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_reconstruction_and_trace_1000(method):
    rng = np.random.default_rng(99)
    n_mats = 1000 if method == "lapack" else 200
    for _ in range(n_mats):
        n = int(rng.integers(1, 13))
        a = _sym(rng, n) * 10 ** rng.uniform(-3, 3)
        s = eigh_sym(a, method=method)
        fro = max(1.0, np.linalg.norm(a))
        assert np.linalg.norm(a - s.reconstruct()) <= 1e-9 * fro
        q = s.eigenvectors
        assert np.abs(q.T @ q - np.eye(n)).max() <= 1e-10 * n
        tr = np.trace(a)
        assert abs(s.eigenvalues.sum() - tr) <= 1e-9 * max(1.0, abs(tr), fro)


def test_top_eigenvalues_matches_full(rng):
    for n, k in [(20, 2), (50, 4), (5, 5)]:
        b = rng.standard_normal((n, n))
        a = b @ b.T
        np.testing.assert_allclose(top_eigenvalues(a, k), np.linalg.eigvalsh(a)[::-1][:k],
                                   rtol=1e-10, atol=1e-10)


def test_eigenvalue_ratio_examples():
    assert eigenvalue_ratio_k(np.array([100.0, 90.0, 1.0, 0.9]), 3) == 2
    assert eigenvalue_ratio_k(np.array([10.0, 1.0, 0.1]), 2) == 1
    with pytest.raises(DomainError):
        eigenvalue_ratio_k(np.zeros(4), 2)
