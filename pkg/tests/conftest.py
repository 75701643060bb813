import numpy as np
import pytest

from mfmonitor.series import MatrixSeries

# PASS/FAIL lines from test_acceptance.py, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_series(rng, T=30, p1=6, p2=5):
    return MatrixSeries(rng.standard_normal((T, p1, p2)))


def power_iteration_spectrum(a, iters=20000, tol=1e-14):
    """Eigenvalues by power iteration with Hotelling deflation.

    Works on ``a + s I`` with a shift making the matrix positive definite,
    so the dominant eigenvalue is always the largest signed one.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    shift = np.abs(a).sum(axis=1).max() + 1.0
    b = a + shift * np.eye(n)
    vals = []
    start = np.random.default_rng(0)
    for _ in range(n):
        v = start.standard_normal(n)
        v /= np.linalg.norm(v)
        lam = 0.0
        for _ in range(iters):
            w = b @ v
            new = float(v @ w)
            v = w / np.linalg.norm(w)
            if abs(new - lam) <= tol * abs(new):
                lam = new
                break
            lam = new
        # Rayleigh quotient refinement
        lam = float(v @ b @ v)
        vals.append(lam - shift)
        b = b - lam * np.outer(v, v)
    return np.sort(np.array(vals))[::-1]
