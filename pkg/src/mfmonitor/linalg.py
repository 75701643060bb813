"""Symmetric eigendecomposition and spectrum helpers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import ArgumentError, ConvergenceError, DomainError, SymmetryError

SYMMETRY_TOL = 1e-9
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True, eq=False)
class SymmetricSpectrum:
    """Eigenvalues sorted in decreasing order, with optional eigenvectors.

    Column ``i`` of ``eigenvectors`` pairs with ``eigenvalues[i]``; each
    column has its first non-negligible component positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        if self.eigenvectors is None:
            raise ArgumentError("spectrum was computed without eigenvectors")
        q = self.eigenvectors
        return (q * self.eigenvalues) @ q.T


def _validated(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ArgumentError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix has non-finite entries")
    norm = np.linalg.norm(a)
    asym = np.linalg.norm(a - a.T)
    if asym > SYMMETRY_TOL * norm:
        raise SymmetryError(f"asymmetry {asym:.3e} exceeds {SYMMETRY_TOL:g} * |A|_F = {norm:.3e}")
    return 0.5 * (a + a.T)


def _fix_signs(q: np.ndarray) -> np.ndarray:
    # first component above a relative floor is made positive
    floor = 1e-12 * np.max(np.abs(q), axis=0, initial=0.0)
    lead = np.argmax(np.abs(q) > floor, axis=0)
    signs = np.sign(q[lead, np.arange(q.shape[1])])
    signs[signs == 0] = 1.0
    return q * signs


def _round_robin(n: int):
    """Disjoint (p, q) pair sets covering every pair once per sweep."""
    players = list(range(n + (n % 2)))
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        p, q = [], []
        for i in range(size // 2):
            a, b = players[i], players[size - 1 - i]
            if a < n and b < n:
                p.append(min(a, b))
                q.append(max(a, b))
        rounds.append((np.array(p, dtype=np.intp), np.array(q, dtype=np.intp)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def jacobi_eigh(a: np.ndarray, want_vectors: bool = True, tol: float = JACOBI_TOL,
                max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi eigensolver with parallel (round-robin) pair ordering.

    Each round applies ``n // 2`` disjoint plane rotations at once. Iteration
    stops when the off-diagonal Frobenius mass drops below ``tol * |A|_F``.

    Returns
    -------
    eigenvalues : ndarray
        Unsorted diagonal of the converged matrix.
    eigenvectors : ndarray or None
    """
    A = np.array(a, dtype=np.float64, copy=True)
    n = A.shape[0]
    V = np.eye(n) if want_vectors else None
    scale = max(np.linalg.norm(A), np.finfo(float).tiny)
    rounds = _round_robin(n)
    off = 0.0
    for _ in range(max_sweeps + 1):
        # direct norm; sum(A^2) - sum(diag^2) cancels to ~sqrt(eps)|A|
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= tol * scale:
            return np.diag(A).copy(), V
        for p, q in rounds:
            apq = A[p, q]
            active = np.abs(apq) > 1e-300
            if not np.any(active):
                continue
            p, q, apq = p[active], q[active], apq[active]
            theta = (A[q, q] - A[p, p]) / (2.0 * apq)
            sgn = np.where(theta >= 0.0, 1.0, -1.0)
            t = sgn / (np.abs(theta) + np.hypot(theta, 1.0))
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            ap, aq = A[:, p].copy(), A[:, q].copy()
            A[:, p] = c * ap - s * aq
            A[:, q] = s * ap + c * aq
            ap, aq = A[p, :].copy(), A[q, :].copy()
            A[p, :] = c[:, None] * ap - s[:, None] * aq
            A[q, :] = s[:, None] * ap + c[:, None] * aq
            if V is not None:
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    raise ConvergenceError(
        f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal mass {off:.3e})", off
    )


def eigh_sym(a, want_vectors: bool = True, method: str = "lapack") -> SymmetricSpectrum:
    """Full eigendecomposition of a real symmetric matrix.

    Parameters
    ----------
    a : array_like
        Square matrix, symmetric within ``1e-9 * |a|_F``.
    want_vectors : bool
        Also return eigenvectors (sign-normalised).
    method : {"lapack", "jacobi"}
        ``"lapack"`` calls the LAPACK divide-and-conquer driver;
        ``"jacobi"`` uses :func:`jacobi_eigh`.

    Returns
    -------
    SymmetricSpectrum
        Eigenvalues in decreasing order.

    Raises
    ------
    SymmetryError, DomainError, ConvergenceError
    """
    a = _validated(a)
    if method == "lapack":
        if want_vectors:
            w, q = np.linalg.eigh(a)
        else:
            w, q = np.linalg.eigvalsh(a), None
    elif method == "jacobi":
        w, q = jacobi_eigh(a, want_vectors)
    else:
        raise ArgumentError(f"unknown method {method!r}")
    order = np.argsort(-w, kind="stable")
    w = w[order]
    if q is not None:
        q = _fix_signs(q[:, order])
    return SymmetricSpectrum(w, q)


def top_eigenvalues(a: np.ndarray, k: int) -> np.ndarray:
    """Largest ``k`` eigenvalues of a symmetric matrix, in decreasing order.

    No symmetry validation; meant for the rolling-window hot path where the
    matrix is symmetric by construction.
    """
    n = a.shape[0]
    if not 1 <= k <= n:
        raise ArgumentError(f"k={k} outside [1, {n}]")
    if 4 * k >= n:
        w = np.linalg.eigvalsh(a)[::-1][:k]
    else:
        w = scipy.linalg.eigh(a, eigvals_only=True, subset_by_index=[n - k, n - 1],
                              check_finite=False, driver="evr")[::-1]
    return np.ascontiguousarray(w)


def eigenvalue_ratio_k(spectrum, k_max: int) -> int:
    """Eigenvalue-ratio estimate of the number of spiked eigenvalues.

    Returns ``argmax_{1 <= j <= k_max} lambda_j / lambda_{j+1}`` (1-based),
    taking the smallest ``j`` among ties. A zero ``lambda_{j+1}`` counts as an
    infinite ratio.
    """
    lam = np.asarray(getattr(spectrum, "eigenvalues", spectrum), dtype=np.float64)
    if not 1 <= k_max < len(lam):
        raise ArgumentError(f"k_max={k_max} must lie in [1, {len(lam) - 1}]")
    if np.any(lam < -1e-12 * max(1.0, abs(lam[0]))):
        raise DomainError("eigenvalue-ratio estimator needs a nonnegative spectrum")
    if np.all(np.abs(lam) < 1e-12):
        raise DomainError("degenerate spectrum: all eigenvalues below 1e-12")
    lam = np.clip(lam, 0.0, None)
    num, den = lam[:k_max], lam[1:k_max + 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(den > 1e-12 * lam[0], num / den, np.inf)
    best = np.max(ratios)
    if np.isinf(best):
        return int(np.argmax(np.isinf(ratios))) + 1
    tied = ratios >= best * (1.0 - 1e-12)
    return int(np.argmax(tied)) + 1
