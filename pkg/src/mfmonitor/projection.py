"""Flattened and projected second-moment matrices.

The monitoring statistic is built from the spectrum of the rolling projected
covariance ``(1/m) sum_t Y_t Y_t'`` where ``Y_t = X_t C / p2`` and ``C`` is
an initial column-loading estimate taken from a training window.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional, Tuple

import numpy as np
import scipy.linalg

from .errors import ArgumentError
from .linalg import eigh_sym, top_eigenvalues
from .series import MatrixSeries, Window


@dataclass(frozen=True, eq=False)
class ProjectionState:
    """Initial column-loading estimate ``C = sqrt(p2) * Q``.

    Attributes
    ----------
    c_tilde : ndarray, shape (p2, k_tilde)
        Scaled leading eigenvectors of the flattened covariance, so that
        ``C'C / p2 = I``.
    k_tilde : int
    source_window : (int, int)
        Half-open training window the estimate was computed from.
    """

    c_tilde: np.ndarray
    k_tilde: int
    source_window: Window

    def __post_init__(self):
        c = np.array(self.c_tilde, dtype=np.float64, copy=True)
        c.flags.writeable = False
        object.__setattr__(self, "c_tilde", c)

    @property
    def p2(self) -> int:
        return self.c_tilde.shape[0]


def flattened_cov_rows(series: MatrixSeries, window: Window) -> np.ndarray:
    """Column flattened covariance ``M_r = (1/(n p1)) sum_t X_t' X_t``.

    ``n`` is the window length. Returns a symmetric PSD ``p2 x p2`` matrix.
    """
    start, stop = series.check_window(window)
    x = series.data[start:stop]
    n, p1, p2 = x.shape
    flat = x.reshape(n * p1, p2)
    m_r = flat.T @ flat / (n * p1)
    return 0.5 * (m_r + m_r.T)


def initial_projection(series: MatrixSeries, window: Window, k_tilde: int = 8) -> ProjectionState:
    """Estimate ``C`` from the leading ``k_tilde`` eigenvectors of ``M_r``."""
    start, stop = series.check_window(window)
    p2 = series.p2
    if not 1 <= k_tilde <= p2:
        raise ArgumentError(f"k_tilde={k_tilde} outside [1, {p2}]")
    spec = eigh_sym(flattened_cov_rows(series, (start, stop)), want_vectors=True)
    c_tilde = np.sqrt(p2) * spec.eigenvectors[:, :k_tilde]
    return ProjectionState(c_tilde, k_tilde, (start, stop))


def project_series(series: MatrixSeries, proj: ProjectionState,
                   start: int = 0, stop: Optional[int] = None) -> np.ndarray:
    """Projected observations ``Y_t = X_t C / p2``, shape ``(n, p1, k_tilde)``."""
    if proj.p2 != series.p2:
        raise ArgumentError(f"projection built for p2={proj.p2}, series has p2={series.p2}")
    stop = series.T if stop is None else stop
    return series.data[start:stop] @ proj.c_tilde / series.p2


def _check_tau(series: MatrixSeries, tau: int, m: int) -> None:
    if m < 1:
        raise ArgumentError(f"window length m={m} must be positive")
    if tau < 0 or tau + m > series.T:
        raise ArgumentError(
            f"window [{tau}, {tau + m}) for tau={tau}, m={m} outside series of length {series.T}"
        )


def _second_moment(y: np.ndarray) -> np.ndarray:
    """Unnormalised ``sum_t Y_t Y_t'`` for a stack of ``(n, p1, k)`` blocks."""
    n, p1, k = y.shape
    flat = y.transpose(1, 0, 2).reshape(p1, n * k)
    return flat @ flat.T


def rolling_projected_cov(series: MatrixSeries, proj: ProjectionState, tau: int, m: int) -> np.ndarray:
    """Projected covariance over observations ``tau, ..., tau + m - 1`` (0-based).

    In the 1-based notation of the monitoring scheme this is the window
    ``t = tau + 1, ..., tau + m``; ``tau = 0`` is the training matrix.
    """
    _check_tau(series, tau, m)
    s = _second_moment(project_series(series, proj, tau, tau + m)) / m
    return 0.5 * (s + s.T)


class RollingProjectedCovariance:
    """Rolling projected covariance with rank-``k_tilde`` add/drop updates.

    Advancing the window by one observation adds ``Y_new Y_new'`` and
    subtracts ``Y_old Y_old'``. The sum is rebuilt from scratch every
    ``refresh_every`` advances to bound round-off drift.

    Parameters
    ----------
    series, proj : MatrixSeries, ProjectionState
    m : int
        Window length.
    tau : int
        Initial window offset.
    refresh_every : int, optional
        Defaults to ``m``.
    """

    def __init__(self, series: MatrixSeries, proj: ProjectionState, m: int, tau: int = 0,
                 refresh_every: Optional[int] = None):
        _check_tau(series, tau, m)
        self.series = series
        self.m = m
        self.tau = tau
        self.refresh_every = m if refresh_every is None else max(1, int(refresh_every))
        self._y = project_series(series, proj)
        self._sum = _second_moment(self._y[tau:tau + m])
        self._since_refresh = 0

    def matrix(self) -> np.ndarray:
        s = self._sum / self.m
        return 0.5 * (s + s.T)

    def advance(self) -> np.ndarray:
        if self.tau + self.m >= self.series.T:
            raise ArgumentError("window already at the end of the series")
        old = self._y[self.tau]
        new = self._y[self.tau + self.m]
        self.tau += 1
        self._since_refresh += 1
        if self._since_refresh >= self.refresh_every:
            self._sum = _second_moment(self._y[self.tau:self.tau + self.m])
            self._since_refresh = 0
        else:
            self._sum += new @ new.T - old @ old.T
        return self.matrix()


def _leading_vectors(a: np.ndarray, k: int) -> np.ndarray:
    n = a.shape[0]
    _, v = scipy.linalg.eigh(a, subset_by_index=[n - k, n - 1], check_finite=False,
                             driver="evr")
    return v[:, ::-1]


def refreshed_projected_cov(series: MatrixSeries, tau: int, m: int, k_tilde: int = 8) -> np.ndarray:
    """Projected covariance with ``C`` re-estimated from the same window.

    Full recomputation; the projection is rebuilt from the flattened
    covariance of observations ``tau, ..., tau + m - 1``.
    """
    _check_tau(series, tau, m)
    proj = initial_projection(series, (tau, tau + m), k_tilde)
    return rolling_projected_cov(series, proj, tau, m)


class RefreshedProjectedCovariance:
    """Rolling projected covariance whose ``C`` tracks the current window.

    The flattened covariance is updated with add/drop steps; its leading
    ``k_tilde`` eigenvectors are recomputed at every position and the
    window is projected afresh. Only the spanned subspace enters the
    result, so eigenvector signs are irrelevant.
    """

    def __init__(self, series: MatrixSeries, m: int, k_tilde: int = 8, tau: int = 0,
                 refresh_every: Optional[int] = None):
        _check_tau(series, tau, m)
        if not 1 <= k_tilde <= series.p2:
            raise ArgumentError(f"k_tilde={k_tilde} outside [1, {series.p2}]")
        self.series = series
        self.m = m
        self.k_tilde = k_tilde
        self.tau = tau
        self.refresh_every = m if refresh_every is None else max(1, int(refresh_every))
        self._gram = self._full_gram()
        self._since_refresh = 0

    def _full_gram(self) -> np.ndarray:
        x = self.series.data[self.tau:self.tau + self.m]
        flat = x.reshape(-1, self.series.p2)
        return flat.T @ flat

    def matrix(self) -> np.ndarray:
        g = 0.5 * (self._gram + self._gram.T)
        q = _leading_vectors(g, self.k_tilde)
        y = self.series.data[self.tau:self.tau + self.m] @ q
        s = _second_moment(y) / (self.m * self.series.p2)
        return 0.5 * (s + s.T)

    def advance(self) -> np.ndarray:
        if self.tau + self.m >= self.series.T:
            raise ArgumentError("window already at the end of the series")
        old = self.series.data[self.tau]
        new = self.series.data[self.tau + self.m]
        self.tau += 1
        self._since_refresh += 1
        if self._since_refresh >= self.refresh_every:
            self._gram = self._full_gram()
            self._since_refresh = 0
        else:
            self._gram += new.T @ new - old.T @ old
        return self.matrix()


def iter_rolling_projected_cov(series: MatrixSeries, proj: ProjectionState, m: int,
                               start: int = 1, stop: Optional[int] = None,
                               refresh: bool = False) -> Iterator[Tuple[int, np.ndarray]]:
    """Yield ``(tau, matrix)`` for ``tau = start, ..., stop`` using incremental updates.

    With ``refresh=True`` the projection is re-estimated on every window
    (``proj`` then only supplies ``k_tilde``).
    """
    stop = series.T - m if stop is None else stop
    if refresh:
        roll = RefreshedProjectedCovariance(series, m, proj.k_tilde, tau=start)
    else:
        roll = RollingProjectedCovariance(series, proj, m, tau=start)
    yield start, roll.matrix()
    for _ in range(start + 1, stop + 1):
        yield roll.tau + 1, roll.advance()


class MonitoredEigenvalues(NamedTuple):
    """Eigenvalues tracked at one monitoring step.

    ``lambda_k1`` is ``None`` when ``k1 = 0`` (no spiked eigenvalue exists,
    so the vanishing-factor statistic is undefined).
    """

    lambda_next: float
    lambda_k1: Optional[float]
    trace_mean: float


def eigen_summary(cov: np.ndarray, k1: int) -> MonitoredEigenvalues:
    """``(lambda_{k1+1}, lambda_{k1}, trace / p1)`` of a symmetric matrix."""
    p1 = cov.shape[0]
    if k1 < 0 or k1 + 1 > p1:
        raise ArgumentError(f"k1={k1} needs 0 <= k1 < p1={p1}")
    lam = top_eigenvalues(cov, k1 + 1)
    lam_k1 = float(lam[k1 - 1]) if k1 >= 1 else None
    return MonitoredEigenvalues(float(lam[k1]), lam_k1, float(np.trace(cov)) / p1)


def monitored_eigenvalues(series: MatrixSeries, proj: ProjectionState, tau: int, m: int,
                          k1: int) -> MonitoredEigenvalues:
    return eigen_summary(rolling_projected_cov(series, proj, tau, m), k1)


def eigenvalue_path(series: MatrixSeries, proj: ProjectionState, m: int, k1: int,
                    start: int = 1, stop: Optional[int] = None,
                    refresh: bool = False) -> np.ndarray:
    """Monitored eigenvalues for every ``tau`` in ``[start, stop]``.

    Returns
    -------
    ndarray, shape (n, 3)
        Columns ``lambda_{k1+1}``, ``lambda_{k1}`` (NaN when ``k1 = 0``) and
        ``trace / p1``.
    """
    rows = []
    for _, cov in iter_rolling_projected_cov(series, proj, m, start, stop, refresh):
        ev = eigen_summary(cov, k1)
        rows.append((ev.lambda_next, np.nan if ev.lambda_k1 is None else ev.lambda_k1,
                     ev.trace_mean))
    return np.array(rows, dtype=np.float64).reshape(-1, 3)
