"""Streaming monitor: eigenvalues in, randomised sequence and verdict out."""

from __future__ import annotations

import math
import statistics as _stats
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from ..errors import ArgumentError, ConfigError
from ..projection import (MonitoredEigenvalues, ProjectionState, eigen_summary,
                          initial_projection, iter_rolling_projected_cov)
from ..rng import GaussianStream, derive_seed
from ..series import MatrixSeries
from .calibration import CriticalValueTable
from .config import DetectorConfig
from .statistics import neumaier_add
from .transforms import psi_value


@dataclass(frozen=True)
class Verdict:
    """Result of a monitoring run.

    ``statistic_path`` holds the quantity compared against
    ``threshold_path`` at each step (``|S_tau|``, or ``y_tau`` for the
    worst-case family). ``statistic`` is the normalised detector value over
    the steps seen so far.
    """

    rejected: bool
    tau_hat: Optional[int]
    statistic: float
    statistic_path: np.ndarray
    threshold_path: np.ndarray
    critical_value: float
    family: str

    def __post_init__(self):
        if self.rejected != (self.tau_hat is not None):
            raise ArgumentError("rejected must agree with tau_hat")


@dataclass
class MonitorState:
    """Resumable state of one monitoring stream (single owner).

    ``s_path[i]`` is the compensated sum of ``y_path[:i + 1]``; ``comp`` is
    the running compensation term.
    """

    T_m: int
    p1: int
    delta: float
    critical_value: float
    rng_state: dict
    tau: int = 0
    lambda_path: List[float] = field(default_factory=list)
    trace_path: List[float] = field(default_factory=list)
    psi_path: List[float] = field(default_factory=list)
    z_path: List[float] = field(default_factory=list)
    y_path: List[float] = field(default_factory=list)
    s_path: List[float] = field(default_factory=list)
    stat_path: List[float] = field(default_factory=list)
    threshold_path: List[float] = field(default_factory=list)
    tau_hat: Optional[int] = None
    statistic: float = -math.inf
    total: float = 0.0
    comp: float = 0.0

    def copy(self) -> "MonitorState":
        out = MonitorState(self.T_m, self.p1, self.delta, self.critical_value,
                           _copy_state(self.rng_state))
        for name in ("tau", "tau_hat", "statistic", "total", "comp"):
            setattr(out, name, getattr(self, name))
        for name in ("lambda_path", "trace_path", "psi_path", "z_path", "y_path", "s_path",
                     "stat_path", "threshold_path"):
            setattr(out, name, list(getattr(self, name)))
        return out


def _copy_state(state: dict) -> dict:
    return {k: (dict(v) if isinstance(v, dict) else v) for k, v in state.items()}


class Monitor:
    """Sequential detector fed one set of monitored eigenvalues per step.

    Parameters
    ----------
    config : DetectorConfig
        Must carry ``T_m``.
    p1, p2 : int
        Dimensions of the monitored series (they set ``delta``).
    table : CriticalValueTable, optional
        Source of Monte Carlo critical values; defaults to the bundled table.
    state : MonitorState, optional
        Resume from a saved state instead of starting fresh.

    Examples
    --------
    >>> from mfmonitor.detector.config import WorstCase
    >>> cfg = DetectorConfig(k1=1, m=10, family=WorstCase(), T_m=20, rng_seed=3)
    >>> mon = Monitor(cfg, p1=5, p2=5)
    >>> mon.step(psi=0.0).tau
    1
    """

    def __init__(self, config: DetectorConfig, p1: int, p2: int,
                 table: Optional[CriticalValueTable] = None,
                 state: Optional[MonitorState] = None):
        if config.T_m is None:
            raise ConfigError("Monitor needs config.T_m")
        self.config = config
        self.family = config.family
        self._stream = GaussianStream(config.rng_seed)
        if state is None:
            crit = self.family.critical_value(config.T_m, config.alpha, table)
            state = MonitorState(config.T_m, p1, config.delta(p1, p2), crit,
                                 self._stream.state)
        else:
            state = state.copy()
            self._stream.state = _copy_state(state.rng_state)
        self._state = state

    @property
    def state(self) -> MonitorState:
        s = self._state.copy()
        s.rng_state = _copy_state(self._stream.state)
        return s

    @property
    def tau(self) -> int:
        return self._state.tau

    @property
    def done(self) -> bool:
        return self._state.tau >= self._state.T_m

    def psi(self, eigs: MonitoredEigenvalues) -> float:
        cfg = self.config
        lam = eigs.lambda_next if cfg.direction == "emerge" else eigs.lambda_k1
        return psi_value(lam, eigs.trace_mean, self._state.p1, self._state.delta, cfg.q,
                         cfg.direction, cfg.vanish_transform)

    def step(self, eigs: Optional[MonitoredEigenvalues] = None, *,
             psi: Optional[float] = None) -> "Monitor":
        """Advance by one monitoring step.

        Either ``eigs`` or an explicit ``psi`` must be supplied; the latter
        bypasses the eigenvalue transform (useful for null checks).
        Recording continues after the first crossing.
        """
        st = self._state
        if st.tau >= st.T_m:
            raise ArgumentError(f"monitoring horizon T_m={st.T_m} exhausted")
        if psi is None:
            if eigs is None:
                raise ArgumentError("step needs eigenvalues or psi")
            psi = self.psi(eigs)
        elif psi < 0:
            raise ArgumentError("psi must be nonnegative")
        tau = st.tau + 1
        z = self._stream.next()
        y = z + psi
        st.total, st.comp = neumaier_add(st.total, st.comp, y)
        s = st.total + st.comp
        fam = self.family
        compared = abs(s) if fam.uses_partial_sums else y
        thr = fam.threshold(tau, st.T_m, st.critical_value)
        if tau >= fam.first_tau(st.T_m):
            st.statistic = max(st.statistic, fam.normalised(tau, st.T_m, compared))
        if st.tau_hat is None and fam.crossed(compared, thr):
            st.tau_hat = tau
        if eigs is not None:
            st.lambda_path.append(eigs.lambda_next if self.config.direction == "emerge"
                                  else eigs.lambda_k1)
            st.trace_path.append(eigs.trace_mean)
        else:
            st.lambda_path.append(math.nan)
            st.trace_path.append(math.nan)
        st.psi_path.append(float(psi))
        st.z_path.append(z)
        st.y_path.append(y)
        st.s_path.append(s)
        st.stat_path.append(compared)
        st.threshold_path.append(thr)
        st.tau = tau
        return self

    def verdict(self) -> Verdict:
        st = self._state
        return Verdict(st.tau_hat is not None, st.tau_hat, st.statistic,
                       np.array(st.stat_path), np.array(st.threshold_path),
                       st.critical_value, self.family.label)


def step(state: MonitorState, eigs: Optional[MonitoredEigenvalues], config: DetectorConfig,
         psi: Optional[float] = None) -> MonitorState:
    """Functional form of :meth:`Monitor.step`; the input state is not modified."""
    mon = Monitor(config, state.p1, 2, state=state)
    return mon.step(eigs, psi=psi).state


@dataclass(frozen=True)
class MonitorRun:
    """A monitoring run over a concrete series."""

    verdict: Verdict
    state: MonitorState
    projection: ProjectionState
    config: DetectorConfig
    train_start: int

    @property
    def break_index(self) -> Optional[int]:
        """0-based index of the newest observation when the detector fired."""
        if self.verdict.tau_hat is None:
            return None
        return self.train_start + self.config.m + self.verdict.tau_hat - 1


def horizon_for(series: MatrixSeries, m: int, train_start: int = 0) -> int:
    T_m = series.T - train_start - m
    if T_m < 1:
        raise ArgumentError(
            f"series of length {series.T} leaves no monitoring steps after training "
            f"window [{train_start}, {train_start + m})")
    return T_m


def eigen_stream(series: MatrixSeries, proj: ProjectionState, m: int, k1: int,
                 train_start: int = 0, T_m: Optional[int] = None, refresh: bool = False):
    """Monitored eigenvalues for ``tau = 1, ..., T_m`` relative to ``train_start``."""
    T_m = horizon_for(series, m, train_start) if T_m is None else T_m
    for _, cov in iter_rolling_projected_cov(series, proj, m, train_start + 1,
                                             train_start + T_m, refresh):
        yield eigen_summary(cov, k1)


def run_monitor(series: MatrixSeries, config: DetectorConfig, k_tilde: int = 8,
                train_start: int = 0, table: Optional[CriticalValueTable] = None,
                stop_at_detection: bool = False) -> MonitorRun:
    """Project on the training window, then monitor the remainder of ``series``.

    The training window is ``[train_start, train_start + m)``; step ``tau``
    uses the rolling window ``[train_start + tau, train_start + tau + m)``.
    ``config.T_m`` defaults to the number of available steps.
    """
    available = horizon_for(series, config.m, train_start)
    if config.T_m is None:
        config = config.with_horizon(available)
    elif config.T_m > available:
        raise ArgumentError(f"T_m={config.T_m} exceeds the {available} available steps")
    k_tilde = min(k_tilde, series.p2)
    proj = initial_projection(series, (train_start, train_start + config.m), k_tilde)
    mon = Monitor(config, series.p1, series.p2, table)
    for eigs in eigen_stream(series, proj, config.m, config.k1, train_start, config.T_m,
                             config.projection == "rolling"):
        mon.step(eigs)
        if stop_at_detection and mon.state.tau_hat is not None:
            break
    return MonitorRun(mon.verdict(), mon.state, proj, config, train_start)


def monitor_with_restarts(series: MatrixSeries, config: DetectorConfig, k_tilde: int = 8,
                          table: Optional[CriticalValueTable] = None,
                          k1_for: Optional[Callable[[MatrixSeries, int, int], int]] = None,
                          max_breaks: int = 50) -> List[MonitorRun]:
    """Detect several breaks by restarting after each detection.

    After a detection the training window is re-anchored right after the
    detecting window, with ``k1`` re-estimated by ``k1_for(series, start,
    m)`` when given. Each segment uses its own seed derived from
    ``config.rng_seed`` and the segment index. Stops when fewer than one
    monitoring step remains or the family cannot run on the short horizon.
    """
    runs: List[MonitorRun] = []
    start = 0
    base = config.replace(T_m=None)
    while len(runs) < max_breaks and series.T - start > config.m:
        k1 = config.k1 if k1_for is None else int(k1_for(series, start, config.m))
        seg_seed = config.rng_seed if not runs else derive_seed(config.rng_seed, len(runs))
        try:
            cfg = base.replace(k1=k1, rng_seed=seg_seed,
                               T_m=horizon_for(series, config.m, start))
        except ConfigError:
            break
        run = run_monitor(series, cfg, k_tilde, start, table, stop_at_detection=True)
        runs.append(run)
        if not run.verdict.rejected:
            break
        start = start + config.m + run.verdict.tau_hat
    return runs


@dataclass(frozen=True)
class VoteResult:
    """Replication vote over independent randomisations of the same data."""

    fraction: float
    declared: bool
    median_tau_hat: Optional[float]
    tau_hats: tuple
    threshold: float


def replication_vote(series: MatrixSeries, config: DetectorConfig, n_reps: int = 100,
                     threshold: float = 0.8, k_tilde: int = 8, train_start: int = 0,
                     table: Optional[CriticalValueTable] = None) -> VoteResult:
    """Rerun the randomisation ``n_reps`` times and declare a break only if
    more than ``threshold`` of the runs reject.

    The eigenvalue path is computed once; only the Gaussian perturbation
    changes between runs (seeds derived from ``config.rng_seed``).
    """
    if n_reps < 1 or not 0.0 < threshold < 1.0:
        raise ArgumentError("n_reps must be >= 1 and threshold in (0, 1)")
    if config.T_m is None:
        config = config.with_horizon(horizon_for(series, config.m, train_start))
    proj = initial_projection(series, (train_start, train_start + config.m),
                              min(k_tilde, series.p2))
    eigs = list(eigen_stream(series, proj, config.m, config.k1, train_start, config.T_m,
                             config.projection == "rolling"))
    psis = None
    hats = []
    for i in range(n_reps):
        mon = Monitor(config.replace(rng_seed=derive_seed(config.rng_seed, i)),
                      series.p1, series.p2, table)
        if psis is None:
            psis = [mon.psi(e) for e in eigs]
        for p in psis:
            mon.step(psi=p)
        hats.append(mon.state.tau_hat)
    hits = [h for h in hats if h is not None]
    frac = len(hits) / n_reps
    return VoteResult(frac, frac > threshold, _stats.median(hits) if hits else None,
                      tuple(hats), threshold)


def replay(config: DetectorConfig, psi_path: Sequence[float], p1: int, p2: int,
           table: Optional[CriticalValueTable] = None) -> Monitor:
    """Run a fresh monitor over a fixed ``psi`` sequence."""
    mon = Monitor(config, p1, p2, table)
    for p in psi_path:
        mon.step(psi=float(p))
    return mon
