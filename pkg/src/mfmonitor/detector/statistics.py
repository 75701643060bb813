"""Batch evaluation of the sequential detectors on a complete path.

These functions replay a finished randomised sequence. They share the
scalar threshold and comparison code with the streaming monitor, so the
first crossing found here is the same index the monitor reports.
"""

from __future__ import annotations

import math
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..errors import ArgumentError
from .calibration import CriticalValueTable
from .config import DarlingErdos, Family, PartialSum, Renyi, WorstCase


def neumaier_add(total: float, comp: float, value: float) -> Tuple[float, float]:
    """One step of Neumaier compensated summation; returns ``(total, comp)``."""
    t = total + value
    if abs(total) >= abs(value):
        comp += (total - t) + value
    else:
        comp += (value - t) + total
    return t, comp


def compensated_cumsum(values: Sequence[float]) -> np.ndarray:
    """Prefix sums accumulated with Neumaier compensation."""
    out = np.empty(len(values))
    total = comp = 0.0
    for i, v in enumerate(values):
        total, comp = neumaier_add(total, comp, float(v))
        out[i] = total + comp
    return out


class BatchResult(NamedTuple):
    """Outcome of a detector replayed over a whole path.

    ``statistic`` is the normalised detector value (compare with
    ``critical_value``); ``compared`` and ``thresholds`` are the per-step
    quantities whose first crossing defines ``tau_hat`` (1-based).
    """

    statistic: float
    critical_value: float
    compared: np.ndarray
    thresholds: np.ndarray
    tau_hat: Optional[int]


def _replay(family: Family, compared: Sequence[float], T_m: int, crit: float) -> BatchResult:
    n = len(compared)
    if n > T_m:
        raise ArgumentError(f"path of length {n} exceeds horizon T_m={T_m}")
    thresholds = np.array([family.threshold(tau, T_m, crit) for tau in range(1, n + 1)])
    tau_hat = None
    stat = -math.inf
    for tau in range(1, n + 1):
        v = float(compared[tau - 1])
        if tau >= family.first_tau(T_m):
            stat = max(stat, family.normalised(tau, T_m, v))
        if tau_hat is None and family.crossed(v, float(thresholds[tau - 1])):
            tau_hat = tau
    return BatchResult(stat, crit, np.asarray(compared, dtype=float), thresholds, tau_hat)


def stat_partial_sum(s_path, T_m: int, eta: float, alpha: float = 0.05,
                     table: Optional[CriticalValueTable] = None,
                     critical_value: Optional[float] = None) -> BatchResult:
    """Weighted CUSUM ``T_m^(eta-1/2) max_tau |S_tau| / tau^eta``.

    Examples
    --------
    >>> r = stat_partial_sum([1.0, 2.0, 3.0, 4.0], 4, 0.0, critical_value=2.24)
    >>> r.statistic
    2.0
    """
    fam = PartialSum(eta)
    fam.validate(T_m)
    crit = fam.critical_value(T_m, alpha, table) if critical_value is None else critical_value
    return _replay(fam, np.abs(np.asarray(s_path, dtype=float)), T_m, crit)


def stat_darling_erdos(s_path, T_m: int, alpha: float = 0.05) -> BatchResult:
    """Standardised CUSUM ``max_tau |S_tau| / sqrt(tau)`` against ``c_{alpha,m}``."""
    fam = DarlingErdos()
    fam.validate(T_m)
    crit = fam.critical_value(T_m, alpha)
    return _replay(fam, np.abs(np.asarray(s_path, dtype=float)), T_m, crit)


def stat_renyi(s_path, T_m: int, eta: float, alpha: float = 0.05, r: Optional[int] = None,
               table: Optional[CriticalValueTable] = None,
               critical_value: Optional[float] = None) -> BatchResult:
    """Renyi statistic over ``tau >= r``; thresholds before ``r`` are infinite."""
    fam = Renyi(eta, r)
    fam.validate(T_m)
    crit = fam.critical_value(T_m, alpha, table) if critical_value is None else critical_value
    return _replay(fam, np.abs(np.asarray(s_path, dtype=float)), T_m, crit)


def stat_worst_case(y_path, T_m: int, alpha: float = 0.05) -> BatchResult:
    """``Z = max_tau y_tau`` against the Gumbel critical value ``c_{alpha,2}``."""
    fam = WorstCase()
    fam.validate(T_m)
    crit = fam.critical_value(T_m, alpha)
    return _replay(fam, np.asarray(y_path, dtype=float), T_m, crit)


def evaluate_family(family: Family, y_path, T_m: int, alpha: float,
                    table: Optional[CriticalValueTable] = None,
                    s_path: Optional[np.ndarray] = None) -> BatchResult:
    """Replay any detector family on a randomised sequence ``y``."""
    family.validate(T_m)
    crit = family.critical_value(T_m, alpha, table)
    if family.uses_partial_sums:
        s = compensated_cumsum(y_path) if s_path is None else s_path
        return _replay(family, np.abs(s), T_m, crit)
    return _replay(family, np.asarray(y_path, dtype=float), T_m, crit)


def first_crossings(families: Sequence[Family], alphas: Sequence[float], y_path, T_m: int,
                    table: Optional[CriticalValueTable] = None) -> List[List[Optional[int]]]:
    """``tau_hat`` for every ``(family, alpha)`` sharing one randomised path."""
    s = compensated_cumsum(y_path)
    return [[evaluate_family(f, y_path, T_m, a, table, s).tau_hat for a in alphas]
            for f in families]
