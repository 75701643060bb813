"""Synthetic matrix factor series with optional breaks, and a replication harness.

Every replication draws its random pieces in the same order whatever the
scenario, so scenarios sharing a seed share their pre-break data.
"""

from __future__ import annotations

import logging
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .detector.calibration import CriticalValueTable, default_table
from .detector.config import (PROJECTIONS, DarlingErdos, Family, PartialSum, Renyi,
                              WorstCase)
from .detector.statistics import first_crossings
from .detector.transforms import psi_value, select_delta
from .errors import ArgumentError, ConfigError
from .linalg import eigh_sym
from .projection import initial_projection
from .detector.monitor import eigen_stream
from .rng import GaussianStream, derive_seed
from .series import MatrixSeries

_log = logging.getLogger(__name__)

SCENARIOS = ("null", "loading_switch", "factor_emerge", "factor_vanish", "c_switch",
             "both_switch")
SIZE_SCENARIOS = ("null", "c_switch")
SQRT3 = math.sqrt(3.0)

# Default detector columns of the size and delay tables.
TABLE_FAMILIES: Tuple[Family, ...] = (PartialSum(0.0), PartialSum(0.25), DarlingErdos(),
                                      Renyi(0.65), Renyi(0.75), WorstCase())


@dataclass(frozen=True)
class DgpSpec:
    """Matrix factor data-generating process.

    Parameters
    ----------
    p1, p2, T : int
        Row and column dimension, series length.
    k1, k2 : int
        Row and column factor counts before any break.
    phi : float
        AR(1) coefficient of the vectorised factors.
    psi_ar : float
        AR(1) coefficient of the vectorised noise.
    scenario : str
        One of ``SCENARIOS``.
    t_star : int, optional
        Last pre-break observation (1-based); the break is active from
        ``t_star + 1``. Defaults to ``T // 2`` for break scenarios.
    seed : int
    """

    p1: int
    p2: int
    T: int = 200
    k1: int = 3
    k2: int = 3
    phi: float = 0.1
    psi_ar: float = 0.1
    scenario: str = "null"
    t_star: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if min(self.p1, self.p2, self.T) < 1:
            raise ConfigError("p1, p2 and T must be positive")
        if self.k1 < 0 or self.k2 < 0:
            raise ConfigError("factor counts must be nonnegative")
        if not (abs(self.phi) < 1 and abs(self.psi_ar) < 1):
            raise ConfigError("AR coefficients must satisfy |phi|, |psi_ar| < 1")
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; choose from {SCENARIOS}")
        if self.scenario != "null" and not 0 <= self.break_time < self.T:
            raise ConfigError(f"t_star={self.break_time} must lie in [0, T)")
        if self.scenario == "factor_emerge" and self.k2 < 1:
            raise ConfigError("factor_emerge needs k2 >= 1")

    @property
    def break_time(self) -> int:
        return self.T // 2 if self.t_star is None else self.t_star

    @property
    def has_break(self) -> bool:
        return self.scenario != "null"

    @property
    def monitored_k1(self) -> int:
        """Row factor count seen in a training window that precedes the break."""
        return self.k1 + 1 if self.scenario == "factor_vanish" else self.k1

    @property
    def direction(self) -> str:
        return "vanish" if self.scenario == "factor_vanish" else "emerge"


@lru_cache(maxsize=64)
def _equicorrelation_root(p: int) -> np.ndarray:
    """Symmetric square root of the matrix with unit diagonal and ``1/p`` elsewhere."""
    cov = np.full((p, p), 1.0 / p)
    np.fill_diagonal(cov, 1.0)
    spec = eigh_sym(cov)
    root = (spec.eigenvectors * np.sqrt(np.clip(spec.eigenvalues, 0.0, None))) @ spec.eigenvectors.T
    root = 0.5 * (root + root.T)
    root.setflags(write=False)
    return root


def _ar1(innov: np.ndarray, coef: float) -> np.ndarray:
    """Stationary AR(1) along axis 0 from unit-variance innovations; ``out[0] = innov[0]``."""
    out = np.empty_like(innov)
    out[0] = innov[0]
    scale = math.sqrt(1.0 - coef * coef)
    for t in range(1, len(innov)):
        out[t] = coef * out[t - 1] + scale * innov[t]
    return out


def generate(spec: DgpSpec) -> MatrixSeries:
    """Simulate ``X_t = R F_t C' + E_t`` with the configured break.

    Examples
    --------
    >>> x = generate(DgpSpec(p1=10, p2=8, T=30, seed=1))
    >>> x.dims, x.T
    ((10, 8), 30)
    """
    rng = np.random.default_rng(spec.seed)
    p1, p2, T, k1, k2 = spec.p1, spec.p2, spec.T, spec.k1, spec.k2
    # fixed draw order so scenarios share random numbers
    R = rng.uniform(-SQRT3, SQRT3, (p1, k1))
    C = rng.uniform(-SQRT3, SQRT3, (p2, k2))
    R_new = rng.uniform(-SQRT3, SQRT3, (p1, k1))
    C_new = rng.uniform(-SQRT3, SQRT3, (p2, k2))
    ell = rng.uniform(-SQRT3, SQRT3, (p1, 1))
    F = _ar1(rng.standard_normal((T, k1, k2)), spec.phi)
    f_extra = rng.standard_normal((T, 1, k2))
    Z = rng.standard_normal((T, p1, p2))
    U = _equicorrelation_root(p1) @ Z @ _equicorrelation_root(p2)
    X = _ar1(U, spec.psi_ar)

    ts = spec.break_time
    pre, post = slice(0, ts), slice(ts, T)
    sc = spec.scenario
    R_post = R_new if sc in ("loading_switch", "both_switch") else R
    C_post = C_new if sc in ("c_switch", "both_switch") else C
    X[pre] += R @ F[pre] @ C.T
    if sc == "null":
        X[post] += R @ F[post] @ C.T
    else:
        X[post] += R_post @ F[post] @ C_post.T
    if sc == "factor_emerge":
        X[post] += ell @ f_extra[post] @ C.T
    elif sc == "factor_vanish":
        X[pre] += ell @ f_extra[pre] @ C.T
    return MatrixSeries(X)


@dataclass(frozen=True)
class ReplicationResult:
    """Outcome of one detector on one replication.

    ``delay`` is ``tau_hat - (t_star - m)`` on the monitoring clock and is
    set only when the scenario has a break and the detector rejected.
    """

    rejected: bool
    tau_hat: Optional[int]
    delay: Optional[int]
    seed: int
    family: str
    alpha: float
    runtime: float


@dataclass(frozen=True)
class Cell:
    m: int
    p1: int
    p2: int

    def __str__(self) -> str:
        return f"m={self.m},p1={self.p1},p2={self.p2}"


def _replication(args) -> List[Tuple[int, int, List[List[Optional[int]]], float]]:
    (cell, reps, scenario, T, t_star, master_seed, families, alphas, k_tilde, epsilon,
     projection, table_dict) = args
    table = default_table() if table_dict is None else CriticalValueTable.from_dict(table_dict)
    out = []
    T_m = T - cell.m
    for rep in reps:
        t0 = time.perf_counter()
        seed = derive_seed(master_seed, cell.m, cell.p1, cell.p2, rep)
        spec = DgpSpec(cell.p1, cell.p2, T, scenario=scenario, t_star=t_star, seed=seed)
        x = generate(spec)
        proj = initial_projection(x, (0, cell.m), min(k_tilde, cell.p2))
        delta = select_delta(cell.p1, cell.p2, cell.m, epsilon)
        k1 = spec.monitored_k1
        psis = []
        for eigs in eigen_stream(x, proj, cell.m, k1, 0, T_m, projection == "rolling"):
            lam = eigs.lambda_next if spec.direction == "emerge" else eigs.lambda_k1
            psis.append(psi_value(lam, eigs.trace_mean, cell.p1, delta, 4.0, spec.direction))
        z = GaussianStream(derive_seed(seed, 1)).draw(T_m)
        y = [float(zi) + p for zi, p in zip(z, psis)]
        hats = first_crossings(families, alphas, y, T_m, table)
        out.append((rep, seed, hats, time.perf_counter() - t0))
    return out


@dataclass
class TableResult:
    """Empirical sizes (percent) or median delays per cell, family and alpha."""

    scenario: str
    T: int
    t_star: Optional[int]
    n_reps: int
    master_seed: int
    families: Tuple[str, ...]
    alphas: Tuple[float, ...]
    cells: List[Cell]
    replications: Dict[Tuple[Cell, str, float], List[ReplicationResult]] = field(repr=False)

    @property
    def measures_size(self) -> bool:
        return self.scenario in SIZE_SCENARIOS

    def rejection_rate(self, cell: Cell, family: str, alpha: float) -> float:
        reps = self.replications[(cell, family, alpha)]
        return sum(r.rejected for r in reps) / len(reps)

    def size(self, cell: Cell, family: str, alpha: float) -> float:
        """Empirical rejection frequency in percent."""
        return 100.0 * self.rejection_rate(cell, family, alpha)

    def median_delay(self, cell: Cell, family: str, alpha: float) -> Optional[float]:
        delays = [r.delay for r in self.replications[(cell, family, alpha)]
                  if r.delay is not None]
        return float(statistics.median(delays)) if delays else None

    def value(self, cell: Cell, family: str, alpha: float) -> Optional[float]:
        if self.measures_size:
            return self.size(cell, family, alpha)
        return self.median_delay(cell, family, alpha)

    def to_dict(self) -> dict:
        rows = []
        for c in self.cells:
            for f in self.families:
                for a in self.alphas:
                    rows.append({"m": c.m, "p1": c.p1, "p2": c.p2, "family": f, "alpha": a,
                                 "rejection_rate": self.rejection_rate(c, f, a),
                                 "value": self.value(c, f, a)})
        return {"scenario": self.scenario, "T": self.T, "t_star": self.t_star,
                "n_reps": self.n_reps, "master_seed": self.master_seed,
                "measure": "size_percent" if self.measures_size else "median_delay",
                "rows": rows}

    def to_text(self) -> str:
        """Whitespace-aligned table, one row per cell, one column per (alpha, family)."""
        head = ["m", "p1", "p2"] + [f"{f}@{a:g}" for a in self.alphas for f in self.families]
        lines = [head]
        for c in self.cells:
            row = [str(c.m), str(c.p1), str(c.p2)]
            for a in self.alphas:
                for f in self.families:
                    v = self.value(c, f, a)
                    row.append("NA" if v is None else f"{v:.1f}")
            lines.append(row)
        widths = [max(len(r[i]) for r in lines) for i in range(len(head))]
        measure = "empirical size (%)" if self.measures_size else "median delay"
        title = f"# scenario={self.scenario} T={self.T} reps={self.n_reps} {measure}"
        return "\n".join([title] + ["  ".join(s.rjust(w) for s, w in zip(r, widths))
                                    for r in lines]) + "\n"


def run_table(grid: Sequence[Tuple[int, int, int]], families: Sequence[Family] = TABLE_FAMILIES,
              alphas: Sequence[float] = (0.05, 0.10), n_reps: int = 1000,
              scenario: str = "null", T: int = 200, master_seed: int = 0, n_jobs: int = 1,
              k_tilde: int = 8, epsilon: float = 0.05, t_star: Optional[int] = None,
              projection: str = "frozen",
              table: Optional[CriticalValueTable] = None) -> TableResult:
    """Replicate the monitoring pipeline over a grid of ``(m, p1, p2)`` cells.

    Each replication generates a series, projects on the first ``m``
    observations and monitors ``t = m + 1, ..., T``; with
    ``projection="rolling"`` the column projection is re-estimated on each
    window instead. All families and
    levels share one randomised path per replication. Replication seeds
    depend on ``(master_seed, m, p1, p2, rep)`` only, so results do not
    depend on ``n_jobs`` or on the scenario.
    """
    if n_reps < 1:
        raise ArgumentError("n_reps must be >= 1")
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}")
    if projection not in PROJECTIONS:
        raise ConfigError(f"projection must be one of {PROJECTIONS}")
    cells = [Cell(*map(int, g)) for g in grid]
    for c in cells:
        for f in families:
            f.validate(T - c.m)
    ts = T // 2 if t_star is None else t_star
    table_dict = None if table is None else table.to_dict()
    labels = tuple(f.label for f in families)
    jobs = []
    n_chunks = max(1, n_jobs) * 4 if n_jobs > 1 else 1
    for c in cells:
        for k in range(n_chunks):
            reps = list(range(k, n_reps, n_chunks))
            if reps:
                jobs.append((c, reps, scenario, T, ts, master_seed, tuple(families),
                             tuple(alphas), k_tilde, epsilon, projection, table_dict))
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as ex:
            results = list(ex.map(_replication, jobs))
    else:
        results = [_replication(j) for j in jobs]

    store: Dict[Tuple[Cell, str, float], List[ReplicationResult]] = {
        (c, f, a): [None] * n_reps for c in cells for f in labels for a in alphas}
    for job, res in zip(jobs, results):
        c = job[0]
        for rep, seed, hats, runtime in res:
            for f, row in zip(labels, hats):
                for a, h in zip(alphas, row):
                    delay = None
                    if h is not None and scenario not in SIZE_SCENARIOS:
                        delay = h - (ts - c.m)
                    store[(c, f, a)][rep] = ReplicationResult(h is not None, h, delay, seed, f,
                                                              a, runtime)
    _log.info("finished %d cells x %d reps (%s)", len(cells), n_reps, scenario)
    return TableResult(scenario, T, None if scenario == "null" else ts, n_reps, master_seed,
                       labels, tuple(alphas), cells, store)
