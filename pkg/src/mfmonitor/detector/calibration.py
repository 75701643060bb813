"""Monte Carlo critical values for weighted sup-functionals of Brownian motion.

The weighted partial-sum detector needs ``c`` with
``P(sup_{0<=u<=1} |W(u)| / u^w > c) = alpha``; the Renyi detector reuses the
same table at weight ``1 - eta``. Values are estimated on a discretised path
built from i.i.d. Gaussian increments and cached with their provenance.
"""

from __future__ import annotations

import json
import logging
import math
import warnings
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import ArgumentError

_log = logging.getLogger(__name__)

FUNCTIONAL = "sup_abs_bm_weighted"
MIN_PRECISE_PATHS = 10_000
DEFAULT_PATHS = 1_000_000
DEFAULT_STEPS = 10_000
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class CriticalValueEntry:
    functional: str
    weight: float
    alpha: float
    n_paths: int
    n_steps: int
    seed: int
    value: float
    provenance: str = "monte_carlo"
    warning: Optional[str] = None

    @property
    def key(self) -> Tuple:
        return (self.functional, self.weight, self.alpha, self.n_paths, self.n_steps, self.seed)


def _check_weight(weight: float) -> None:
    if not weight < 1.0:
        raise ArgumentError(f"weight must be < 1, got {weight}")


def simulate_sup_functionals(weights: Sequence[float], n_paths: int, n_steps: int, seed: int,
                             chunk_paths: Optional[int] = None) -> np.ndarray:
    """Per-path maxima of ``|W(k/n)| / (k/n)^w`` for each weight.

    Returns
    -------
    ndarray, shape (len(weights), n_paths)
    """
    if n_paths < 1 or n_steps < 1:
        raise ArgumentError("n_paths and n_steps must be positive")
    for w in weights:
        _check_weight(w)
    rng = np.random.default_rng(seed)
    grid = np.arange(1, n_steps + 1) / n_steps
    scales = [None if w == 0 else grid ** (-w) for w in weights]
    if chunk_paths is None:
        chunk_paths = max(1, min(n_paths, 2_000_000 // n_steps))
    out = np.empty((len(weights), n_paths))
    inv_sqrt_n = 1.0 / math.sqrt(n_steps)
    done = 0
    while done < n_paths:
        rows = min(chunk_paths, n_paths - done)
        path = rng.standard_normal((rows, n_steps))
        np.cumsum(path, axis=1, out=path)
        np.abs(path, out=path)
        path *= inv_sqrt_n
        for i, scale in enumerate(scales):
            if scale is None:
                out[i, done:done + rows] = path.max(axis=1)
            else:
                out[i, done:done + rows] = (path * scale).max(axis=1)
        done += rows
    return out


def calibrate_sup_functionals(weights: Sequence[float], alphas: Sequence[float],
                              n_paths: int = DEFAULT_PATHS, n_steps: int = DEFAULT_STEPS,
                              seed: int = 0) -> List[CriticalValueEntry]:
    """Critical values for every ``(weight, alpha)`` pair from one simulation."""
    for a in alphas:
        if not 0.0 < a < 1.0:
            raise ArgumentError(f"alpha must lie in (0, 1), got {a}")
    maxima = simulate_sup_functionals(weights, n_paths, n_steps, seed)
    warning = None
    if n_paths < MIN_PRECISE_PATHS:
        warning = f"only {n_paths} paths; quantiles are imprecise"
        warnings.warn(warning, stacklevel=2)
    entries = []
    for w, row in zip(weights, maxima):
        for a in alphas:
            value = float(np.quantile(row, 1.0 - a))
            entries.append(CriticalValueEntry(FUNCTIONAL, float(w), float(a), int(n_paths),
                                              int(n_steps), int(seed), value, "monte_carlo",
                                              warning))
    return entries


def calibrate_sup_functional(weight: float, alpha: float, n_paths: int = DEFAULT_PATHS,
                             n_steps: int = DEFAULT_STEPS, seed: int = 0) -> float:
    """``(1 - alpha)`` quantile of ``sup_{0<=u<=1} |W(u)| / u^weight``.

    Examples
    --------
    >>> calibrate_sup_functional(0.0, 0.05, n_paths=20_000, n_steps=500, seed=1)  # doctest: +SKIP
    2.2...
    """
    return calibrate_sup_functionals([weight], [alpha], n_paths, n_steps, seed)[0].value


class CriticalValueTable:
    """Cache of Monte Carlo critical values keyed by full provenance.

    Serialised as JSON with shortest round-trip float formatting, so values
    read back from a cache file are bit-identical to the ones written.
    """

    def __init__(self, entries: Iterable[CriticalValueEntry] = ()):
        self._entries: Dict[Tuple, CriticalValueEntry] = {}
        for e in entries:
            self.add(e)

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(sorted(self._entries.values(), key=lambda e: e.key))

    def __contains__(self, key) -> bool:
        return tuple(key) in self._entries

    def add(self, entry: CriticalValueEntry) -> None:
        self._entries[entry.key] = entry

    def get(self, weight: float, alpha: float, n_paths: int, n_steps: int, seed: int,
            functional: str = FUNCTIONAL) -> Optional[CriticalValueEntry]:
        return self._entries.get((functional, float(weight), float(alpha), int(n_paths),
                                  int(n_steps), int(seed)))

    def calibrate(self, weights: Sequence[float], alphas: Sequence[float],
                  n_paths: int = DEFAULT_PATHS, n_steps: int = DEFAULT_STEPS,
                  seed: int = 0) -> List[CriticalValueEntry]:
        """Return cached entries, simulating only the missing ones."""
        missing_w = sorted({float(w) for w in weights for a in alphas
                            if self.get(w, a, n_paths, n_steps, seed) is None})
        if missing_w:
            _log.info("calibrating weights %s at %d paths x %d steps", missing_w, n_paths, n_steps)
            for e in calibrate_sup_functionals(missing_w, alphas, n_paths, n_steps, seed):
                if self.get(e.weight, e.alpha, n_paths, n_steps, seed) is None:
                    self.add(e)
        return [self.get(w, a, n_paths, n_steps, seed) for w in weights for a in alphas]

    def lookup(self, weight: float, alpha: float) -> CriticalValueEntry:
        """Highest-resolution entry for ``(weight, alpha)``."""
        hits = [e for e in self._entries.values()
                if e.functional == FUNCTIONAL and math.isclose(e.weight, weight, abs_tol=1e-12)
                and math.isclose(e.alpha, alpha, abs_tol=1e-12)]
        if not hits:
            raise KeyError(
                f"no critical value for weight={weight}, alpha={alpha}; "
                "run `mfmonitor calibrate` or CriticalValueTable.calibrate"
            )
        return max(hits, key=lambda e: (e.n_paths * e.n_steps, -e.seed))

    def to_dict(self) -> dict:
        return {"schema": SCHEMA_VERSION, "entries": [asdict(e) for e in self]}

    @classmethod
    def from_dict(cls, payload: dict) -> "CriticalValueTable":
        if payload.get("schema") != SCHEMA_VERSION:
            raise ArgumentError(f"unsupported critical value schema {payload.get('schema')!r}")
        return cls(CriticalValueEntry(**e) for e in payload["entries"])

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n",
                              encoding="utf-8")

    @classmethod
    def load(cls, path) -> "CriticalValueTable":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def merged(self, other: "CriticalValueTable") -> "CriticalValueTable":
        return CriticalValueTable(list(self) + list(other))


_DEFAULT: Optional[CriticalValueTable] = None


def default_table() -> CriticalValueTable:
    """Bundled table (10^6 paths x 10^4 steps), loaded once and shared read-only."""
    global _DEFAULT
    if _DEFAULT is None:
        text = resources.files("mfmonitor").joinpath("data/critical_values.json").read_text(
            encoding="utf-8")
        _DEFAULT = CriticalValueTable.from_dict(json.loads(text))
    return _DEFAULT
