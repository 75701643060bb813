"""Detector families and the configuration of a monitoring run."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Union

from ..errors import ConfigError
from .calibration import CriticalValueTable, default_table
from .norming import (DARLING_ERDOS_MIN_HORIZON, darling_erdos_critical_value,
                      worst_case_critical_value)
from .transforms import VANISH_FORMS, select_delta


@dataclass(frozen=True)
class PartialSum:
    """Weighted CUSUM ``T^(eta-1/2) max_tau |S_tau| / tau^eta``, ``0 <= eta < 1/2``.

    Rejects at the first ``tau`` with ``|S_tau| >= c T^(1/2-eta) tau^eta``.
    """

    eta: float = 0.0
    name = "partial_sum"
    uses_partial_sums = True

    def validate(self, T_m: Optional[int]) -> None:
        if not 0.0 <= self.eta < 0.5:
            raise ConfigError(f"PartialSum needs 0 <= eta < 1/2, got {self.eta}")

    @property
    def label(self) -> str:
        return f"partial_sum(eta={self.eta:g})"

    def critical_value(self, T_m: int, alpha: float, table: Optional[CriticalValueTable] = None):
        table = default_table() if table is None else table
        return table.lookup(self.eta, alpha).value

    def threshold(self, tau: int, T_m: int, crit: float) -> float:
        return crit * T_m ** (0.5 - self.eta) * tau ** self.eta

    def first_tau(self, T_m: int) -> int:
        return 1

    def crossed(self, value: float, threshold: float) -> bool:
        return value >= threshold

    def normalised(self, tau: int, T_m: int, value: float) -> float:
        return T_m ** (self.eta - 0.5) * value / tau ** self.eta


@dataclass(frozen=True)
class DarlingErdos:
    """Standardised partial sums ``max_tau |S_tau| / tau^(1/2)`` with closed-form norming."""

    name = "darling_erdos"
    uses_partial_sums = True
    eta = 0.5

    def validate(self, T_m: Optional[int]) -> None:
        if T_m is not None and T_m < DARLING_ERDOS_MIN_HORIZON:
            raise ConfigError(
                f"DarlingErdos needs T_m >= {DARLING_ERDOS_MIN_HORIZON}, got {T_m}")

    @property
    def label(self) -> str:
        return "darling_erdos"

    def critical_value(self, T_m: int, alpha: float, table=None) -> float:
        return darling_erdos_critical_value(T_m, alpha)

    def threshold(self, tau: int, T_m: int, crit: float) -> float:
        return crit * math.sqrt(tau)

    def first_tau(self, T_m: int) -> int:
        return 1

    def crossed(self, value: float, threshold: float) -> bool:
        return value >= threshold

    def normalised(self, tau: int, T_m: int, value: float) -> float:
        return value / math.sqrt(tau)


@dataclass(frozen=True)
class Renyi:
    """Renyi-type statistic ``r^(eta-1/2) max_{tau >= r} |S_tau| / tau^eta``, ``eta > 1/2``.

    ``r`` defaults to ``ceil(sqrt(T_m))``. The critical value is read from
    the ``[0, 1]`` weighted table at weight ``1 - eta``.
    """

    eta: float = 0.75
    r: Optional[int] = None
    name = "renyi"
    uses_partial_sums = True

    def validate(self, T_m: Optional[int]) -> None:
        if not self.eta > 0.5:
            raise ConfigError(f"Renyi needs eta > 1/2, got {self.eta}")
        if self.r is not None and self.r < 1:
            raise ConfigError(f"Renyi start r must be >= 1, got {self.r}")
        if T_m is not None and self.first_tau(T_m) > T_m:
            raise ConfigError(f"Renyi start r={self.first_tau(T_m)} beyond horizon T_m={T_m}")

    @property
    def label(self) -> str:
        return f"renyi(eta={self.eta:g})"

    def first_tau(self, T_m: int) -> int:
        return self.r if self.r is not None else math.ceil(math.sqrt(T_m))

    def critical_value(self, T_m: int, alpha: float, table: Optional[CriticalValueTable] = None):
        table = default_table() if table is None else table
        return table.lookup(round(1.0 - self.eta, 12), alpha).value

    def threshold(self, tau: int, T_m: int, crit: float) -> float:
        r = self.first_tau(T_m)
        if tau < r:
            return math.inf
        return crit * r ** (0.5 - self.eta) * tau ** self.eta

    def crossed(self, value: float, threshold: float) -> bool:
        return value >= threshold

    def normalised(self, tau: int, T_m: int, value: float) -> float:
        r = self.first_tau(T_m)
        if tau < r:
            return math.nan
        return r ** (self.eta - 0.5) * value / tau ** self.eta


@dataclass(frozen=True)
class WorstCase:
    """Maximum of the randomised sequence, ``Z = max_tau y_tau``, with Gumbel norming."""

    name = "worst_case"
    uses_partial_sums = False

    def validate(self, T_m: Optional[int]) -> None:
        if T_m is not None and T_m < 2:
            raise ConfigError(f"WorstCase needs T_m >= 2, got {T_m}")

    @property
    def label(self) -> str:
        return "worst_case"

    def critical_value(self, T_m: int, alpha: float, table=None) -> float:
        return worst_case_critical_value(T_m, alpha)

    def threshold(self, tau: int, T_m: int, crit: float) -> float:
        return crit

    def first_tau(self, T_m: int) -> int:
        return 1

    def crossed(self, value: float, threshold: float) -> bool:
        return value > threshold

    def normalised(self, tau: int, T_m: int, value: float) -> float:
        return value


Family = Union[PartialSum, DarlingErdos, Renyi, WorstCase]

PROJECTIONS = ("frozen", "rolling")


def parse_family(text: str) -> Family:
    """Parse ``"partial_sum:0.25"``, ``"darling_erdos"``, ``"renyi:0.75"``, ``"worst_case"``."""
    name, _, arg = text.strip().partition(":")
    name = name.strip().lower().replace("-", "_")
    if name in ("partial_sum", "ps", "cusum"):
        return PartialSum(float(arg) if arg else 0.0)
    if name in ("darling_erdos", "de"):
        return DarlingErdos()
    if name == "renyi":
        eta, _, r = arg.partition(",")
        return Renyi(float(eta) if eta else 0.75, int(r) if r else None)
    if name in ("worst_case", "wc", "worst"):
        return WorstCase()
    raise ConfigError(f"unknown detector family {text!r}")


def family_spec(family: Family) -> str:
    """Inverse of :func:`parse_family`."""
    if isinstance(family, PartialSum):
        return f"partial_sum:{family.eta!r}"
    if isinstance(family, Renyi):
        return f"renyi:{family.eta!r}" + ("" if family.r is None else f",{family.r}")
    return family.name


@dataclass(frozen=True)
class DetectorConfig:
    """Everything that determines a monitoring run.

    Parameters
    ----------
    k1 : int
        Number of row factors found in the training sample.
    m : int
        Training sample size and rolling window length.
    family : PartialSum, DarlingErdos, Renyi or WorstCase
    alpha : float
        Significance level.
    T_m : int, optional
        Monitoring horizon; when omitted it is taken from the data.
    epsilon : float
        Slack in the rescaling exponent ``delta``.
    delta_override : float, optional
        Fixed ``delta`` in ``[0, 1)``, bypassing the size-based rule.
    q : float
        Exponent of ``g(x) = [exp(x) - 1]^q``.
    direction : {"emerge", "vanish"}
        Monitor ``lambda_{k1+1}`` for a new factor or ``lambda_{k1}`` for a
        disappearing one.
    vanish_transform : {"reciprocal", "exp_inverse"}
    rng_seed : int
        Seed of the randomisation stream.
    projection : {"frozen", "rolling"}
        Keep the column projection estimated on the training window, or
        re-estimate it on every rolling window.
    """

    k1: int
    m: int
    family: Family = field(default_factory=PartialSum)
    alpha: float = 0.05
    T_m: Optional[int] = None
    epsilon: float = 0.05
    delta_override: Optional[float] = None
    q: float = 4.0
    direction: str = "emerge"
    vanish_transform: str = "reciprocal"
    rng_seed: int = 0
    projection: str = "frozen"

    def __post_init__(self):
        if self.k1 < 0:
            raise ConfigError(f"k1 must be >= 0, got {self.k1}")
        if self.m < 2:
            raise ConfigError(f"m must be >= 2, got {self.m}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.epsilon <= 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if self.delta_override is not None and not 0.0 <= self.delta_override < 1.0:
            raise ConfigError(f"delta_override must lie in [0, 1), got {self.delta_override}")
        if self.q <= 0:
            raise ConfigError(f"q must be positive, got {self.q}")
        if self.direction not in ("emerge", "vanish"):
            raise ConfigError(f"direction must be 'emerge' or 'vanish', got {self.direction!r}")
        if self.direction == "vanish" and self.k1 < 1:
            raise ConfigError("vanish monitoring needs k1 >= 1")
        if self.vanish_transform not in VANISH_FORMS:
            raise ConfigError(f"vanish_transform must be one of {VANISH_FORMS}")
        if self.T_m is not None and self.T_m < 1:
            raise ConfigError(f"T_m must be positive, got {self.T_m}")
        if not 0 <= self.rng_seed < 2 ** 64:
            raise ConfigError("rng_seed must be a 64-bit unsigned integer")
        if self.projection not in PROJECTIONS:
            raise ConfigError(f"projection must be one of {PROJECTIONS}, got {self.projection!r}")
        self.family.validate(self.T_m)

    def delta(self, p1: int, p2: int) -> float:
        if self.delta_override is not None:
            return self.delta_override
        return select_delta(p1, p2, self.m, self.epsilon)

    def with_horizon(self, T_m: int) -> "DetectorConfig":
        return replace(self, T_m=T_m)

    def replace(self, **changes) -> "DetectorConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "k1": self.k1, "m": self.m, "family": family_spec(self.family),
            "alpha": self.alpha, "T_m": self.T_m, "epsilon": self.epsilon,
            "delta_override": self.delta_override, "q": self.q,
            "direction": self.direction, "vanish_transform": self.vanish_transform,
            "rng_seed": self.rng_seed, "projection": self.projection,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DetectorConfig":
        d = dict(d)
        d["family"] = parse_family(d["family"])
        return cls(**d)
