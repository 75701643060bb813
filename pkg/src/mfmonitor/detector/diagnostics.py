"""Advisory diagnostics: null restriction, power expressions, window guidance.

Nothing here blocks a run; values are raw expressions evaluated at finite
sizes, since the underlying statements are asymptotic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional

from .config import DarlingErdos, DetectorConfig, PartialSum, Renyi, WorstCase
from .transforms import PSI_CAP, g_exp_pow

EPSILON_RATE = 0.05
RESTRICTION_WARN = 0.01


def rate_sequence(p1: int, p2: int, m: int, epsilon: float = EPSILON_RATE) -> float:
    """Order of the non-spiked eigenvalues,
    ``(1/p2 + 1/m + p1/sqrt(m p2)) (ln^2 p1 ln p2 ln m)^(1+epsilon)``."""
    logs = math.log(p1) ** 2 * math.log(p2) * math.log(m)
    return (1.0 / p2 + 1.0 / m + p1 / math.sqrt(m * p2)) * logs ** (1.0 + epsilon)


@dataclass(frozen=True)
class RestrictionReport:
    value: float
    argument: float
    rate: float
    ok: bool
    limit: float = RESTRICTION_WARN

    @property
    def flag(self) -> str:
        return "pass" if self.ok else "warn"


def check_restriction(T_m: int, p1: int, p2: int, m: int, delta: float, q: float = 4.0,
                      g: Optional[Callable[[float], float]] = None,
                      epsilon_rate: float = EPSILON_RATE) -> RestrictionReport:
    """Evaluate ``T_m g(p1^(-delta) l)``; warn when it exceeds 0.01.

    Examples
    --------
    >>> check_restriction(100, 100, 100, 100, 0.0742, g=lambda x: 0.0).flag
    'pass'
    """
    g = (lambda x: g_exp_pow(x, q)) if g is None else g
    rate = rate_sequence(p1, p2, m, epsilon_rate)
    arg = p1 ** (-delta) * rate
    value = T_m * g(arg)
    return RestrictionReport(value, arg, rate, value <= RESTRICTION_WARN)


def _power_expr(family, t_star: float, T_m: int, gv: float):
    if gv >= PSI_CAP:
        return "divergent"
    lnln = math.log(math.log(T_m)) if T_m > math.e else math.nan
    frac = t_star / T_m
    if isinstance(family, PartialSum):
        return frac ** (1 - family.eta) * math.sqrt(T_m) / math.sqrt(lnln) * gv
    if isinstance(family, DarlingErdos):
        return frac ** 0.5 * math.sqrt(T_m) / lnln * gv
    if isinstance(family, Renyi):
        r = family.first_tau(T_m)
        return ((r / T_m) ** (family.eta - 0.5) * frac ** (1 - family.eta)
                * math.sqrt(T_m) / math.sqrt(lnln) * gv)
    return gv / math.sqrt(math.log(T_m))


def power_condition_report(config: DetectorConfig, t_star: float, p1: int, p2: int,
                           T_m: Optional[int] = None) -> Dict:
    """Power expressions for every family plus delay and window guidance.

    Parameters
    ----------
    config : DetectorConfig
    t_star : float
        Hypothetical break position on the monitoring clock.
    p1, p2 : int
        Dimensions of the series.
    T_m : int, optional
        Horizon; defaults to ``config.T_m``.

    Returns
    -------
    dict
        ``"power"`` maps family labels to expression values (or
        ``"divergent"`` once ``g`` saturates); ``"delay"`` holds the
        per-step signal growth rates; ``"window"`` the recommended range of
        ``m``.
    """
    T_m = config.T_m if T_m is None else T_m
    if T_m is None:
        raise ValueError("power_condition_report needs a horizon T_m")
    delta = config.delta(p1, p2)
    gv = g_exp_pow(p1 ** (1.0 - delta), config.q)
    fams = [PartialSum(0.0), PartialSum(0.25), DarlingErdos(), Renyi(0.75), WorstCase()]
    if config.family not in fams:
        fams.append(config.family)
    power = {f.label: _power_expr(f, t_star, T_m, gv) for f in fams}

    m = config.m
    beta = math.log(p1) / math.log(p2 * m)
    small_p1 = beta <= 0.5 + 1e-12
    m_small = p1 / math.log(p1)
    delay = {
        "general_rate": p1 ** (1.0 - delta) / m,
        "small_p1_rate": p1 / m,
        "large_p1_rate": math.sqrt(p2 / m),
    }
    for key in list(delay):
        delay[key.replace("rate", "steps")] = 1.0 / delay[key]
    window = {
        "regime": "small_p1" if small_p1 else "large_p1",
        "m_max_small_p1": m_small,
        "m_max_large_p1": float(p2),
        "recommended_m_max": m_small if small_p1 else float(p2),
        "m_min": 2,
    }
    return {"delta": delta, "g_signal": gv, "power": power, "delay": delay, "window": window,
            "t_star": t_star, "T_m": T_m}
