"""Closed-form norming sequences and asymptotic critical values."""

from __future__ import annotations

import math
from typing import Tuple

from ..errors import ConfigError

# ln ln ln T > 0 requires T > e^e ~ 15.15
DARLING_ERDOS_MIN_HORIZON = 16


def darling_erdos_norming(T_m: int) -> Tuple[float, float]:
    """``(alpha_T, beta_T)`` for the standardised partial-sum maximum."""
    if T_m < DARLING_ERDOS_MIN_HORIZON:
        raise ConfigError(
            f"Darling-Erdos norming needs T_m >= {DARLING_ERDOS_MIN_HORIZON}, got {T_m}"
        )
    llt = math.log(math.log(T_m))
    a = math.sqrt(2.0 * llt)
    b = 2.0 * llt + 0.5 * math.log(llt) - 0.5 * math.log(math.pi)
    return a, b


def darling_erdos_critical_value(T_m: int, alpha: float) -> float:
    a, b = darling_erdos_norming(T_m)
    return (b - math.log(-math.log1p(-alpha))) / a


def gaussian_max_norming(T_m: int) -> Tuple[float, float]:
    """``(a_T, b_T)`` such that ``(max_{tau<=T} z_tau - b_T) / a_T`` is nearly Gumbel."""
    if T_m < 2:
        raise ConfigError(f"worst-case norming needs T_m >= 2, got {T_m}")
    r = math.sqrt(2.0 * math.log(T_m))
    b = r - (math.log(math.log(T_m)) + math.log(4.0 * math.pi)) / (2.0 * r)
    a = b / (1.0 + b * b)
    return a, b


def worst_case_critical_value(T_m: int, alpha: float) -> float:
    a, b = gaussian_max_norming(T_m)
    return b - a * math.log(-math.log1p(-alpha))
