"""Rate-dichotomous transforms of the monitored eigenvalue."""

from __future__ import annotations

import math

from ..errors import ArgumentError, DomainError

PSI_CAP = 1e12
TRACE_FLOOR = 1e-300
VANISH_FORMS = ("reciprocal", "exp_inverse")


def select_delta(p1: int, p2: int, m: int, epsilon: float = 0.05) -> float:
    """Eigenvalue rescaling exponent.

    ``beta = ln p1 / ln(p2 m)``; returns ``epsilon`` when ``beta <= 1/2``
    and ``1 - 1/(2 beta) + epsilon`` otherwise, clamped to ``[0, 1)``.
    """
    if min(p1, p2, m) < 2 or epsilon <= 0:
        raise ArgumentError("select_delta needs p1, p2, m >= 2 and epsilon > 0")
    beta = math.log(p1) / math.log(p2 * m)
    # ln(p2 m) = 2 ln p1 can round either side of exact equality
    if beta <= 0.5 + 1e-12:
        delta = epsilon
    else:
        delta = 1.0 - 1.0 / (2.0 * beta) + epsilon
    return min(max(delta, 0.0), math.nextafter(1.0, 0.0))


def g_exp_pow(x: float, q: float = 4.0) -> float:
    """``[exp(x) - 1]^q`` for ``x >= 0``, saturated at ``PSI_CAP``."""
    if x <= 0.0:
        return 0.0
    # expm1(x)^q > cap  <=>  x > log1p(cap^(1/q))
    if x > math.log1p(PSI_CAP ** (1.0 / q)):
        return PSI_CAP
    return min(math.expm1(x) ** q, PSI_CAP)


def g_vanish(x: float, q: float = 4.0, form: str = "reciprocal") -> float:
    """Transform used when monitoring for a disappearing factor.

    ``"reciprocal"`` is ``1 / g(x)``; ``"exp_inverse"`` is ``exp(1/x) - 1``.
    Both diverge as ``x -> 0`` and are saturated at ``PSI_CAP``.
    """
    if form == "reciprocal":
        gx = g_exp_pow(x, q)
        if gx <= 1.0 / PSI_CAP:
            return PSI_CAP
        return min(1.0 / gx, PSI_CAP)
    if form == "exp_inverse":
        if x <= 0.0 or 1.0 / x > math.log1p(PSI_CAP):
            return PSI_CAP
        return min(math.expm1(1.0 / x), PSI_CAP)
    raise ArgumentError(f"unknown vanish transform {form!r}")


def psi_value(lambda_monitored: float, trace_mean: float, p1: int, delta: float,
              q: float = 4.0, direction: str = "emerge", vanish_form: str = "reciprocal") -> float:
    """Transformed, trace-normalised monitored eigenvalue.

    The argument is ``x = p1^(-delta) * lambda / (trace / p1)``. For
    ``direction="emerge"`` the result is ``g(x)``; for ``"vanish"`` it is the
    vanish transform of ``x`` computed from ``lambda_{k1}``.
    """
    if lambda_monitored is None:
        raise ArgumentError("monitored eigenvalue is absent (k1 = 0 has no lambda_k1)")
    if trace_mean < 0 or lambda_monitored < -1e-9 * max(1.0, trace_mean):
        raise DomainError("psi_value needs nonnegative eigenvalue and trace")
    if direction not in ("emerge", "vanish"):
        raise ArgumentError(f"unknown direction {direction!r}")
    if trace_mean < TRACE_FLOOR:
        return 0.0 if direction == "emerge" else PSI_CAP
    x = p1 ** (-delta) * max(lambda_monitored, 0.0) / trace_mean
    if direction == "emerge":
        return g_exp_pow(x, q)
    return g_vanish(x, q, vanish_form)
