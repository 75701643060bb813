import math

import numpy as np
import pytest

from mfmonitor.detector.norming import (darling_erdos_critical_value, darling_erdos_norming,
                                        gaussian_max_norming, worst_case_critical_value)
from mfmonitor.detector.transforms import (PSI_CAP, g_exp_pow, g_vanish, psi_value,
                                           select_delta)
from mfmonitor.errors import ArgumentError, ConfigError, DomainError


def test_select_delta_boundary():
    assert select_delta(50, 50, 50, 0.05) == pytest.approx(0.05, abs=1e-12)


def test_select_delta_large_p1():
    beta = math.log(100) / math.log(8000)
    assert select_delta(100, 80, 100, 0.05) == pytest.approx(1 - 1 / (2 * beta) + 0.05)
    assert select_delta(100, 80, 100, 0.05) == pytest.approx(0.0742, abs=1e-4)


def test_select_delta_small_p1_and_clamp():
    assert select_delta(10, 100, 100, 0.1) == 0.1
    assert select_delta(10 ** 6, 2, 2, 0.9) < 1.0
    with pytest.raises(ArgumentError):
        select_delta(1, 5, 5)


def test_g_values():
    assert g_exp_pow(0.0) == 0.0
    assert g_exp_pow(1.0) == pytest.approx((math.e - 1) ** 4, rel=1e-14)
    assert g_exp_pow(1.0) == pytest.approx(8.7172, abs=5e-5)
    assert g_exp_pow(500.0) == PSI_CAP
    assert g_exp_pow(-1.0) == 0.0


def test_psi_examples():
    assert psi_value(0.0, 1.0, 50, 0.05) == 0.0
    # lambda chosen so that the ratio argument is exactly 1
    p1, delta = 64, 0.5
    assert psi_value(8.0, 1.0, p1, delta) == pytest.approx((math.e - 1) ** 4, rel=1e-12)


def test_psi_vanish_caps_and_guards():
    assert psi_value(1e-300, 1.0, 50, 0.05, direction="vanish") == PSI_CAP
    assert psi_value(1e-300, 1.0, 50, 0.05, direction="vanish",
                     vanish_form="exp_inverse") == PSI_CAP
    assert psi_value(1.0, 0.0, 50, 0.05) == 0.0
    assert psi_value(1.0, 0.0, 50, 0.05, direction="vanish") == PSI_CAP
    with pytest.raises(DomainError):
        psi_value(-1.0, 1.0, 50, 0.05)
    with pytest.raises(ArgumentError):
        psi_value(None, 1.0, 50, 0.05)


def test_vanish_emerge_duality():
    grid = np.geomspace(1e-3, 2000, 80)
    emerge = [g_exp_pow(x) for x in grid]
    for form in ("reciprocal", "exp_inverse"):
        vanish = [g_vanish(x, form=form) for x in grid]
        assert all(a >= b for a, b in zip(vanish, vanish[1:]))
        assert vanish[0] >= 1e6 and vanish[-1] < 1e-3
    assert all(a <= b for a, b in zip(emerge, emerge[1:]))
    for x in (0.5, 1.0, 2.0):
        assert g_vanish(x) * g_exp_pow(x) == pytest.approx(1.0)
        assert g_vanish(x, form="exp_inverse") == pytest.approx(math.expm1(1 / x))


def test_psi_nonnegative(rng):
    for _ in range(200):
        lam, tr = rng.uniform(0, 50), rng.uniform(1e-3, 10)
        for d in ("emerge", "vanish"):
            assert psi_value(lam, tr, 30, 0.1, direction=d) >= 0.0


def test_darling_erdos_values():
    llt = math.log(math.log(100))
    a = math.sqrt(2 * llt)
    b = 2 * llt + 0.5 * math.log(llt) - 0.5 * math.log(math.pi)
    na, nb = darling_erdos_norming(100)
    assert na == pytest.approx(1.7477, abs=1e-4) and nb == pytest.approx(2.6938, abs=1e-4)
    assert (na, nb) == pytest.approx((a, b), rel=1e-14)
    assert darling_erdos_critical_value(100, 0.05) == pytest.approx(3.2408, abs=5e-4)
    with pytest.raises(ConfigError):
        darling_erdos_norming(15)


def test_worst_case_values():
    a, b = gaussian_max_norming(100)
    assert b == pytest.approx(2.3663, abs=5e-5)
    assert a == pytest.approx(0.3586, abs=5e-5)
    assert worst_case_critical_value(100, 0.05) == pytest.approx(3.4314, abs=5e-4)
    assert worst_case_critical_value(100, 0.10) < worst_case_critical_value(100, 0.05)
    with pytest.raises(ConfigError):
        gaussian_max_norming(1)
