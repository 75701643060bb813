import math

import numpy as np
import pytest

from mfmonitor.detector.config import DarlingErdos, PartialSum, Renyi, WorstCase
from mfmonitor.detector.statistics import (compensated_cumsum, evaluate_family,
                                           first_crossings, stat_darling_erdos,
                                           stat_partial_sum, stat_renyi, stat_worst_case)


def test_partial_sum_hand_example():
    r = stat_partial_sum(np.cumsum(np.ones(4)), 4, 0.0, critical_value=2.24)
    assert r.statistic == 2.0
    assert r.tau_hat is None
    np.testing.assert_allclose(r.thresholds, 2.24 * 2.0)


def test_partial_sum_first_crossing():
    s = [1.0, 2.0, 4.5, 1.0]
    r = stat_partial_sum(s, 4, 0.0, critical_value=2.24)
    assert r.tau_hat == 3


def test_darling_erdos_zero_path():
    r = stat_darling_erdos(np.zeros(100), 100, 0.05)
    assert r.statistic == 0.0 and r.tau_hat is None
    assert r.critical_value == pytest.approx(3.2408, abs=5e-4)


def test_worst_case_negative_path():
    r = stat_worst_case(-np.ones(100), 100, 0.05)
    assert r.tau_hat is None and r.statistic == -1.0
    y = np.zeros(100)
    y[40] = r.critical_value
    assert stat_worst_case(y, 100).tau_hat is None  # strict inequality
    y[41] = r.critical_value + 1e-9
    assert stat_worst_case(y, 100).tau_hat == 42


def test_renyi_skips_early_steps():
    s = np.zeros(100)
    s[:9] = 1e6
    r = stat_renyi(s, 100, 0.75)
    assert r.tau_hat is None
    assert np.isinf(r.thresholds[:9]).all() and np.isfinite(r.thresholds[9:]).all()
    assert r.statistic == 0.0


def test_compensated_cumsum_accuracy():
    vals = [1e16, 1.0, -1e16, 1.0] * 50
    assert compensated_cumsum(vals)[-1] == 100.0
    rng = np.random.default_rng(0)
    x = rng.standard_normal(1000)
    assert compensated_cumsum(x)[-1] == pytest.approx(math.fsum(x), abs=1e-12)


def test_null_stream_size_sanity():
    rng = np.random.default_rng(1)
    fams = [PartialSum(0.0), WorstCase(), DarlingErdos(), Renyi(0.75)]
    hits = np.zeros(len(fams))
    for _ in range(2000):
        y = rng.standard_normal(200)
        hats = first_crossings(fams, [0.05], y, 200)
        hits += [h[0] is not None for h in hats]
    rates = hits / 2000
    assert rates[0] == pytest.approx(0.05, abs=0.015)
    assert (rates <= 0.08).all()


def test_evaluate_matches_direct():
    rng = np.random.default_rng(2)
    y = rng.standard_normal(50) + 0.5
    s = np.cumsum(y)
    a = evaluate_family(PartialSum(0.25), y, 50, 0.05)
    b = stat_partial_sum(s, 50, 0.25, 0.05)
    assert a.tau_hat == b.tau_hat
    np.testing.assert_allclose(a.compared, b.compared, atol=1e-12)
