import json
import warnings

import numpy as np
import pytest

from mfmonitor.detector.calibration import (CriticalValueTable, calibrate_sup_functional,
                                            calibrate_sup_functionals, default_table,
                                            simulate_sup_functionals)
from mfmonitor.errors import ArgumentError


def test_bundled_table_values():
    t = default_table()
    assert 2.22 <= t.lookup(0.0, 0.05).value <= 2.26
    for w in (0.0, 0.1, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45):
        vals = [t.lookup(w, a).value for a in (0.01, 0.025, 0.05, 0.1)]
        assert vals == sorted(vals, reverse=True)
    for a in (0.01, 0.05, 0.1):
        assert t.lookup(0.25, a).value > t.lookup(0.0, a).value


def test_weight_zero_matches_series_formula():
    # P(sup_{[0,1]} |W| < c) = (4/pi) sum_k (-1)^k/(2k+1) exp(-(2k+1)^2 pi^2 / (8 c^2))
    k = np.arange(200)

    def cdf(c):
        return 4 / np.pi * np.sum((-1.0) ** k / (2 * k + 1)
                                  * np.exp(-(2 * k + 1) ** 2 * np.pi ** 2 / (8 * c * c)))

    lo, hi = 1.0, 4.0
    for _ in range(100):
        mid = (lo + hi) / 2
        lo, hi = (mid, hi) if cdf(mid) < 0.95 else (lo, mid)
    exact = (lo + hi) / 2
    assert exact == pytest.approx(2.2414, abs=1e-4)
    # discretisation on 1e4 steps biases the sup slightly downward
    assert 0 < exact - default_table().lookup(0.0, 0.05).value < 0.01


def test_small_calibration_monotone_and_warns():
    with pytest.warns(UserWarning, match="imprecise"):
        entries = calibrate_sup_functionals([0.0, 0.25], [0.05, 0.5, 0.999], n_paths=2000,
                                            n_steps=200, seed=3)
    assert entries[0].warning is not None
    v = {(e.weight, e.alpha): e.value for e in entries}
    assert v[(0.0, 0.05)] > v[(0.0, 0.5)] > v[(0.0, 0.999)]
    assert v[(0.0, 0.999)] < 0.5
    assert v[(0.25, 0.05)] > v[(0.0, 0.05)]


def test_simulation_deterministic():
    a = simulate_sup_functionals([0.0], 100, 50, seed=9)
    b = simulate_sup_functionals([0.0], 100, 50, seed=9, chunk_paths=7)
    np.testing.assert_array_equal(a, b)
    with pytest.raises(ArgumentError):
        simulate_sup_functionals([1.0], 10, 10, 1)


def test_cache_hit_and_roundtrip(tmp_path):
    t = CriticalValueTable()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        first = t.calibrate([0.0, 0.3], [0.05, 0.1], n_paths=500, n_steps=100, seed=1)
    n = len(t)
    again = t.calibrate([0.0], [0.05], n_paths=500, n_steps=100, seed=1)
    assert len(t) == n and again[0] is first[0]
    path = tmp_path / "cv.json"
    t.save(path)
    back = CriticalValueTable.load(path)
    assert [e.value for e in back] == [e.value for e in t]
    assert json.loads(path.read_text())["schema"] == 1
    with pytest.raises(KeyError):
        back.lookup(0.45, 0.05)


def test_calibrate_rejects_bad_alpha():
    with pytest.raises(ArgumentError):
        calibrate_sup_functional(0.0, 1.5, n_paths=10, n_steps=10)
