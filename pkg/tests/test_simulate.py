import numpy as np
import pytest

from mfmonitor.detector.config import PartialSum, WorstCase
from mfmonitor.errors import ConfigError
from mfmonitor.simulate import Cell, DgpSpec, _ar1, generate, run_table


def test_pure_noise_column_correlation():
    x = generate(DgpSpec(p1=10, p2=8, T=2000, k1=0, k2=0, phi=0.0, psi_ar=0.0, seed=1))
    rho = 1 / 8
    se = (1 - rho ** 2) / np.sqrt(2000)
    for i in range(3):
        corr = np.corrcoef(x.data[:, i, :], rowvar=False)
        off = corr[~np.eye(8, dtype=bool)]
        assert np.all(np.abs(off - rho) < 3 * se + 0.01)
        assert abs(off.mean() - rho) < 3 * se / np.sqrt(28) + 0.005


def test_common_component_rank():
    x = generate(DgpSpec(p1=12, p2=10, T=300, seed=2))
    rng = np.random.default_rng(2)
    R = rng.uniform(-np.sqrt(3), np.sqrt(3), (12, 3))
    C = rng.uniform(-np.sqrt(3), np.sqrt(3), (10, 3))
    loading = np.kron(C, R)  # vec(R F C') = (C kron R) vec(F)
    assert np.linalg.matrix_rank(loading) == 9
    vecs = x.data.transpose(0, 2, 1).reshape(300, -1)
    lam = np.linalg.eigvalsh(np.cov(vecs, rowvar=False))[::-1]
    assert lam[8] / lam[9] > 3


def test_ar1_unit_variance():
    rng = np.random.default_rng(3)
    f = _ar1(rng.standard_normal((200_000, 2)), 0.1)
    assert f.var(axis=0) == pytest.approx([1.0, 1.0], abs=0.01)
    lag1 = np.mean(f[1:, 0] * f[:-1, 0])
    assert lag1 == pytest.approx(0.1, abs=0.01)


def test_generate_deterministic_and_scenarios_share_prefix():
    a = generate(DgpSpec(p1=8, p2=6, T=40, scenario="loading_switch", seed=5))
    b = generate(DgpSpec(p1=8, p2=6, T=40, scenario="loading_switch", seed=5))
    np.testing.assert_array_equal(a.data, b.data)
    null = generate(DgpSpec(p1=8, p2=6, T=40, seed=5))
    np.testing.assert_array_equal(a.data[:20], null.data[:20])
    assert not np.allclose(a.data[20:], null.data[20:])
    for sc in ("factor_emerge", "c_switch", "both_switch"):
        s = generate(DgpSpec(p1=8, p2=6, T=40, scenario=sc, seed=5))
        np.testing.assert_array_equal(s.data[:20], null.data[:20])
    van = generate(DgpSpec(p1=8, p2=6, T=40, scenario="factor_vanish", seed=5))
    np.testing.assert_array_equal(van.data[20:], null.data[20:])


def test_spec_validation():
    with pytest.raises(ConfigError):
        DgpSpec(p1=5, p2=5, phi=1.0)
    with pytest.raises(ConfigError):
        DgpSpec(p1=5, p2=5, scenario="loading_switch", t_star=200)
    with pytest.raises(ConfigError):
        DgpSpec(p1=5, p2=5, scenario="nope")
    spec = DgpSpec(p1=5, p2=5, scenario="factor_vanish")
    assert spec.monitored_k1 == 4 and spec.direction == "vanish" and spec.break_time == 100


FAMS = (PartialSum(0.0), WorstCase())


def test_run_table_independent_of_jobs():
    kw = dict(families=FAMS, n_reps=6, scenario="loading_switch", T=80, master_seed=3)
    a = run_table([(20, 15, 10)], n_jobs=1, **kw)
    b = run_table([(20, 15, 10)], n_jobs=2, **kw)
    assert a.to_dict() == b.to_dict()
    cell = Cell(20, 15, 10)
    for r in a.replications[(cell, "worst_case", 0.05)]:
        assert (r.delay is not None) == r.rejected
        if r.rejected:
            assert r.delay == r.tau_hat - (40 - 20)


def test_run_table_null_has_no_delays():
    res = run_table([(20, 15, 10)], families=FAMS, n_reps=5, T=60, master_seed=1)
    assert res.measures_size
    cell = Cell(20, 15, 10)
    assert all(r.delay is None for r in res.replications[(cell, "worst_case", 0.1)])
    text = res.to_text()
    assert text.splitlines()[0].startswith("# scenario=null")
    assert len(text.splitlines()) == 3


def test_c_switch_size_matches_null():
    kw = dict(families=FAMS, n_reps=200, T=100, master_seed=11)
    null = run_table([(30, 30, 15)], scenario="null", **kw)
    cs = run_table([(30, 30, 15)], scenario="c_switch", **kw)
    cell = Cell(30, 30, 15)
    for f in ("partial_sum(eta=0)", "worst_case"):
        for a in (0.05, 0.1):
            assert abs(null.size(cell, f, a) - cs.size(cell, f, a)) <= 3.0
