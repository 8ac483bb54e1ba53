import math

import numpy as np
import pytest

import cqipred as cq


def test_special_functions():
    assert cq.bessel_j0(0.0) == 1.0
    assert cq.bessel_j0(1.0) == pytest.approx(0.7651976865579666, rel=1e-14)
    assert cq.elliptic_k(0.0) == pytest.approx(math.pi / 2)
    assert cq.exp_weighted_mean(lambda t: t, 0.02) == pytest.approx(0.02, rel=1e-10)
    with pytest.raises(ValueError):
        cq.elliptic_k(1.0)


def test_trace_round_trip():
    d = cq.DopplerSpec.from_kmh(3.0, 2e9)
    assert d.doppler == pytest.approx(5.5556, rel=1e-5)
    s = cq.make_schedule("fixed", 0.01, 1000, 3)
    assert len(s) == 1000
    assert np.allclose(np.diff(s.instants), 0.01)
    t = cq.generate_trace(s, d, 3)
    assert t.gains.dtype == np.complex128
    assert t.rhos.shape == (999,)
    assert t.rhos[0] == pytest.approx(cq.rho_fixed(d, 0.01))
    p = cq.power_trace(t, 2.0)
    assert np.allclose(p.powers, 2.0 * np.abs(t.gains) ** 2)
    with pytest.raises(ValueError):
        cq.make_schedule("sometimes", 0.01, 10, 1)


def test_predictor():
    assert list(cq.iir_predict([2.0, 4.0, 6.0], 0.5, 2.0)) == [2.0, 2.0, 3.0]
    assert list(cq.impulse_response_predict(np.array([2.0, 4.0, 6.0]), 0.5, 10)) == pytest.approx([0.0, 1.0, 2.5])
    assert cq.empirical_mse([1.0, 2.0], [1.0, 4.0], 0) == 2.0
    assert cq.bias_factor_closed_form(0.5, 0.0) == pytest.approx(1.0 / 3.0)
    with pytest.raises(ValueError):
        cq.iir_predict([1.0], 2.5, 0.0)


def test_theory():
    d = cq.DopplerSpec.from_kmh(3.0, 2e9)
    rho = cq.rho_fixed(d, 0.01)
    assert cq.alpha_opt_fixed(rho) == pytest.approx(0.96834, abs=1e-4)
    assert cq.alpha_opt_numeric(lambda a: cq.mse_fixed(a, rho, 1.0)) == pytest.approx(cq.alpha_opt_fixed(rho), abs=1e-4)
    r2 = cq.mean_rho_sq(d, 0.04)
    assert cq.mse_random(0.5, d, 0.04, 1.0) == pytest.approx(cq.mse_fixed(0.5, math.sqrt(r2), 1.0))
    assert cq.power_correlation(1.0, 2.0) == 8.0


def test_linkadapt():
    t = cq.McsTable([1.0, 2.0, 4.0, 8.0], [1.0, 2.0, 3.0, 4.0])
    assert cq.select_mcs(2.0, t) == 1
    assert cq.fixed_rate_index(3.1623, t) == 1
    assert cq.fixed_rate_index(3.1623, t, "paper") == 2
    o = cq.evaluate_block(4.0, 2, t)
    assert not o.success and o.realized_rate == 0.0
    assert len(cq.McsTable.lte_default()) == 15


def test_harness():
    c = cq.ExperimentConfig("throughput")
    c.update('{"blocks": 10000, "seeds": [1, 2], "delays_ms": [10]}')
    rows = cq.run_throughput(c)
    assert {r["strategy"] for r in rows} == {"perfect_prediction", "iir_optimal_alpha", "previous_sample", "fixed_rate"}
    assert all(r["throughput_mean"] > 0 for r in rows)

    m = cq.ExperimentConfig("mse_curves")
    m.blocks = 10000
    m.seeds = [1]
    m.alphas = [0.5]
    m.delays = [0.01]
    out = cq.run_mse_curves(m)
    assert len(out) == 2
    assert set(out[0]) == {"regime", "delay_s", "alpha", "mse_analytic", "mse_empirical", "variance_floor"}

    a = cq.ExperimentConfig("alpha_opt")
    assert len(cq.run_alpha_opt_sweep(a)) == 2 * 3 * 91

    with pytest.raises(cq.ConfigError):
        c.update('{"nonsense": 1}')
