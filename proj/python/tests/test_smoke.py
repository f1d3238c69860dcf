import math

import numpy as np
import pytest

import cavboost


def test_reference_preset():
    cfg = cavboost.preset("paper-fig1")
    assert cfg.model.Omega == pytest.approx((1 + math.sqrt(5)) / 2)
    assert cfg.model.n_max == 64
    assert cfg.initial.kind == "fock"
    assert len(cfg.sample_times()) == 129


def test_config_round_trip_and_errors():
    cfg = cavboost.parse_config("[model]\nb_0 = 0.75\n")
    again = cavboost.parse_config(cfg.to_ini())
    assert again.model.b_0 == 0.75
    with pytest.raises(cavboost.ConfigError):
        cavboost.parse_config("[model]\nnot_a_key = 1\n")


def test_effective_field_and_chern():
    p = cavboost.ModelParams.reference()
    bx, by, bz = cavboost.b_eff(1.5 * math.pi, 0.0, 10.0, p)
    assert bx == pytest.approx(12 - 1.5 * math.sqrt(10))
    assert abs(by) < 1e-12 and abs(bz) < 1e-12
    assert abs(cavboost.chern_number(p, 10.0)["chern"]) == 1
    assert cavboost.chern_number(p, 100.0)["chern"] == 0
    with pytest.raises(cavboost.PhysicsGuardError):
        cavboost.berry_curvature(1.5 * math.pi, 0.0, 64.0, p)


def test_almost_period_prediction():
    pred = cavboost.predict_almost_periods(cavboost.preset())
    assert [a.h for a in pred["periods"]] == [1, 2, 3, 5, 7, 12]
    assert pred["ratio"] == pytest.approx(1.71895, abs=1e-4)
    cf = cavboost.continued_fraction(7 / 3)
    assert cf.exact and cf.coeffs == [2, 3]


def test_simulate_short_run():
    cfg = cavboost.preset()
    cfg.model.n_max = 32
    cfg.certify = False
    out = cavboost.simulate(cfg, times=[0.0, 0.5, 1.0])
    assert out["pn"].shape == (3, 33)
    assert np.allclose(out["pn"].sum(axis=1), 1.0, atol=1e-9)
    assert out["mean_n"][0] == pytest.approx(10.0)
    assert out["PR"][0] == pytest.approx(1.0)


def test_run_experiment(tmp_path):
    report = cavboost.run_experiment("fig3-semiclassical-ensembles", cavboost.preset(), tmp_path)
    assert report["summary"]["periodic_variance_slope"] > 0
    assert all((tmp_path / f).exists() or f.startswith(str(tmp_path)) for f in report["files"])
    with pytest.raises(cavboost.ConfigError):
        cavboost.run_experiment("no-such-figure", cavboost.preset(), tmp_path)
