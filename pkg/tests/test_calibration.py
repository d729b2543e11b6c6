import math
from dataclasses import replace

import numpy as np
import pytest

from patina.calibration import (
    ThicknessMeasurement,
    calibrate,
    load_measurements,
    predict_total_thickness,
    reduced_model_initial_guess,
    residual,
    _reflect_into,
)
from patina.pde_core import Diffusivities

from hypothesis import given, strategies as st


@pytest.fixture(scope="module")
def cheap_cfg(default_cfg):
    # coarse grids and a short horizon keep optimizer tests fast
    return replace(default_cfg, n_z=40, n_y=40, horizon_hours=8.0,
                   output_stride=5)


@pytest.fixture(scope="module")
def table_measurements():
    return load_measurements("data/thickness_measures.csv")


def test_load_shipped_measurements(table_measurements):
    assert len(table_measurements) == 3
    m8 = table_measurements[0]
    assert (m8.time_hours, m8.mean_cm, m8.std_cm) == (8.0, 5.4418e-4, 1.7331e-4)
    assert table_measurements[-1].mean_cm == 13.2522e-4


def test_load_rejects_bad_files(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(ValueError, match="empty"):
        load_measurements(empty)
    bad = tmp_path / "bad.csv"
    bad.write_text("hours,thickness,std\n8,1e-4,1e-5\n")
    with pytest.raises(ValueError, match="bad header"):
        load_measurements(bad)
    neg = tmp_path / "neg.csv"
    neg.write_text("time_hours,thickness_cm,std_cm\n-8,1e-4,1e-5\n")
    with pytest.raises(ValueError, match="line 2"):
        load_measurements(neg)


def test_measurement_validation():
    with pytest.raises(ValueError):
        ThicknessMeasurement(8.0, -1e-4, 1e-5)
    with pytest.raises(ValueError):
        ThicknessMeasurement(8.0, 1e-4, -1e-5)


class TestResidual:
    def test_zero_when_predictions_match(self, cheap_cfg):
        d = cheap_cfg.diffusivities
        pred = predict_total_thickness(d, cheap_cfg, [4.0, 8.0])
        meas = [ThicknessMeasurement(4.0, float(pred[0]), 1e-5),
                ThicknessMeasurement(8.0, float(pred[1]), 1e-5)]
        assert residual(d, meas, cheap_cfg) == pytest.approx(0.0, abs=1e-12)

    def test_one_std_off_gives_one(self, cheap_cfg):
        d = cheap_cfg.diffusivities
        pred = float(predict_total_thickness(d, cheap_cfg, [8.0])[0])
        std = 2e-5
        meas = [ThicknessMeasurement(8.0, pred - std, std)]
        assert residual(d, meas, cheap_cfg) == pytest.approx(1.0, rel=1e-9)

    def test_reorder_invariance(self, cheap_cfg, table_measurements):
        d = cheap_cfg.diffusivities
        cfg = replace(cheap_cfg, horizon_hours=40.0)
        r1 = residual(d, table_measurements, cfg)
        r2 = residual(d, tuple(reversed(table_measurements)), cfg)
        assert r1 == pytest.approx(r2, rel=1e-12)

    def test_zero_std_falls_back_to_mean_weight(self, cheap_cfg):
        d = cheap_cfg.diffusivities
        pred = float(predict_total_thickness(d, cheap_cfg, [8.0])[0])
        meas = [ThicknessMeasurement(8.0, pred / 2.0, 0.0)]
        # (pred - mean)/mean = 1 when pred = 2*mean
        assert residual(d, meas, cheap_cfg) == pytest.approx(1.0, rel=1e-9)

    def test_failure_becomes_infinite(self, cheap_cfg):
        cfg = replace(cheap_cfg, max_steps=3)
        meas = [ThicknessMeasurement(8.0, 1e-4, 1e-5)]
        assert math.isinf(residual(cfg.diffusivities, meas, cfg))

    def test_raw_weighting_flag(self, cheap_cfg):
        d = cheap_cfg.diffusivities
        pred = float(predict_total_thickness(d, cheap_cfg, [8.0])[0])
        meas = [ThicknessMeasurement(8.0, pred - 1e-5, 42.0)]
        assert residual(d, meas, cheap_cfg, weighting="raw") == \
            pytest.approx(1e-10, rel=1e-6)


@given(x=st.floats(min_value=-50, max_value=50))
def test_reflection_stays_inside_bounds(x):
    lo, hi = -8.0, -3.0
    v = float(_reflect_into(np.array([x]), lo, hi)[0])
    assert lo - 1e-12 <= v <= hi + 1e-12


def test_reflection_fixes_interior_points():
    assert float(_reflect_into(np.array([-5.0]), -8.0, -3.0)[0]) == -5.0
    # one reflection at the upper wall
    assert float(_reflect_into(np.array([-2.0]), -8.0, -3.0)[0]) == -4.0


def test_reduced_model_guess_is_reasonable(default_cfg, table_measurements):
    guess = reduced_model_initial_guess(table_measurements, default_cfg)
    assert 1e-11 < guess.d_g < 1e-7
    assert 1e-7 < guess.d_s < 1e-4
    assert guess.d_w == guess.d_s
    r = residual(guess, table_measurements, default_cfg)
    assert r < 3.0


class TestCalibrate:
    def test_truth_start_converges_immediately(self, cheap_cfg):
        truth = Diffusivities(d_g=1e-9, d_s=5e-6, d_o=1e-5, d_w=5e-6)
        pred = predict_total_thickness(truth, cheap_cfg, [4.0, 8.0])
        meas = [ThicknessMeasurement(4.0, float(pred[0]), 0.0),
                ThicknessMeasurement(8.0, float(pred[1]), 0.0)]
        res = calibrate(truth, (1e-10, 1e-3), meas, cheap_cfg, budget=60)
        assert res.residual < 1e-4 * len(meas)
        assert res.evaluations <= 60

    def test_budget_exhaustion_flagged(self, cheap_cfg):
        meas = [ThicknessMeasurement(8.0, 9e-4, 1e-4)]
        res = calibrate(cheap_cfg.diffusivities, (1e-10, 1e-3), meas,
                        cheap_cfg, budget=6)
        assert not res.converged
        assert res.evaluations >= 6
        assert len(res.predicted_cm) == 1

    def test_result_within_bounds(self, cheap_cfg):
        meas = [ThicknessMeasurement(8.0, 9e-4, 1e-4)]
        res = calibrate(cheap_cfg.diffusivities, (1e-10, 1e-3), meas,
                        cheap_cfg, budget=25)
        for v in (res.diffusivities.d_g, res.diffusivities.d_s,
                  res.diffusivities.d_o, res.diffusivities.d_w):
            assert 1e-10 <= v <= 1e-3

    def test_tie_mode_links_dw_to_ds(self, cheap_cfg):
        meas = [ThicknessMeasurement(8.0, 9e-4, 1e-4)]
        res = calibrate(cheap_cfg.diffusivities, (1e-10, 1e-3), meas,
                        cheap_cfg, tie_dw_ds=True, budget=20)
        assert res.diffusivities.d_w == res.diffusivities.d_s

    def test_rejects_bad_inputs(self, cheap_cfg):
        meas = [ThicknessMeasurement(8.0, 9e-4, 1e-4)]
        with pytest.raises(ValueError, match="bounds"):
            calibrate(cheap_cfg.diffusivities, (1e-3, 1e-10), meas, cheap_cfg)
        with pytest.raises(ValueError, match="outside bounds"):
            calibrate(Diffusivities(1e-20, 1e-6, 1e-6, 1e-6), (1e-10, 1e-3),
                      meas, cheap_cfg)
        with pytest.raises(ValueError, match="non-empty"):
            calibrate(cheap_cfg.diffusivities, (1e-10, 1e-3), [], cheap_cfg)
