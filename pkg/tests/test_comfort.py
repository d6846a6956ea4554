from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, strategies as st

from planvent.comfort import (
    ComfortBand, OccupancyModel, PenaltyWeights, comfort_band, discomfort, occupancy_factor,
    sensible_heat, thermal_penalty,
)

from oracles import penalty_series


def test_penalty_matches_hand_sum():
    series, band, expected = penalty_series()
    report = thermal_penalty(series, band)
    assert abs(report.total - expected["total"]) <= 1e-9
    np.testing.assert_allclose(report.per_day, expected["per_day"], atol=1e-9)
    for zid, v in expected["per_space"].items():
        assert report.per_space[zid] == pytest.approx(v, abs=1e-9)


def test_penalty_scales_with_weights():
    series, band, expected = penalty_series()
    report = thermal_penalty(series, band, weights=PenaltyWeights().scaled(2.5))
    # degree weights and occupancy factors both scale
    assert report.total == pytest.approx(2.5 ** 2 * expected["total"])


def test_penalty_only_cold_or_hot():
    series, band, _ = penalty_series()
    cold = thermal_penalty(series, band, weights=PenaltyWeights(w2=0.0)).total
    hot = thermal_penalty(series, band, weights=PenaltyWeights(w1=0.0)).total
    # cold: 8 + 1.5 + 0.9 + 1 ; hot: 2 + 0.5 + 4 + 0.6 + 0.5
    assert cold == pytest.approx(11.4)
    assert hot == pytest.approx(7.6)


def test_penalty_rejects_mismatched_days():
    series, _, _ = penalty_series()
    with pytest.raises(ValueError):
        thermal_penalty(series, ComfortBand(np.array([20.0]), np.array([26.0])))


def test_penalty_unknown_function():
    series = SimpleNamespace(zone_ids=("X",), zone_functions=("Garage",), air_temp=np.full((1, 24), 22.0))
    with pytest.raises(KeyError, match="X"):
        thermal_penalty(series, ComfortBand(np.array([20.0]), np.array([26.0])))


def test_comfort_band_formula():
    band = comfort_band([5.0, 20.0, 35.0])
    np.testing.assert_allclose(band.lower, [0.33 * 10 + 15.8, 0.33 * 20 + 15.8, 0.33 * 30 + 15.8])
    np.testing.assert_allclose(band.upper - band.lower, 6.0)
    assert comfort_band([20.0], "I").upper[0] - comfort_band([20.0], "I").lower[0] == pytest.approx(4.0)


def test_comfort_band_unclamped():
    assert comfort_band([0.0], clamp=False).lower[0] == pytest.approx(15.8)


def test_band_requires_order():
    with pytest.raises(ValueError):
        ComfortBand(np.array([22.0]), np.array([21.0]))


@given(st.floats(-20, 50), st.floats(-20, 30), st.floats(0.1, 10))
def test_discomfort_nonnegative_and_zero_inside(t, lo, width):
    hi = lo + width
    d = discomfort(t, lo, hi)
    assert d >= 0
    if lo <= t <= hi:
        assert d == 0


@given(st.floats(-10, 40), st.floats(-10, 40))
def test_discomfort_monotone_outside_band(a, b):
    lo, hi = 20.0, 26.0
    if a > b >= hi or a < b <= lo:
        assert discomfort(a, lo, hi) >= discomfort(b, lo, hi)


def test_occupancy_factor():
    assert occupancy_factor("Bedroom", 3) == 1.0
    assert occupancy_factor("LivingRoom", 3) == 0.3
    assert occupancy_factor("LivingRoom", 13) == 1.0
    with pytest.raises(ValueError):
        occupancy_factor("Bedroom", 0)


def test_occupancy_schedule_repeats_daily():
    occ = OccupancyModel().occupied(["Kitchen", "Bedroom"])
    assert occ.shape == (8760, 2)
    assert np.array_equal(occ[:24], occ[24:48])
    assert occ[:, 1].all()


def test_internal_gains_use_instance_counts():
    m = OccupancyModel()
    g = m.internal_gains(["Bedroom", "Bedroom", "Bedroom"], [10.0, 10.0, 10.0], hours=24)
    # 2, 2 and 1 occupants at night, lights off
    assert g[2, 0] == pytest.approx(g[2, 1])
    assert g[2, 2] == pytest.approx(g[2, 0] / 2)


def test_sensible_heat_bounds():
    assert 0 < sensible_heat(120.0) < 120.0
    assert sensible_heat(0.0) == 0.0
    assert sensible_heat(120.0, 30.0) < sensible_heat(120.0, 20.0)


def test_report_exports_carry_seed():
    series, band, _ = penalty_series()
    report = thermal_penalty(series, band)
    assert report.to_csv(seed=5).startswith("# seed: 5\n")
    assert '"seed": 5' in report.to_json(seed=5)
