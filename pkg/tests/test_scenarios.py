import csv
import io
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from planvent.scenarios import (
    REFERENCE, SCENARIO_A, SCENARIO_B, ScenarioResult, VentilationScenario, builtin_scenarios,
    format_improvement, improvement_pct, month_slices, opening_modulation, run_experiment,
    scenario_by_name, seasonal_benefit_share,
)
from planvent.thermal import SEALED
from planvent.weather import DAYS

from oracles import TABLE_ROWS


def _table_result():
    names = tuple(f"D{d}" for d, *_ in TABLE_ROWS)
    pen = np.array([[ref, *vals] for _, vals, ref, _ in TABLE_ROWS])
    daily = np.repeat(pen[:, :, None] / DAYS, DAYS, axis=2)
    return ScenarioResult(names, (REFERENCE, "A", "B", "C", "D"), pen, daily, seed=11)


def test_improvement_format():
    assert format_improvement(21216.0, 19656.0) == "7.4%"
    assert improvement_pct(100.0, 90.0) == pytest.approx(10.0)
    with pytest.raises(ValueError):
        improvement_pct(0.0, 1.0)


@pytest.mark.parametrize("row", TABLE_ROWS, ids=lambda r: str(r[0]))
def test_table_rows(row):
    _, vals, ref, imp = row
    assert abs(float(format_improvement(ref, min(vals)).rstrip("%")) - imp) <= 0.05


def test_table_flags_and_best_average():
    res = _table_result()
    assert res.check_flags()
    assert res.best_scenario("D120") == "C"
    assert res.best_design("A") == "D120"
    assert res.best_average() == "C"
    text = res.to_text()
    assert "[19656.0]*" in text and "seed: 11" in text


def test_csv_and_json_exports():
    res = _table_result()
    lines = res.to_csv().splitlines()
    assert lines[0] == "# seed: 11"
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))
    assert rows[0]["imp_pct"] == "7.4" and rows[-1]["design"] == "Avg"
    doc = json.loads(res.to_json())
    assert doc["seed"] == 11 and doc["designs"][0]["improvement"] == "7.4%"


def test_daily_csv():
    res = _table_result()
    text = res.daily_csv("D120", ["C"])
    assert text.splitlines()[1] == "day,scenario,signed_diff,normalized_diff"
    assert len(text.splitlines()) == 2 + DAYS


def test_result_validation():
    with pytest.raises(ValueError, match="reference"):
        ScenarioResult(("x",), ("A", REFERENCE), np.zeros((1, 2)), np.zeros((1, 2, DAYS)))
    with pytest.raises(ValueError):
        ScenarioResult(("x",), (REFERENCE,), np.array([[np.nan]]), np.zeros((1, 1, DAYS)))


def test_seasonal_share():
    diff = np.zeros(DAYS)
    sl = month_slices()
    diff[sl[6]] = -3.0       # July
    diff[sl[0]] = -1.0       # January
    assert seasonal_benefit_share(diff) == pytest.approx(3 * 31 / (4 * 31))
    assert seasonal_benefit_share(np.zeros(DAYS)) is None
    assert sum(s.stop - s.start for s in month_slices()) == DAYS


@given(st.lists(st.floats(-10, 10), min_size=DAYS, max_size=DAYS))
def test_seasonal_share_is_a_fraction(diff):
    share = seasonal_benefit_share(diff)
    assert share is None or 0.0 <= share <= 1.0


def test_scenario_definitions():
    assert [s.name for s in builtin_scenarios()] == [REFERENCE, "A", "B", "C", "D"]
    assert scenario_by_name("B") is SCENARIO_B
    with pytest.raises(KeyError):
        scenario_by_name("Z")
    with pytest.raises(ValueError):
        VentilationScenario("E", 4.0, 2.0)
    with pytest.raises(ValueError):
        VentilationScenario(REFERENCE, 0.0, 1.0)


def test_opening_modulation():
    assert opening_modulation(SEALED, True, 30.0, 10.0) == 0.0
    assert opening_modulation(SCENARIO_A, True, 25.0, 22.0) == pytest.approx(0.5)
    assert opening_modulation(SCENARIO_A, False, 25.0, 22.0) == 0.0


def test_experiment_on_one_plan(plan_a, context):
    res = run_experiment([plan_a], context, [SCENARIO_A], labels=["P"], seed=4)
    assert res.scenarios == (REFERENCE, "A")
    assert res.daily.shape == (1, 2, DAYS)
    np.testing.assert_allclose(res.daily.sum(axis=2), res.penalties, rtol=1e-9)
    assert res.penalty("P", "A") <= res.penalty("P", REFERENCE)
    with pytest.raises(ValueError):
        run_experiment([plan_a], context, [SCENARIO_A], labels=["P", "Q"])
