import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import planvent.thermal.simulate as sim
from planvent.thermal import (
    OUTDOOR, SEALED, AirLink, ElementKind, LinkKind, ThermalModel, ThermalModelError, Zone,
    build_thermal_model, equilibrium_temperatures, reference_constructions, simulate_year,
    step_zone_temperatures, u_value, ventilation_flow,
)
from planvent.thermal import _kernel_py
from planvent.thermal.model import Surface
from planvent.thermal.constructions import FILMS_WALL
from planvent.comfort import OccupancyModel
from planvent.weather import HOURS, Location, WeatherYear

RHO_CP = 1.2 * 1005.0


def _zone(name, ua_wall=0.0, adjacent=None, wall_area=10.0, mass=True):
    surfaces = []
    if ua_wall:
        u = ua_wall / wall_area
        surfaces.append(Surface(ElementKind.EXTERIOR_WALL, wall_area, u, 180.0,
                                inner_capacity=2e5 if mass else 0.0,
                                inner_resistance=0.2 if mass else 0.0))
    if adjacent:
        surfaces.append(Surface(ElementKind.INTERIOR_WALL, 8.0, 2.0, adjacent=adjacent,
                                inner_capacity=8e4, inner_resistance=0.19))
    volume = 30.0
    return Zone(name, "Bedroom", 12.0, volume, 15 * RHO_CP * volume, tuple(surfaces))


def _two_zone(outdoor=True, door_area=1.6):
    ua = 20.0 if outdoor else 0.0
    zones = (_zone("Z1", ua, "Z2"), _zone("Z2", ua, "Z1"))
    links = [AirLink(LinkKind.DOOR, ("Z1", "Z2"), door_area, 2.0, opening="D1")]
    if outdoor:
        links.append(AirLink(LinkKind.CRACK, ("Z1", OUTDOOR), flow=0.002))
        links.append(AirLink(LinkKind.WINDOW, ("Z1", OUTDOOR), 1.2, 1.1, opening="W1"))
    return ThermalModel(zones, tuple(links), ())


def _flat_weather(t=18.0):
    z = np.zeros(HOURS)
    return WeatherYear(Location(41.2, -8.7), np.full(HOURS, t), z, z, z)


# -- constructions -----------------------------------------------------------------

def test_exterior_wall_u_value():
    wall = reference_constructions().exterior_wall
    assert abs(u_value(wall.layers, wall.films) - 0.43) <= 0.05
    assert abs(wall.u - 0.43) <= 0.05


def test_u_value_of_single_layer():
    from planvent.thermal import ConstructionLayer

    layer = ConstructionLayer("board", 0.1, 0.05)
    assert u_value([layer], (0.13, 0.04)) == pytest.approx(1.0 / (0.13 + 2.0 + 0.04))
    with pytest.raises(ValueError):
        u_value([])


def test_series_mass_path_keeps_u():
    for kind in ("exterior_wall", "roof", "ground_floor"):
        c = getattr(reference_constructions(), kind)
        cap, r_in = c.inner_mass()
        s = Surface(c.kind, 1.0, c.u, inner_capacity=cap, inner_resistance=r_in)
        assert 1.0 / (1.0 / s.u_outer + r_in) == pytest.approx(c.u)


def test_inner_resistance_beyond_u_is_rejected():
    s = Surface(ElementKind.EXTERIOR_WALL, 1.0, 2.0, inner_capacity=1e5, inner_resistance=0.6)
    with pytest.raises(ThermalModelError):
        s.u_outer


def test_interior_wall_shared_between_sides():
    net = _two_zone(outdoor=False).network()
    assert net.conductance[0, 1] == pytest.approx(16.0)
    assert np.allclose(net.conductance, net.conductance.T)


# -- physics suite -----------------------------------------------------------------

def test_isothermal_fixed_point_steps():
    net = _two_zone().network()
    t = np.full(4, 18.0)
    for _ in range(48):
        t = step_zone_temperatures(net, t, 18.0, np.zeros(4), window_modulation=[1.0],
                                   door_modulation=[1.0])
    assert np.abs(t - 18.0).max() <= 0.01


def test_isothermal_fixed_point_annual(plan_a):
    model = build_thermal_model(plan_a)
    weather = _flat_weather(18.0)
    series = simulate_year(model, weather, OccupancyModel(), SEALED,
                           gains=np.zeros((HOURS, model.nodes)), t_init=18.0, warmup=0)
    assert np.abs(series.air_temp - 18.0).max() <= 0.01
    assert np.abs(series.mass_temp - 18.0).max() <= 0.01


def _march(backend, net, t_out, gains, vent=False, warmup=0, t_init=20.0, substeps=6):
    n = net.capacitance.size
    hours = t_out.size
    temp, ach, mod = np.zeros((hours, n)), np.zeros((hours, n)), np.zeros((hours, n))
    start = np.zeros(n)
    occ = np.ones((hours, n), dtype=np.uint8)
    backend.march(net.capacitance, net.volume, net.ua_outdoor, net.ua_ground, float(t_out.mean()),
                  net.crack_flow, np.ascontiguousarray(net.conductance),
                  net.window_zone, net.window_area, net.window_height,
                  net.door_a, net.door_b, net.door_area, net.door_height,
                  np.ascontiguousarray(t_out), np.ascontiguousarray(gains), occ,
                  vent, 0.0, 6.0, 22.0, True, 0.1, warmup, t_init, 3600.0, substeps,
                  temp, ach, mod, start)
    return temp, ach, mod


def test_two_zone_energy_conservation():
    net = _two_zone(outdoor=False).network()
    hours = 48
    q = np.zeros((hours, 4))
    q[:, 0] = 500.0
    q[:, 3] = 120.0
    temp, _, _ = _march(sim.kernel, net, np.full(hours, 5.0), q)
    stored = float(net.capacitance @ (temp[-1] - 20.0))
    supplied = 620.0 * hours * 3600.0
    assert abs(stored - supplied) <= 1e-6 * supplied


def test_two_zone_energy_conservation_steps():
    net = _two_zone(outdoor=False).network()
    t = np.array([30.0, 15.0, 22.0, 18.0])
    e0 = float(net.capacitance @ t)
    for _ in range(10):
        t = step_zone_temperatures(net, t, 0.0, np.zeros(4), door_modulation=[1.0])
    assert abs(float(net.capacitance @ t) - e0) <= 1e-6 * e0
    assert np.ptp(t[:2]) < 15.0


def test_steady_state_balance():
    model = _two_zone(door_area=0.0)
    net = model.network()
    q = 800.0
    gains = np.array([q, 0.0, 0.0, 0.0])
    # decouple the zones to get a one-zone balance in zone 1
    net = sim.Network(**{**net.__dict__, "conductance": net.conductance * np.array(
        [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]])})
    t_out = 7.0
    ua = 20.0 + RHO_CP * 0.002
    teq = equilibrium_temperatures(net, np.full(4, 20.0), t_out, gains)
    assert teq[0] == pytest.approx(t_out + q / ua, abs=1e-6)
    # the air-to-mass path carries no heat at equilibrium once the wall is in series
    temp, _, _ = _march(sim.kernel, net, np.full(24 * 60, t_out), np.tile(gains, (24 * 60, 1)))
    assert temp[-1, 0] == pytest.approx(t_out + q / ua, abs=1e-6)


@settings(max_examples=40, deadline=None)
@given(st.floats(24.0, 35.0), st.floats(0.0, 20.0), st.floats(0.0, 0.9), st.floats(0.05, 0.1))
def test_ventilation_cools_monotonically(t_in, t_out, m, dm):
    net = _two_zone().network()
    temps = np.array([t_in, t_in, t_in, t_in])
    a = step_zone_temperatures(net, temps, t_out, np.zeros(4), window_modulation=[m])
    b = step_zone_temperatures(net, temps, t_out, np.zeros(4), window_modulation=[m + dm])
    assert b[0] <= a[0] + 1e-12
    flows = [ventilation_flow(AirLink(LinkKind.WINDOW, ("Z1", OUTDOOR), 1.2, 1.1), t_in, t_out, x)
             for x in (m, m + dm)]
    assert flows[1] >= flows[0]


def test_venting_scenario_lowers_summer_temperatures(context, plan_a):
    from planvent.scenarios import SCENARIO_A

    sealed = context.simulate(plan_a)
    vented = context.simulate(plan_a, SCENARIO_A)
    july = slice(181 * 24, 212 * 24)
    assert vented.air_temp[:, july].mean() < sealed.air_temp[:, july].mean()
    assert vented.modulation.max() <= 1.0 and sealed.modulation.max() == 0.0


def test_openings_only_when_colder_outside(context, plan_a):
    from planvent.scenarios import SCENARIO_B

    s = context.simulate(plan_a, SCENARIO_B)
    hot_outside = s.t_out[None, :] >= s.air_temp + 3.0
    assert not np.any((s.modulation > 0) & hot_outside)


# -- kernels -----------------------------------------------------------------------

def test_modulation_rule():
    assert _kernel_py.modulation(25, 22, 0, 6, 22, True, True) == pytest.approx(0.5)
    assert _kernel_py.modulation(21.9, 15, 1, 4, 22, True, True) == 0.0
    assert _kernel_py.modulation(30, 20, 2, 8, 22, False, True) == 0.0
    assert _kernel_py.modulation(30, 20, 2, 8, 22, False, False) == 1.0
    assert _kernel_py.modulation(23, 24, 0, 6, 22, True, True) == 0.0


@settings(max_examples=60)
@given(st.floats(22, 40), st.floats(-10, 40), st.floats(0, 5), st.floats(0.1, 6))
def test_modulation_bounded_and_monotone(t_in, t_out, d1, width):
    d2 = d1 + width
    m = _kernel_py.modulation(t_in, t_out, d1, d2, 22.0, True, True)
    assert 0.0 <= m <= 1.0
    assert _kernel_py.modulation(t_in, t_out - 0.5, d1, d2, 22.0, True, True) >= m


def test_propagator_matches_exact_step():
    net = _two_zone(outdoor=False).network()
    K = np.diag(net.conductance.sum(axis=1)) - net.conductance + np.diag([3.0, 0, 1.0, 0])
    b = np.array([100.0, 0.0, 5.0, 0.0])
    E, P = _kernel_py.propagator(K, net.capacitance, 600.0)
    t0 = np.array([20.0, 18.0, 19.0, 21.0])
    np.testing.assert_allclose(E @ t0 + P @ b, _kernel_py.advance(K, b, net.capacitance, t0, 600.0),
                               atol=1e-9)


@pytest.mark.skipif(sim.kernel is _kernel_py, reason="compiled kernel not built")
@pytest.mark.parametrize("vent", [False, True])
def test_compiled_kernel_matches_fallback(plan_a, context, vent):
    model = build_thermal_model(plan_a)
    net = model.network()
    hours = 24 * 7
    start = 24 * 190
    t_out = np.asarray(context.weather.dry_bulb[start:start + hours])
    gains = np.zeros((hours, model.nodes))
    gains[:, :len(model.zones)] = 150.0
    a = _march(sim.kernel, net, t_out, gains, vent, t_init=26.0)
    b = _march(_kernel_py, net, t_out, gains, vent, t_init=26.0)
    for x, y in zip(a, b):
        np.testing.assert_allclose(x, y, atol=1e-9)


def test_backend_selected(monkeypatch):
    assert sim.BACKEND in ("cython", "python")


def test_model_of_plan(plan_a):
    model = build_thermal_model(plan_a)
    assert model.nodes == 2 * len(plan_a.spaces)
    net = model.network()
    assert net.window_zone.size == len(plan_a.windows)
    assert np.all(net.capacitance > 0)
    n = len(model.zones)
    assert np.all(np.isinf(net.volume[n:]))
