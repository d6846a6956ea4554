"""Annual free-running simulation of a :class:`ThermalModel`."""
from __future__ import annotations

import io
import logging
import os
from dataclasses import dataclass

import numpy as np

from planvent.thermal import _kernel_py
from planvent.thermal.model import AirLink, LinkKind, Network, ThermalModel
from planvent.weather import HOURS, WeatherYear, annual_sun, shading_fraction, wall_irradiance

log = logging.getLogger(__name__)

DT = 3600.0
WARMUP_HOURS = 168
#: control/integration steps per hour; openings are re-decided at each
SUBSTEPS = 6
#: substeps of a ventilated run: the opening rule is re-decided once a minute, so the
#: air cannot overshoot the indoor gate by more than a fraction of a kelvin
CONTROL_SUBSTEPS = 60
INITIAL_TEMPERATURE = 20.0
#: interior doors are never fully shut: this is their modulation when no one opens them
DOOR_BASE_MODULATION = 0.1
#: mean outdoor air to sky temperature difference (K) and the radiative film per unit emissivity
SKY_DEPRESSION = 11.0
RADIATIVE_FILM = 5.0


def _load_backend():
    if os.environ.get("PLANVENT_PURE_PYTHON"):
        return _kernel_py
    try:
        from planvent.thermal import _kernel
    except ImportError:  # extension not built
        log.debug("compiled kernel unavailable, using the numpy fallback")
        return _kernel_py
    return _kernel


kernel = _load_backend()
BACKEND = kernel.BACKEND


class SimulationError(RuntimeError):
    """The simulation produced non-physical output."""


class Sealed:
    """Reference mode: windows and the exterior door stay shut all year."""

    name = "NoVent"

    def __repr__(self):
        return "SEALED"


SEALED = Sealed()


# -- single-step physics, exposed for tests and callers ----------------------------

def ventilation_flow(link: AirLink, t_in: float, t_out: float, opening_height: float | None = None,
                     modulation: float = 1.0) -> float:
    """Volumetric flow (m3/s) through an air link.

    Cracks carry their fixed flow. Windows and doors use the single-sided
    stack formula Q = Cd/3 * m*A * sqrt(g H |dT| / T_mean) with Cd = 0.6.
    """
    if not 0.0 <= modulation <= 1.0:
        raise ValueError("modulation must lie in [0, 1]")
    if link.kind is LinkKind.CRACK:
        return link.flow
    h = link.height if opening_height is None else opening_height
    return _kernel_py.stack_flow(modulation * link.open_area, h, abs(t_in - t_out), 0.5 * (t_in + t_out))


def _nodes(net: Network, temps, gains):
    """Zone-sized inputs widened to nodes: mass starts at its zone's air
    temperature and receives no gain."""
    t = np.asarray(temps, dtype=float)
    q = np.asarray(gains, dtype=float)
    z = net.zones
    if t.size == z:
        t = np.concatenate([t, t])
    if q.size == z:
        q = np.concatenate([q, np.zeros(z)])
    if t.size != 2 * z or q.size != 2 * z:
        raise ValueError(f"temperatures and gains need {z} zone or {2 * z} node values")
    return t, q


def _coefficients(net: Network, temps, t_out, gains, t_ground, window_modulation, door_modulation):
    n = net.capacitance.size
    t, gains = _nodes(net, temps, gains)
    win_m = np.zeros(net.window_zone.size) if window_modulation is None else np.asarray(window_modulation, float)
    door_m = (np.full(net.door_a.size, DOOR_BASE_MODULATION) if door_modulation is None
              else np.asarray(door_modulation, float))
    diag = net.ua_outdoor + net.ua_ground + _kernel_py.RHO_CP * net.crack_flow
    for w, i in enumerate(net.window_zone):
        q = _kernel_py.stack_flow(win_m[w] * net.window_area[w], net.window_height[w],
                                  abs(t[i] - t_out), 0.5 * (t[i] + t_out))
        diag[i] += _kernel_py.RHO_CP * q
    K = np.diag(net.conductance.sum(axis=1)) - net.conductance
    for d, (a, b) in enumerate(zip(net.door_a, net.door_b)):
        q = _kernel_py.stack_flow(door_m[d] * net.door_area[d], net.door_height[d],
                                  abs(t[a] - t[b]), 0.5 * (t[a] + t[b]))
        g = _kernel_py.RHO_CP * q
        K[a, a] += g
        K[b, b] += g
        K[a, b] -= g
        K[b, a] -= g
    K[np.diag_indices(n)] += diag
    rhs = np.asarray(gains, float) + net.ua_ground * t_ground + (diag - net.ua_ground) * t_out
    return K, rhs


def step_zone_temperatures(net: Network, temps, t_out: float, gains, dt: float = DT,
                           t_ground: float | None = None, window_modulation=None,
                           door_modulation=None) -> np.ndarray:
    """Advance node temperatures by ``dt`` seconds with coefficients frozen over the step.

    ``temps`` and ``gains`` (W) cover all nodes, or just the zones (see
    :func:`_nodes`); the result always covers all nodes. Flows are evaluated
    at the start-of-step temperatures; the linear system is then integrated
    exactly.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    tg = t_out if t_ground is None else t_ground
    K, rhs = _coefficients(net, temps, t_out, gains, tg, window_modulation, door_modulation)
    return kernel.advance(K, rhs, net.capacitance, _nodes(net, temps, gains)[0], dt)


def equilibrium_temperatures(net: Network, temps, t_out: float, gains, t_ground: float | None = None,
                             window_modulation=None, door_modulation=None) -> np.ndarray:
    """Steady state of the step equations with flows frozen at ``temps`` (all nodes)."""
    tg = t_out if t_ground is None else t_ground
    K, rhs = _coefficients(net, temps, t_out, gains, tg, window_modulation, door_modulation)
    return np.linalg.solve(K, rhs)


# -- annual run --------------------------------------------------------------------

def solar_gains(model: ThermalModel, weather: WeatherYear, sun=None) -> np.ndarray:
    """Transmitted solar power per zone and hour (W), shape (8760, zones).

    Shading devices cut the direct beam only; the diffuse part is the
    isotropic half-sky seen by a vertical wall.
    """
    alt, az = annual_sun(weather.location) if sun is None else sun
    out = np.zeros((HOURS, len(model.zones)))
    cache: dict[float, tuple[np.ndarray, np.ndarray]] = {}
    for gl in model.glazing:
        direct, diffuse = _wall_sun(cache, weather, alt, az, gl.azimuth)
        if gl.overhang > 0 or gl.left_fin > 0 or gl.right_fin > 0:
            shade = shading_fraction(gl.overhang, gl.left_fin, gl.right_fin, gl.width, gl.height,
                                     alt, az, gl.azimuth)
            direct = direct * (1.0 - shade)
        out[:, gl.zone] += gl.g_value * gl.area * (direct + diffuse)
    return out


def _wall_sun(cache, weather, alt, az, azimuth):
    if azimuth not in cache:
        cache[azimuth] = wall_irradiance(weather.direct_normal, weather.diffuse_horizontal,
                                         alt, az, azimuth)
    return cache[azimuth]


def opaque_gains(model: ThermalModel, weather: WeatherYear, sun=None) -> np.ndarray:
    """Net heat (W) that sun and sky drive through opaque walls and roofs,
    per node and hour, shape (8760, nodes).

    Each element sees a sol-air excess R_se (a I - F h_r dT_sky) over the
    outdoor air acting through its outer conductance, with sky view factor
    F = 1 for the roof and 0.5 for walls.
    """
    alt, az = annual_sun(weather.location) if sun is None else sun
    n = len(model.zones)
    out = np.zeros((HOURS, 2 * n))
    horizontal = (weather.direct_normal * np.maximum(np.sin(np.radians(alt)), 0.0)
                  + weather.diffuse_horizontal)
    cache: dict[float, tuple[np.ndarray, np.ndarray]] = {}
    for el in model.opaque:
        if el.azimuth is None:
            irr, view = horizontal, 1.0
        else:
            direct, diffuse = _wall_sun(cache, weather, alt, az, el.azimuth)
            irr, view = direct + diffuse, 0.5
        sky = view * RADIATIVE_FILM * el.emissivity * SKY_DEPRESSION
        node = n + el.zone if el.via_mass else el.zone
        out[:, node] += el.u_outer * el.area * el.r_se * (el.absorptance * irr - sky)
    return out


@dataclass(frozen=True, eq=False)
class ZoneSeries:
    """Hourly results, arrays shaped (zones, 8760).

    ``air_temp`` (and ``mass_temp`` for the lumped structure) are end-of-hour
    temperatures; ``ach`` (outdoor air changes) and ``modulation`` (window
    signal) are hourly means.
    """

    zone_ids: tuple[str, ...]
    zone_functions: tuple[str, ...]
    air_temp: np.ndarray
    ach: np.ndarray
    modulation: np.ndarray
    t_out: np.ndarray
    start_temp: np.ndarray
    mass_temp: np.ndarray | None = None

    def __post_init__(self):
        if not np.all(np.isfinite(self.air_temp)):
            raise SimulationError("non-finite zone temperature")
        if np.any(self.ach < 0):
            raise SimulationError("negative air change rate")

    def zone(self, space_id: str) -> np.ndarray:
        return self.air_temp[self.zone_ids.index(space_id)]

    def to_csv(self, seed: int | None = None) -> str:
        buf = io.StringIO()
        if seed is not None:
            buf.write(f"# seed: {seed}\n")
        buf.write("zone_id,hour_of_year,air_temp_C,ach\n")
        for z, zid in enumerate(self.zone_ids):
            for h in range(self.air_temp.shape[1]):
                buf.write(f"{zid},{h + 1},{self.air_temp[z, h]:.4f},{self.ach[z, h]:.4f}\n")
        return buf.getvalue()


def simulate_year(model: ThermalModel, weather: WeatherYear, schedules, control=SEALED, *,
                  gains: np.ndarray | None = None, sun=None, warmup: int = WARMUP_HOURS,
                  t_init: float = INITIAL_TEMPERATURE, substeps: int | None = None) -> ZoneSeries:
    """March the model through the weather year.

    ``schedules`` provides ``internal_gains(zone_functions, floor_areas)`` and
    ``occupied(zone_functions)``, both (8760, zones) arrays. ``control`` is
    :data:`SEALED` or an object with ``d1``, ``d2``, ``indoor_threshold`` and
    ``requires_occupancy``.

    Internal gains go to the zone air; transmitted sun lands on the room
    surfaces (mass node), as does the sol-air input of walls and roof.
    ``gains`` replaces all of this: shaped (8760, zones) it heats the air
    nodes, shaped (8760, 2 * zones) it gives every node's input.

    ``substeps`` defaults to :data:`SUBSTEPS` for the sealed reference and
    :data:`CONTROL_SUBSTEPS` when openings are controlled.
    """
    net = model.network()
    funcs = tuple(z.function for z in model.zones)
    n = len(model.zones)
    if gains is None:
        areas = np.array([z.floor_area for z in model.zones])
        node_gains = opaque_gains(model, weather, sun)
        node_gains[:, :n] += schedules.internal_gains(funcs, areas)
        node_gains[:, n:] += solar_gains(model, weather, sun)
    else:
        gains = np.asarray(gains, dtype=float)
        if gains.shape == (HOURS, n):
            node_gains = np.zeros((HOURS, 2 * n))
            node_gains[:, :n] = gains
        elif gains.shape == (HOURS, 2 * n):
            node_gains = gains
        else:
            raise ValueError(f"gains must be shaped ({HOURS}, {n}) or ({HOURS}, {2 * n})")
    zone_occ = np.asarray(schedules.occupied(funcs))
    if zone_occ.shape != (HOURS, n):
        raise ValueError(f"occupancy must be shaped ({HOURS}, {n})")
    occupied = np.zeros((HOURS, 2 * n), dtype=np.uint8)
    occupied[:, :n] = zone_occ
    gains = np.ascontiguousarray(node_gains, dtype=float)
    vent = not isinstance(control, Sealed) and control is not None
    d1 = control.d1 if vent else 0.0
    d2 = control.d2 if vent else 1.0
    thr = control.indoor_threshold if vent else 0.0
    if substeps is None:
        substeps = CONTROL_SUBSTEPS if vent else SUBSTEPS
    if substeps < 1:
        raise ValueError("substeps must be >= 1")
    req = control.requires_occupancy if vent else True
    temp = np.zeros((HOURS, 2 * n))
    ach = np.zeros((HOURS, 2 * n))
    mod = np.zeros((HOURS, 2 * n))
    start = np.zeros(2 * n)
    t_out = np.ascontiguousarray(weather.dry_bulb, dtype=float)
    unsafe = kernel.march(net.capacitance, net.volume, net.ua_outdoor, net.ua_ground,
                 weather.annual_mean_temperature, net.crack_flow,
                 np.ascontiguousarray(net.conductance),
                 net.window_zone, net.window_area, net.window_height,
                 net.door_a, net.door_b, net.door_area, net.door_height,
                 t_out, gains, occupied,
                 vent, float(d1), float(d2), float(thr), bool(req), DOOR_BASE_MODULATION,
                 int(warmup), float(t_init), DT, int(substeps), temp, ach, mod, start)
    series = ZoneSeries(tuple(z.space for z in model.zones), funcs, temp[:, :n].T.copy(),
                        ach[:, :n].T.copy(), mod[:, :n].T.copy(), t_out.copy(), start[:n],
                        temp[:, n:].T.copy())
    if np.abs(series.air_temp).max() >= 60.0:
        raise SimulationError("zone temperature beyond 60 C")
    if unsafe:
        raise SimulationError(f"{unsafe} opening decisions taken with outdoor air not colder than indoor")
    return series
