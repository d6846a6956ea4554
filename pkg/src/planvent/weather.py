"""EPW weather files, running-mean outdoor temperature and solar geometry.

Angles are degrees throughout. Azimuths are measured from North, clockwise.
Hour ``h`` of the year (0-based) covers clock hours ``h % 24`` to ``h % 24 + 1``
local standard time; the sun is evaluated at the middle of the hour.
"""
from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass, field
from typing import IO, Union

import numpy as np

HOURS = 8760
DAYS = 365
DAYS_IN_MONTH = (31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31)
EPW_FIELDS = 35
_IDX_DRY_BULB = 6
_IDX_DNI = 14
_IDX_DHI = 15
_IDX_WIND = 21
_MIN_FIELDS = _IDX_WIND + 1
#: value the EPW format uses for "missing" in each column we read
_SENTINELS = {_IDX_DRY_BULB: 99.9, _IDX_DNI: 9999.0, _IDX_DHI: 9999.0, _IDX_WIND: 999.0}
#: running-mean weights for days d-1 .. d-7 used to start the recursion
_START_WEIGHTS = np.array([1.0, 0.8, 0.6, 0.5, 0.4, 0.3, 0.2])


class EpwError(ValueError):
    """Malformed weather file. ``line`` is 1-based, or None for file-level errors."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Location:
    latitude: float
    longitude: float
    elevation: float = 0.0
    timezone: float = 0.0
    name: str = ""


@dataclass(frozen=True, eq=False)
class WeatherYear:
    """One non-leap year of hourly records. Arrays are read-only."""

    location: Location
    dry_bulb: np.ndarray
    direct_normal: np.ndarray
    diffuse_horizontal: np.ndarray
    wind_speed: np.ndarray
    filled: int = field(default=0)

    def __post_init__(self):
        for name in ("dry_bulb", "direct_normal", "diffuse_horizontal", "wind_speed"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != (HOURS,):
                raise EpwError(f"{name}: expected {HOURS} hourly values, got {arr.shape[0]}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if np.any(np.abs(self.dry_bulb) > 60.0):
            raise EpwError("dry-bulb temperature outside [-60, 60] C")
        if np.any(self.direct_normal < 0) or np.any(self.diffuse_horizontal < 0):
            raise EpwError("negative irradiance")

    def daily_mean_temperature(self) -> np.ndarray:
        return self.dry_bulb.reshape(DAYS, 24).mean(axis=1)

    @property
    def annual_mean_temperature(self) -> float:
        return float(self.dry_bulb.mean())


@dataclass(frozen=True)
class SunPosition:
    altitude: float
    azimuth: float


# -- EPW input/output ------------------------------------------------------------

def _parse_location(line: str, lineno: int) -> Location:
    parts = [p.strip() for p in line.rstrip("\r\n").split(",")]
    if not parts or parts[0].upper() != "LOCATION":
        raise EpwError("expected a LOCATION header", lineno)
    if len(parts) < 10:
        raise EpwError(f"LOCATION header has {len(parts)} fields, expected 10", lineno)
    try:
        lat, lon, tz, elev = (float(parts[k]) for k in (6, 7, 8, 9))
    except ValueError as exc:
        raise EpwError(f"LOCATION header: {exc}", lineno) from None
    if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
        raise EpwError("LOCATION latitude/longitude out of range", lineno)
    return Location(lat, lon, elev, tz, parts[1])


def parse_epw(source: Union[str, os.PathLike, IO[str]]) -> WeatherYear:
    """Read an EPW file (path or text stream).

    Header lines are the ones starting with a letter; every other non-blank
    line is a data row and must have at least 22 fields, the same count as
    the first row. Missing-value sentinels repeat the previous hour.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8", errors="replace") as fh:
            return parse_epw(fh)
    columns = {k: [] for k in _SENTINELS}
    location = None
    width = None
    rows = 0
    lineno = 0
    for lineno, line in enumerate(source, start=1):
        if lineno == 1:
            location = _parse_location(line, lineno)
            continue
        text = line.strip()
        if not text:
            continue
        if rows == 0 and text[0].isalpha():
            continue
        parts = text.split(",")
        if width is None:
            width = len(parts)
            if width < _MIN_FIELDS:
                raise EpwError(f"data row has {width} fields, expected at least {_MIN_FIELDS}", lineno)
        elif len(parts) != width:
            raise EpwError(f"data row has {len(parts)} fields, expected {width}", lineno)
        rows += 1
        if rows > HOURS:
            raise EpwError(f"more than {HOURS} data rows", lineno)
        for k, col in columns.items():
            try:
                col.append(float(parts[k]))
            except ValueError:
                raise EpwError(f"field {k + 1} is not a number: {parts[k]!r}", lineno) from None
    if location is None:
        raise EpwError("empty file: expected a LOCATION header", 1)
    if rows != HOURS:
        raise EpwError(f"found {rows} data rows, expected {HOURS}", lineno)
    filled = 0
    data = {}
    for k, col in columns.items():
        arr = np.array(col)
        data[k], n = _carry_forward(arr, _SENTINELS[k])
        filled += n
    return WeatherYear(location, data[_IDX_DRY_BULB], data[_IDX_DNI], data[_IDX_DHI],
                       data[_IDX_WIND], filled)


def _carry_forward(arr: np.ndarray, sentinel: float) -> tuple[np.ndarray, int]:
    bad = arr >= sentinel - 1e-9
    n = int(bad.sum())
    if n == 0:
        return arr, 0
    if n == arr.size:
        raise EpwError(f"column has only missing values ({sentinel})")
    idx = np.where(bad, 0, np.arange(arr.size))
    np.maximum.accumulate(idx, out=idx)
    first = int(np.argmax(~bad))
    idx[:first] = first  # leading gaps take the first valid value
    return arr[idx], n


def _calendar() -> list[tuple[int, int, int]]:
    out = []
    for m, nd in enumerate(DAYS_IN_MONTH, start=1):
        for d in range(1, nd + 1):
            out.extend((m, d, h) for h in range(1, 25))
    return out


def write_epw(weather: WeatherYear, stream: IO[str], year: int = 2001) -> None:
    """Write a standard 35-field EPW. Columns we do not model are written as missing."""
    loc = weather.location
    stream.write(f"LOCATION,{loc.name or 'Site'},-,-,synthetic,000000,{loc.latitude:.2f},"
                 f"{loc.longitude:.2f},{loc.timezone:.1f},{loc.elevation:.1f}\n")
    stream.write("DESIGN CONDITIONS,0\n")
    stream.write("TYPICAL/EXTREME PERIODS,0\n")
    ground = weather.annual_mean_temperature
    stream.write(f"GROUND TEMPERATURES,1,0.5,,,,{','.join([f'{ground:.1f}'] * 12)}\n")
    stream.write("HOLIDAYS/DAYLIGHT SAVINGS,No,0,0,0\n")
    stream.write("COMMENTS 1,synthetic weather year\n")
    stream.write("COMMENTS 2,\n")
    stream.write("DATA PERIODS,1,1,Data,Sunday, 1/ 1,12/31\n")
    missing = ["999999"] * (EPW_FIELDS - 7)
    for i, (m, d, h) in enumerate(_calendar()):
        row = [str(year), str(m), str(d), str(h), "60", "?9?9?9?9E0?9?9?9?9?9?9?9?9?9?9?9?9?9*9*9?9"]
        fields = list(missing)
        # defaults for the columns between the ones we carry
        fields[0] = f"{weather.dry_bulb[i]:.1f}"
        fields[1] = "99.9"     # dew point
        fields[2] = "999"      # relative humidity
        fields[3] = "999999"   # pressure
        fields[_IDX_DNI - 6] = f"{weather.direct_normal[i]:.0f}"
        fields[_IDX_DHI - 6] = f"{weather.diffuse_horizontal[i]:.0f}"
        fields[_IDX_WIND - 6] = f"{weather.wind_speed[i]:.1f}"
        stream.write(",".join(row + fields) + "\n")


def epw_text(weather: WeatherYear, year: int = 2001) -> str:
    buf = io.StringIO()
    write_epw(weather, buf, year)
    return buf.getvalue()


# -- comfort driver ----------------------------------------------------------------

def running_mean(daily_means, alpha: float = 0.8) -> np.ndarray:
    """Exponentially weighted running mean of daily outdoor temperature.

    Trm(d) = (1 - alpha) * Ted(d-1) + alpha * Trm(d-1). The year is treated
    as cyclic: the first day starts from the weighted mean of the last seven
    days of the series.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    ted = np.asarray(daily_means, dtype=float)
    n = ted.size
    if n < 8:
        raise ValueError("running_mean needs at least 8 daily means")
    prior = ted[::-1][:7]  # d-1 .. d-7 seen from day 0, wrapping
    trm = np.empty(n)
    trm[0] = float(prior @ _START_WEIGHTS / _START_WEIGHTS.sum())
    for d in range(1, n):
        trm[d] = (1.0 - alpha) * ted[d - 1] + alpha * trm[d - 1]
    return trm


# -- solar geometry ------------------------------------------------------------------

def declination(day_of_year):
    return 23.45 * np.sin(np.radians(360.0 * (284.0 + np.asarray(day_of_year, dtype=float)) / 365.0))


def equation_of_time(day_of_year):
    """Minutes, Spencer's Fourier series."""
    b = 2.0 * np.pi * (np.asarray(day_of_year, dtype=float) - 1.0) / 365.0
    return 229.18 * (0.000075 + 0.001868 * np.cos(b) - 0.032077 * np.sin(b)
                     - 0.014615 * np.cos(2 * b) - 0.040849 * np.sin(2 * b))


def _solar_time(location: Location, day_of_year, hour):
    return (np.asarray(hour, dtype=float) + (location.longitude - 15.0 * location.timezone) / 15.0
            + equation_of_time(day_of_year) / 60.0)


def solar_noon_hour(location: Location, day_of_year: int) -> float:
    """Clock hour (local standard time) at which the hour angle is zero."""
    return float(12.0 - (location.longitude - 15.0 * location.timezone) / 15.0
                 - equation_of_time(day_of_year) / 60.0)


def _sun(location: Location, day_of_year, hour):
    phi = math.radians(location.latitude)
    delta = np.radians(declination(day_of_year))
    h = np.radians(15.0 * (_solar_time(location, day_of_year, hour) - 12.0))
    sin_alt = math.sin(phi) * np.sin(delta) + math.cos(phi) * np.cos(delta) * np.cos(h)
    alt = np.degrees(np.arcsin(np.clip(sin_alt, -1.0, 1.0)))
    az = np.degrees(np.arctan2(np.sin(h), np.cos(h) * math.sin(phi) - np.tan(delta) * math.cos(phi)))
    return alt, np.mod(az + 180.0, 360.0)


def sun_position(location: Location, day_of_year: int, hour: float) -> SunPosition:
    """Sun at clock ``hour`` (local standard time, fractional) of a 1-based day."""
    alt, az = _sun(location, day_of_year, hour)
    return SunPosition(float(alt), float(az) % 360.0)


def annual_sun(location: Location) -> tuple[np.ndarray, np.ndarray]:
    """Altitude and azimuth at the middle of every hour of the year."""
    k = np.arange(HOURS)
    return _sun(location, k // 24 + 1, k % 24 + 0.5)


def incidence_cosine(altitude, azimuth, wall_azimuth):
    """Cosine of the beam incidence angle on a vertical wall; negative means behind."""
    return np.cos(np.radians(altitude)) * np.cos(np.radians(np.asarray(azimuth) - wall_azimuth))


def wall_irradiance(direct_normal, diffuse_horizontal, altitude, azimuth, wall_azimuth):
    """Direct and diffuse irradiance (W/m2) on a vertical wall, element-wise."""
    cos_i = incidence_cosine(altitude, azimuth, wall_azimuth)
    lit = (np.asarray(altitude) >= 0.0) & (cos_i > 0.0)
    direct = np.where(lit, np.asarray(direct_normal) * np.where(lit, cos_i, 0.0), 0.0)
    return direct, 0.5 * np.asarray(diffuse_horizontal, dtype=float)


def irradiance_on_wall(record, sun: SunPosition, wall_azimuth: float) -> float:
    """Total irradiance on a vertical wall for one hour.

    ``record`` is any object with ``direct_normal`` and ``diffuse_horizontal``
    attributes, or a ``(direct_normal, diffuse_horizontal)`` pair.
    """
    if isinstance(record, tuple):
        dni, dhi = record
    else:
        dni, dhi = record.direct_normal, record.diffuse_horizontal
    direct, diffuse = wall_irradiance(dni, dhi, sun.altitude, sun.azimuth, wall_azimuth)
    return float(direct + diffuse)


def _relative_azimuth(azimuth, wall_azimuth):
    return np.mod(np.asarray(azimuth, dtype=float) - wall_azimuth + 180.0, 360.0) - 180.0


def shading_fraction(overhang: float, left_fin: float, right_fin: float,
                     width: float, height: float, altitude, azimuth, wall_azimuth: float):
    """Fraction of a window's direct beam blocked by an overhang and side fins.

    The overhang sits flush with the window head and the fins flush with its
    jambs. "Left" is as seen from outside, facing the wall, i.e. the fin on
    the ``wall_azimuth + 90`` side. Scalars in, float out; arrays broadcast.
    """
    alt = np.asarray(altitude, dtype=float)
    gamma = _relative_azimuth(azimuth, wall_azimuth)
    front = (alt > 0.0) & (np.abs(gamma) < 90.0)
    g = np.where(front, np.radians(gamma), 0.0)
    tan_profile = np.tan(np.radians(np.where(front, alt, 0.0))) / np.cos(g)
    drop = np.minimum(overhang * tan_profile, height)
    fin = np.where(gamma > 0.0, left_fin, right_fin)
    across = np.minimum(fin * np.abs(np.tan(g)), width)
    shaded = drop * width + across * height - drop * across
    frac = np.where(front, np.clip(shaded / (width * height), 0.0, 1.0), 0.0)
    return float(frac) if frac.ndim == 0 else frac
