"""Generate the bundled synthetic Porto-like weather year.

Official EPW files come with mixed redistribution terms, so the package ships
a seeded synthetic year instead. It is meant to look like a mild Atlantic
climate at Porto's coordinates, not to reproduce any measured year:

* dry-bulb: annual mean 14.8 C, seasonal swing +-5.5 K (coldest around
  20 January), a diurnal cycle peaking at 15:00 whose amplitude grows with
  the day's clearness, plus a daily AR(1) anomaly (phi 0.7, sd 1.6 K)
* irradiance: Haurwitz clear-sky global horizontal scaled by a daily
  clearness index drawn from a Beta distribution. Its mean follows the ratio
  of rounded long-term monthly global horizontal means for Porto (about
  1.8 kWh/m2/day in December to 7.4 in July, some 1650 kWh/m2 a year) to
  the clear-sky value, interpolated between mid-months. Diffuse fraction
  1 - 0.8 * clearness, beam recovered from the remainder and capped at
  950 W/m2
* wind: Gamma distributed, mean about 3.6 m/s

Usage: python3 scripts/make_synthetic_epw.py [--seed N] [--out PATH]
"""
from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from planvent.io import atomic_write_text
from planvent.weather import DAYS, HOURS, Location, WeatherYear, annual_sun, epw_text

PORTO = Location(latitude=41.23, longitude=-8.68, elevation=73.0, timezone=0.0, name="Porto-synthetic")
#: target daily global horizontal irradiation per month, kWh/m2
MONTHLY_GHI = (2.0, 2.9, 4.3, 5.5, 6.5, 7.2, 7.4, 6.6, 5.0, 3.4, 2.2, 1.8)
MONTH_DAYS = (31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31)
DEFAULT_OUT = Path(__file__).resolve().parents[1] / "src" / "planvent" / "data" / "porto_synthetic.epw"


def _daily_target() -> np.ndarray:
    """Monthly targets (Wh/m2/day) interpolated periodically between mid-months."""
    mids = np.cumsum(MONTH_DAYS) - np.array(MONTH_DAYS) / 2.0
    x = np.concatenate([mids - 365, mids, mids + 365])
    y = np.tile(np.array(MONTHLY_GHI) * 1000.0, 3)
    return np.interp(np.arange(DAYS) + 0.5, x, y)


def synthesize(seed: int = 20240501) -> WeatherYear:
    rng = np.random.default_rng(seed)
    day = np.arange(DAYS)
    season = -np.cos(2 * np.pi * (day - 20) / 365.0)          # -1 in January, +1 in July
    alt, _ = annual_sun(PORTO)
    sin_alt = np.sin(np.radians(np.maximum(alt, 0.0)))
    with np.errstate(divide="ignore", over="ignore"):
        clear_ghi = np.where(sin_alt > 0.02, 1098.0 * sin_alt * np.exp(-0.057 / np.maximum(sin_alt, 1e-3)), 0.0)
    mean_clear = np.clip(_daily_target() / clear_ghi.reshape(DAYS, 24).sum(axis=1), 0.2, 0.85)
    k = 6.0
    clearness = rng.beta(mean_clear * k, (1 - mean_clear) * k)

    anomaly = np.empty(DAYS)
    anomaly[0] = 0.0
    for d in range(1, DAYS):
        anomaly[d] = 0.7 * anomaly[d - 1] + rng.normal(0.0, 1.6 * np.sqrt(1 - 0.7 ** 2))
    daily_mean = 14.8 + 5.5 * season + anomaly + 1.5 * (clearness - mean_clear) * (season > 0)
    swing = 2.5 + 3.5 * clearness + 0.8 * season

    hour = np.arange(HOURS) % 24 + 0.5
    d_of_h = np.arange(HOURS) // 24
    diurnal = np.cos(2 * np.pi * (hour - 15.0) / 24.0)
    dry_bulb = daily_mean[d_of_h] + swing[d_of_h] * diurnal + rng.normal(0.0, 0.3, HOURS)

    c = clearness[d_of_h]
    ghi = clear_ghi * np.clip(c + rng.normal(0.0, 0.05, HOURS), 0.05, 1.0)
    dhi = ghi * (1.0 - 0.8 * c)
    dni = np.where(sin_alt > 0.02, (ghi - dhi) / np.maximum(sin_alt, 0.02), 0.0)
    dni = np.minimum(dni, 950.0)

    wind = rng.gamma(2.5, 3.6 / 2.5, HOURS)
    # round to the precision the file stores so parsing the file gives back these arrays
    return WeatherYear(PORTO, np.round(dry_bulb, 1), np.round(dni), np.round(dhi), np.round(wind, 1))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=20240501)
    ap.add_argument("--out", type=Path, default=DEFAULT_OUT)
    args = ap.parse_args(argv)
    weather = synthesize(args.seed)
    atomic_write_text(args.out, epw_text(weather))
    t = weather.dry_bulb
    alt, _ = annual_sun(weather.location)
    ghi = weather.direct_normal * np.maximum(np.sin(np.radians(alt)), 0.0) + weather.diffuse_horizontal
    print(f"wrote {args.out}: mean {t.mean():.2f} C, min {t.min():.1f}, max {t.max():.1f}, "
          f"global horizontal {ghi.sum() / 1000:.0f} kWh/m2")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
