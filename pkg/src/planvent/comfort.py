"""Adaptive comfort band, occupancy schedules and the occupancy-weighted
degree-hour penalty.

Schedules use 24 one-hour slots: slot ``s`` (1..24) covers clock hours
``s - 1`` to ``s`` local standard time, so hour-of-year ``h`` (0-based) falls in
slot ``h % 24 + 1``.
"""
from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import numpy as np

#: half-width of the adaptive band per EN 15251 category
CATEGORY_HALF_WIDTH = {"I": 2.0, "II": 3.0, "III": 4.0}
TRM_LIMITS = (10.0, 30.0)


@dataclass(frozen=True)
class ComfortBand:
    lower: np.ndarray    # T1 per day
    upper: np.ndarray    # T2 per day

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        if lo.shape != hi.shape or np.any(lo >= hi):
            raise ValueError("comfort band needs T1 < T2 on every day")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def days(self) -> int:
        return self.lower.size


def comfort_band(trm, category: str = "II", clamp: bool = True) -> ComfortBand:
    """T_comf = 0.33 Trm + 18.8 with Trm clamped to [10, 30]; band is T_comf -+ half-width."""
    t = np.asarray(trm, dtype=float)
    if clamp:
        t = np.clip(t, *TRM_LIMITS)
    comf = 0.33 * t + 18.8
    half = CATEGORY_HALF_WIDTH[category]
    return ComfortBand(comf - half, comf + half)


@dataclass(frozen=True)
class PenaltyWeights:
    w1: float = 1.0   # per degree below the band
    w2: float = 1.0   # per degree above the band
    o: float = 1.0    # occupied hours
    v: float = 0.3    # unoccupied hours

    def __post_init__(self):
        if min(self.w1, self.w2, self.o, self.v) < 0:
            raise ValueError("penalty weights must be >= 0")

    def scaled(self, k: float) -> "PenaltyWeights":
        return PenaltyWeights(self.w1 * k, self.w2 * k, self.o * k, self.v * k)


def discomfort(t, t1, t2, weights: PenaltyWeights = PenaltyWeights()):
    """Weighted degrees outside [t1, t2]; zero on the edges."""
    t = np.asarray(t, dtype=float)
    out = weights.w1 * np.maximum(np.asarray(t1) - t, 0.0) + weights.w2 * np.maximum(t - np.asarray(t2), 0.0)
    return float(out) if out.ndim == 0 else out


#: zone air temperature at which the sensible share of occupant heat is evaluated
SENSIBLE_REFERENCE_TEMP = 23.0


def sensible_heat(activity, air_temp: float = SENSIBLE_REFERENCE_TEMP):
    """Sensible part (W) of a person's total metabolic heat ``activity`` (W).

    The polynomial fit used by common building simulators for an adult
    occupant; the remainder leaves as latent heat (moisture) and does not
    warm the air.
    """
    m = np.asarray(activity, dtype=float)
    t = air_temp
    s = (6.461927 + 0.946892 * m + 0.0000255737 * m ** 2 + 7.139322 * t - 0.0627909 * t * m
         + 0.0000589172 * t * m ** 2 - 0.198550 * t ** 2 + 0.000940018 * t ** 2 * m
         - 0.00000149532 * t ** 2 * m ** 2)
    out = np.clip(s, 0.0, m)
    return float(out) if out.ndim == 0 else out


def _slots(*ranges) -> frozenset[int]:
    out = set()
    for r in ranges:
        out.update(r if isinstance(r, range) else (r,))
    return frozenset(out)


@dataclass(frozen=True)
class SpaceSchedule:
    people_slots: frozenset[int]
    occupants: tuple[int, ...]      # per instance of the function, last value repeats
    activity: float                 # W per person
    light_slots: frozenset[int]
    light_density: float            # W/m2, lighting plus equipment

    def __post_init__(self):
        if self.activity < 0 or self.light_density < 0 or min(self.occupants) < 0:
            raise ValueError("gains must be >= 0")
        for s in self.people_slots | self.light_slots:
            if not 1 <= s <= 24:
                raise ValueError("schedule slots run from 1 to 24")

    def occupant_count(self, instance: int) -> int:
        return self.occupants[min(instance, len(self.occupants) - 1)]


_DAY_BLOCK = _slots(8, 13, 14, 15, 19, 20, 21, 23)
_EVENING = _slots(13, 14, 15, range(19, 25))


def _default_schedules() -> dict[str, SpaceSchedule]:
    return {
        "Hall": SpaceSchedule(_DAY_BLOCK, (2,), 190.0, _DAY_BLOCK, 7.0),
        "Kitchen": SpaceSchedule(_DAY_BLOCK, (2,), 190.0, _DAY_BLOCK, 10.0),
        "LivingRoom": SpaceSchedule(_EVENING, (5,), 110.0, _EVENING, 10.0),
        "Bathroom": SpaceSchedule(_DAY_BLOCK, (1,), 207.0, _DAY_BLOCK, 7.0),
        "Corridor": SpaceSchedule(_DAY_BLOCK - {8}, (2,), 190.0, _DAY_BLOCK - {8}, 7.0),
        "Bedroom": SpaceSchedule(_slots(range(1, 25)), (2, 2, 1), 72.0, _EVENING, 7.0),
    }


@dataclass(frozen=True)
class OccupancyModel:
    """People and lighting/equipment schedules by space function."""

    schedules: dict[str, SpaceSchedule] = field(default_factory=_default_schedules)
    #: None counts the full activity level as sensible heat
    sensible_reference_temp: float | None = SENSIBLE_REFERENCE_TEMP

    def schedule(self, function: str) -> SpaceSchedule:
        try:
            return self.schedules[str(getattr(function, "value", function))]
        except KeyError:
            raise KeyError(f"no schedule for space function {function!r}") from None

    def is_occupied(self, function: str, hour: int) -> bool:
        """``hour`` is 1-based hour of the year."""
        return ((hour - 1) % 24) + 1 in self.schedule(function).people_slots

    def _daily(self, functions, attr) -> np.ndarray:
        out = np.zeros((24, len(functions)))
        for z, fn in enumerate(functions):
            slots = getattr(self.schedule(fn), attr)
            for s in slots:
                out[s - 1, z] = 1.0
        return out

    def occupied(self, functions, hours: int = 8760) -> np.ndarray:
        """Boolean (hours, zones) occupancy."""
        day = self._daily(functions, "people_slots").astype(bool)
        return np.tile(day, (hours // 24, 1))

    def person_heat(self, function: str) -> float:
        """Sensible heat (W) one occupant adds to the zone air."""
        activity = self.schedule(function).activity
        if self.sensible_reference_temp is None:
            return activity
        return sensible_heat(activity, self.sensible_reference_temp)

    def internal_gains(self, functions, floor_areas, hours: int = 8760) -> np.ndarray:
        """Sensible people heat plus lighting/equipment power (W), shape (hours, zones).

        Repeated functions take the occupant counts of their schedule in order
        of appearance (e.g. bedrooms with 2, 2 and 1 people).
        """
        seen: dict[str, int] = {}
        people = np.zeros(len(functions))
        light = np.zeros(len(functions))
        for z, fn in enumerate(functions):
            sch = self.schedule(fn)
            k = seen.get(str(fn), 0)
            seen[str(fn)] = k + 1
            people[z] = self.person_heat(fn) * sch.occupant_count(k)
            light[z] = sch.light_density * floor_areas[z]
        day = (self._daily(functions, "people_slots") * people
               + self._daily(functions, "light_slots") * light)
        return np.tile(day, (hours // 24, 1))


def occupancy_factor(function: str, hour: int, model: OccupancyModel = OccupancyModel(),
                     weights: PenaltyWeights = PenaltyWeights()) -> float:
    if not 1 <= hour <= 8760:
        raise ValueError("hour must lie in [1, 8760]")
    return weights.o if model.is_occupied(function, hour) else weights.v


@dataclass(frozen=True, eq=False)
class PenaltyReport:
    total: float
    per_space: dict[str, float]
    per_day: np.ndarray
    per_space_day: np.ndarray = field(repr=False)   # (spaces, days)

    def to_csv(self, seed: int | None = None) -> str:
        buf = io.StringIO()
        if seed is not None:
            buf.write(f"# seed: {seed}\n")
        ids = list(self.per_space)
        buf.write("day," + ",".join(ids) + ",total\n")
        for d in range(self.per_day.size):
            cells = [f"{self.per_space_day[z, d]:.6f}" for z in range(len(ids))]
            buf.write(f"{d + 1}," + ",".join(cells) + f",{self.per_day[d]:.6f}\n")
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"total": round(self.total, 6),
                "per_space": {k: round(v, 6) for k, v in self.per_space.items()}}

    def to_json(self, seed: int | None = None) -> str:
        doc = self.to_dict()
        if seed is not None:
            doc["seed"] = seed
        return json.dumps(doc, indent=2) + "\n"


def thermal_penalty(series, band: ComfortBand, model: OccupancyModel = OccupancyModel(),
                    weights: PenaltyWeights = PenaltyWeights()) -> PenaltyReport:
    """Occupancy-weighted degree-hours outside the band, summed over spaces and hours.

    ``series`` needs ``zone_ids``, ``zone_functions`` and ``air_temp`` shaped
    (zones, hours) with hours a whole number of days matching the band.
    """
    temp = np.asarray(series.air_temp, dtype=float)
    n, hours = temp.shape
    if hours % 24 or hours // 24 != band.days:
        raise ValueError(f"series covers {hours} hours, band covers {band.days} days")
    functions = list(series.zone_functions)
    for zid, fn in zip(series.zone_ids, functions):
        try:
            model.schedule(fn)
        except KeyError:
            raise KeyError(f"no occupancy schedule for space {zid} ({fn})") from None
    occ = model.occupied(functions, hours).T
    factor = np.where(occ, weights.o, weights.v)
    lo = np.repeat(band.lower, 24)
    hi = np.repeat(band.upper, 24)
    hourly = discomfort(temp, lo[None, :], hi[None, :], weights) * factor
    per_space_day = hourly.reshape(n, hours // 24, 24).sum(axis=2)
    per_day = per_space_day.sum(axis=0)
    per_space = {zid: float(v) for zid, v in zip(series.zone_ids, per_space_day.sum(axis=1))}
    return PenaltyReport(float(per_day.sum()), per_space, per_day, per_space_day)
