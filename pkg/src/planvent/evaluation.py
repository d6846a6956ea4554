"""Everything needed to turn a plan into an annual thermal penalty."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from planvent.comfort import (
    ComfortBand, OccupancyModel, PenaltyReport, PenaltyWeights, comfort_band, thermal_penalty,
)
from planvent.plan import FloorPlan
from planvent.thermal import (
    SEALED, ConstructionSet, ZoneSeries, build_thermal_model, reference_constructions, simulate_year,
)
from planvent.weather import WeatherYear, annual_sun, running_mean

RUNNING_MEAN_ALPHA = 0.8


@dataclass(frozen=True, eq=False)
class EvaluationContext:
    weather: WeatherYear
    occupancy: OccupancyModel = field(default_factory=OccupancyModel)
    weights: PenaltyWeights = field(default_factory=PenaltyWeights)
    constructions: ConstructionSet = field(default_factory=reference_constructions)
    comfort_category: str = "II"
    clamp_running_mean: bool = True
    substeps: int | None = None    # None: simulate_year picks by control

    @cached_property
    def band(self) -> ComfortBand:
        trm = running_mean(self.weather.daily_mean_temperature(), RUNNING_MEAN_ALPHA)
        return comfort_band(trm, self.comfort_category, self.clamp_running_mean)

    @cached_property
    def sun(self) -> tuple[np.ndarray, np.ndarray]:
        return annual_sun(self.weather.location)

    def simulate(self, plan: FloorPlan, control=SEALED) -> ZoneSeries:
        model = build_thermal_model(plan, self.constructions)
        return simulate_year(model, self.weather, self.occupancy, control, sun=self.sun,
                             substeps=self.substeps)

    def penalty(self, plan: FloorPlan, control=SEALED) -> PenaltyReport:
        return thermal_penalty(self.simulate(plan, control), self.band, self.occupancy, self.weights)

    def __getstate__(self):
        # cached arrays are cheap to rebuild; keep pickles for worker processes small
        return {k: v for k, v in self.__dict__.items() if k not in ("band", "sun")}

    def __setstate__(self, state):
        self.__dict__.update(state)
