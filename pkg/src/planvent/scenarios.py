"""Occupant ventilation behaviour, the scenario experiment and its comparison tables.

A scenario opens a space's windows (and the interior doors it shares) when
the space is occupied, its air is at least ``indoor_threshold`` and outdoors
is colder. The opening fraction grows linearly with the indoor-outdoor
difference between ``d1`` and ``d2``.
"""
from __future__ import annotations

import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from planvent.thermal import SEALED
from planvent.thermal.simulate import CONTROL_SUBSTEPS
from planvent.thermal import _kernel_py
from planvent.weather import DAYS

REFERENCE = SEALED.name
MONTH_DAYS = (31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31)
#: May to October, 1-based months
WARM_SEASON = tuple(range(5, 11))


@dataclass(frozen=True)
class VentilationScenario:
    name: str
    d1: float                      # K, difference where openings start to open
    d2: float                      # K, difference where they are fully open
    indoor_threshold: float = 22.0
    requires_occupancy: bool = True

    def __post_init__(self):
        if not 0.0 <= self.d1 < self.d2:
            raise ValueError(f"scenario {self.name}: need 0 <= d1 < d2")
        if not math.isfinite(self.indoor_threshold):
            raise ValueError(f"scenario {self.name}: indoor threshold must be finite")
        if not self.name or self.name == REFERENCE:
            raise ValueError(f"scenario name {self.name!r} is reserved or empty")

    def to_dict(self) -> dict:
        return {"name": self.name, "d1": self.d1, "d2": self.d2,
                "indoor_threshold": self.indoor_threshold,
                "requires_occupancy": self.requires_occupancy}


SCENARIO_A = VentilationScenario("A", 0.0, 6.0)
SCENARIO_B = VentilationScenario("B", 1.0, 4.0)
SCENARIO_C = VentilationScenario("C", 2.0, 8.0)
SCENARIO_D = VentilationScenario("D", 6.0, 12.0)


def builtin_scenarios(include_reference: bool = True) -> list:
    """The sealed reference followed by scenarios A to D."""
    out = [SCENARIO_A, SCENARIO_B, SCENARIO_C, SCENARIO_D]
    return [SEALED, *out] if include_reference else out


def scenario_by_name(name: str, scenarios=None):
    for s in scenarios or builtin_scenarios():
        if s.name == name:
            return s
    raise KeyError(f"unknown scenario {name!r}")


def opening_modulation(scenario, occupied: bool, t_in: float, t_out: float) -> float:
    """Opening fraction in [0, 1]; the reference keeps everything shut."""
    if scenario is SEALED:
        return 0.0
    return _kernel_py.modulation(t_in, t_out, scenario.d1, scenario.d2, scenario.indoor_threshold,
                                 occupied, scenario.requires_occupancy)


# -- arithmetic of the comparison table ----------------------------------------------

def improvement_pct(reference: float, value: float) -> float:
    if reference <= 0:
        raise ValueError("reference penalty must be > 0")
    return (reference - value) / reference * 100.0


def format_improvement(reference: float, best: float) -> str:
    """Improvement of ``best`` over ``reference`` with one decimal, e.g. ``'7.4%'``."""
    return f"{improvement_pct(reference, best):.1f}%"


def month_slices() -> list[slice]:
    ends = np.cumsum(MONTH_DAYS)
    return [slice(int(e - d), int(e)) for d, e in zip(MONTH_DAYS, ends)]


def seasonal_benefit_share(daily_difference, months=WARM_SEASON) -> float | None:
    """Share of the annual benefit (days where the scenario beats the
    reference) that falls in ``months``; None when there is no benefit."""
    diff = np.asarray(daily_difference, dtype=float)
    if diff.size != DAYS:
        raise ValueError(f"expected {DAYS} daily values")
    benefit = np.maximum(0.0, -diff)
    total = benefit.sum()
    if total <= 0:
        return None
    sl = month_slices()
    return min(1.0, float(sum(benefit[sl[m - 1]].sum() for m in months) / total))


# -- experiment ------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ScenarioResult:
    """Penalties of every design under every scenario, reference first."""

    designs: tuple[str, ...]
    scenarios: tuple[str, ...]
    penalties: np.ndarray          # (designs, scenarios)
    daily: np.ndarray = field(repr=False)   # (designs, scenarios, days)
    seed: int | None = None

    def __post_init__(self):
        if self.scenarios[0] != REFERENCE:
            raise ValueError("the reference scenario must come first")
        if self.penalties.shape != (len(self.designs), len(self.scenarios)):
            raise ValueError("penalty matrix does not match the labels")
        if not np.all(np.isfinite(self.penalties)):
            raise ValueError("penalty matrix has non-finite entries")

    @property
    def variants(self) -> tuple[str, ...]:
        return self.scenarios[1:]

    def penalty(self, design: str, scenario: str) -> float:
        return float(self.penalties[self.designs.index(design), self.scenarios.index(scenario)])

    def improvement(self, design: str, scenario: str) -> float:
        return improvement_pct(self.penalty(design, REFERENCE), self.penalty(design, scenario))

    def best_scenario(self, design: str) -> str:
        """Lowest-penalty ventilation scenario of a design (first on ties)."""
        row = self.penalties[self.designs.index(design), 1:]
        return self.variants[int(np.argmin(row))]

    def best_design(self, scenario: str) -> str:
        col = self.penalties[:, self.scenarios.index(scenario)]
        return self.designs[int(np.argmin(col))]

    def best_improvement(self, design: str) -> float:
        return self.improvement(design, self.best_scenario(design))

    def averages(self) -> np.ndarray:
        return self.penalties.mean(axis=0)

    def best_average(self) -> str:
        return self.variants[int(np.argmin(self.averages()[1:]))]

    def daily_difference(self, design: str, scenario: str, reference: str = REFERENCE) -> np.ndarray:
        d = self.designs.index(design)
        return self.daily[d, self.scenarios.index(scenario)] - self.daily[d, self.scenarios.index(reference)]

    def seasonal_share(self, design: str, scenario: str | None = None) -> float | None:
        return seasonal_benefit_share(self.daily_difference(design, scenario or self.best_scenario(design)))

    # -- reports

    def rows(self) -> list[dict]:
        out = []
        for i, d in enumerate(self.designs):
            best = self.best_scenario(d)
            out.append({
                "design": d,
                **{s: float(self.penalties[i, j]) for j, s in enumerate(self.scenarios)},
                "best_scenario": best,
                "improvement": format_improvement(self.penalties[i, 0], self.penalty(d, best)),
                "best_design_in": [s for s in self.scenarios if self.best_design(s) == d],
            })
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        if self.seed is not None:
            buf.write(f"# seed: {self.seed}\n")
        cols = list(self.variants) + [REFERENCE]
        buf.write("design," + ",".join(cols) + ",imp_pct,best_scenario,best_design_in\n")
        for r in self.rows():
            cells = [f"{r[c]:.1f}" for c in cols]
            buf.write(f"{r['design']}," + ",".join(cells)
                      + f",{r['improvement'].rstrip('%')},{r['best_scenario']},{' '.join(r['best_design_in'])}\n")
        avg = self.averages()
        cells = [f"{avg[self.scenarios.index(c)]:.1f}" for c in cols]
        buf.write("Avg," + ",".join(cells) + f",,{self.best_average()},\n")
        return buf.getvalue()

    def to_text(self) -> str:
        """Aligned table: ``*`` marks each design's best scenario, ``[..]`` the
        best design within each scenario column."""
        cols = list(self.variants) + [REFERENCE]
        width = 11
        head = "Design".ljust(8) + "".join(c.rjust(width) for c in cols) + "Imp".rjust(8)
        lines = [head, "-" * len(head)]
        for r in self.rows():
            cells = []
            for c in cols:
                v = f"{r[c]:.1f}"
                if c in r["best_design_in"]:
                    v = f"[{v}]"
                if c == r["best_scenario"]:
                    v += "*"
                cells.append(v.rjust(width))
            lines.append(r["design"].ljust(8) + "".join(cells) + r["improvement"].rjust(8))
        avg = self.averages()
        cells = []
        for c in cols:
            v = f"{avg[self.scenarios.index(c)]:.1f}"
            cells.append((v + "*" if c == self.best_average() else v).rjust(width))
        lines.append("Avg".ljust(8) + "".join(cells))
        lines.append("* best scenario of the row, [ ] best design in the column")
        if self.seed is not None:
            lines.append(f"seed: {self.seed}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        doc = {
            "reference": REFERENCE,
            "scenarios": list(self.scenarios),
            "designs": self.rows(),
            "averages": {s: round(float(v), 6) for s, v in zip(self.scenarios, self.averages())},
            "best_average_scenario": self.best_average(),
        }
        for r in doc["designs"]:
            for s in self.scenarios:
                r[s] = round(r[s], 6)
            share = self.seasonal_share(r["design"])
            r["warm_season_share"] = None if share is None else round(share, 6)
        if self.seed is not None:
            doc["seed"] = self.seed
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def daily_csv(self, design: str, scenarios=None) -> str:
        """Daily differences to the reference for one design: columns day,
        scenario, signed_diff and normalized_diff (over the reference total)."""
        total = self.penalty(design, REFERENCE)
        buf = io.StringIO()
        if self.seed is not None:
            buf.write(f"# seed: {self.seed}\n")
        buf.write("day,scenario,signed_diff,normalized_diff\n")
        for s in scenarios or self.variants:
            diff = self.daily_difference(design, s)
            for day, v in enumerate(diff, start=1):
                buf.write(f"{day},{s},{v:.6f},{v / total:.9f}\n")
        return buf.getvalue()

    def check_flags(self) -> bool:
        """Recompute the best-of-row and best-of-column flags from the numbers."""
        for i, d in enumerate(self.designs):
            row = self.penalties[i, 1:]
            if self.penalty(d, self.best_scenario(d)) != row.min():
                return False
        for j, s in enumerate(self.scenarios):
            if self.penalty(self.best_design(s), s) != self.penalties[:, j].min():
                return False
        return True


def daily_difference_series(result: ScenarioResult, design: str, scenario: str,
                            reference: str = REFERENCE) -> np.ndarray:
    """Per-day penalty of ``scenario`` minus ``reference``; negative days are a benefit."""
    return result.daily_difference(design, scenario, reference)


def _cell(args):
    plan, control, context = args
    report = context.penalty(plan, control)
    return report.total, report.per_day


def run_experiment(plans, context, scenarios=None, labels=None, jobs: int = 1,
                   seed: int | None = None) -> ScenarioResult:
    """Simulate every plan under the reference and each scenario.

    ``scenarios`` defaults to :func:`builtin_scenarios`; the reference is
    added in front when missing. Unless the context fixes ``substeps``, every
    cell, the reference included, runs at the control resolution so the
    columns differ only by the openings.
    """
    if getattr(context, "substeps", 0) is None:
        context = replace(context, substeps=CONTROL_SUBSTEPS)
    plans = list(plans)
    scen = list(scenarios) if scenarios is not None else builtin_scenarios()
    if SEALED not in scen:
        scen.insert(0, SEALED)
    else:
        scen.remove(SEALED)
        scen.insert(0, SEALED)
    names = [s.name for s in scen]
    if len(set(names)) != len(names):
        raise ValueError("scenario names must be unique")
    labels = tuple(labels) if labels is not None else tuple(f"D{i + 1}" for i in range(len(plans)))
    if len(labels) != len(plans):
        raise ValueError("one label per plan")
    work = [(p, s, context) for p in plans for s in scen]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cells = list(pool.map(_cell, work))
    else:
        cells = [_cell(w) for w in work]
    k = len(scen)
    totals = np.array([c[0] for c in cells]).reshape(len(plans), k)
    daily = np.array([c[1] for c in cells]).reshape(len(plans), k, -1)
    return ScenarioResult(labels, tuple(names), totals, daily, seed)
