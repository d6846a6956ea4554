"""Sequential (coordinate-wise) optimization of plan geometry.

Each design variable has a short list of absolute candidate values. A sweep
visits the variables in a fixed order, tries every candidate of the current
variable with the others frozen, and keeps the best one if it strictly
lowers the penalty. Passes repeat until nothing is accepted or the pass cap
is reached. Candidates that would break the plan (or the program) are
skipped.
"""
from __future__ import annotations

import enum
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from planvent.plan import (
    EPS, DesignProgram, FloorPlan, OpeningKind, Rect, ShadingDevice, Side, connect_spaces, validate,
)

log = logging.getLogger(__name__)

ORIENTATIONS = tuple(float(a) for a in range(0, 360, 45))
WINDOW_HEIGHTS = (0.9, 1.1, 1.3, 1.5)
WALL_SHIFTS = (-0.6, -0.3, 0.0, 0.3, 0.6)
SHADING_DEPTHS = (0.0, 0.3, 0.6, 0.9)
GRID_STEPS = 5
MIN_WINDOW_WIDTH = 0.4
MAX_PASSES = 3


class VariableKind(str, enum.Enum):
    ORIENTATION = "Orientation"
    REFLECTION = "Reflection"
    OPENING_OFFSET = "OpeningOffset"
    OPENING_WIDTH = "OpeningWidth"
    OPENING_HEIGHT = "OpeningHeight"
    INTERIOR_WALL = "InteriorWallPosition"
    OVERHANG = "OverhangDepth"
    FIN = "FinDepth"



@dataclass(frozen=True)
class DesignVariable:
    """One coordinate of the search.

    ``target`` names the element: ``plan`` for orientation and reflection, an
    opening id for window and overhang variables, ``<window>:left`` or
    ``<window>:right`` for fins, and ``<space>|<space>`` for a shared wall.
    """

    kind: VariableKind
    target: str
    domain: tuple
    unit: str = "m"

    def __post_init__(self):
        if not self.domain:
            raise ValueError(f"{self.kind.value} {self.target}: empty candidate list")

    @property
    def label(self) -> str:
        return f"{self.kind.value}:{self.target}"


# -- reading and writing variables --------------------------------------------------

def _stretch(plan: FloorPlan, opening) -> tuple[float, float] | None:
    """The exterior wall stretch holding ``opening``."""
    mid = opening.offset + 0.5 * opening.width
    for a, b in plan.geometry.exterior[opening.host_space][opening.wall_side]:
        if a - EPS <= mid <= b + EPS:
            return a, b
    return None


def _wall_parts(target: str) -> tuple[str, str]:
    a, b = target.split("|")
    return a, b


def _edge(rect: Rect, side: Side) -> float:
    return {Side.E: rect.x2, Side.W: rect.x, Side.N: rect.y2, Side.S: rect.y}[side]


def current_value(plan: FloorPlan, var: DesignVariable):
    k = var.kind
    if k is VariableKind.ORIENTATION:
        return plan.orientation
    if k is VariableKind.REFLECTION:
        return plan.reflected
    if k is VariableKind.INTERIOR_WALL:
        a, b = _wall_parts(var.target)
        side = plan.geometry.contacts[(a, b)][0]
        return round(_edge(plan.space(a).rect, side), 2)
    if k is VariableKind.FIN:
        oid, which = var.target.split(":")
        dev = plan.shading_for(oid)
        if dev is None:
            return 0.0
        return dev.left_fin_depth if which == "left" else dev.right_fin_depth
    if k is VariableKind.OVERHANG:
        dev = plan.shading_for(var.target)
        return 0.0 if dev is None else dev.overhang_depth
    o = plan.opening(var.target)
    return {VariableKind.OPENING_OFFSET: o.offset, VariableKind.OPENING_WIDTH: o.width,
            VariableKind.OPENING_HEIGHT: o.height}[k]


def _set_shading(plan: FloorPlan, oid: str, **depths) -> FloorPlan:
    devices = list(plan.shading)
    for i, d in enumerate(devices):
        if d.opening == oid:
            devices[i] = replace(d, **depths)
            break
    else:
        devices.append(ShadingDevice(oid, **depths))
        devices.sort(key=lambda d: d.opening)
    return plan.with_openings(plan.openings, devices)


def _move_wall(plan: FloorPlan, a: str, b: str, coord: float, program) -> FloorPlan | None:
    contact = plan.geometry.contacts.get((a, b))
    if contact is None:
        return None
    side = contact[0]
    ra, rb = plan.space(a).rect, plan.space(b).rect
    try:
        if side is Side.E:
            new = {a: Rect(ra.x, ra.y, coord - ra.x, ra.h), b: Rect(coord, rb.y, rb.x2 - coord, rb.h)}
        elif side is Side.W:
            new = {a: Rect(coord, ra.y, ra.x2 - coord, ra.h), b: Rect(rb.x, rb.y, coord - rb.x, rb.h)}
        elif side is Side.N:
            new = {a: Rect(ra.x, ra.y, ra.w, coord - ra.y), b: Rect(rb.x, coord, rb.w, rb.y2 - coord)}
        else:
            new = {a: Rect(ra.x, coord, ra.w, ra.y2 - coord), b: Rect(rb.x, rb.y, rb.w, coord - rb.y)}
    except ValueError:
        return None
    old = {a: ra, b: rb}
    spaces = tuple(replace(s, rect=new[s.id]) if s.id in new else s for s in plan.spaces)
    openings = []
    for o in plan.openings:
        if o.host_space in new and o.kind is not OpeningKind.INTERIOR_DOOR:
            shift = (new[o.host_space].x - old[o.host_space].x if o.wall_side.horizontal
                     else new[o.host_space].y - old[o.host_space].y)
            o = replace(o, offset=round(o.offset - shift, 2))
        openings.append(o)
    moved = replace(plan, spaces=spaces, openings=tuple(openings))
    return connect_spaces(moved, program)


def apply_variable(plan: FloorPlan, var: DesignVariable, value,
                   program: DesignProgram | None = None) -> FloorPlan | None:
    """The plan with ``var`` set to ``value``, or None if that plan is invalid."""
    k = var.kind
    if k is VariableKind.ORIENTATION:
        new = replace(plan, orientation=float(value))
    elif k is VariableKind.REFLECTION:
        new = replace(plan, reflected=bool(value))
    elif k is VariableKind.INTERIOR_WALL:
        a, b = _wall_parts(var.target)
        new = _move_wall(plan, a, b, float(value), program)
    elif k is VariableKind.OVERHANG:
        new = _set_shading(plan, var.target, overhang_depth=float(value))
    elif k is VariableKind.FIN:
        oid, which = var.target.split(":")
        new = _set_shading(plan, oid, **{f"{which}_fin_depth": float(value)})
    else:
        o = plan.opening(var.target)
        if k is VariableKind.OPENING_OFFSET:
            o2 = replace(o, offset=float(value))
        elif k is VariableKind.OPENING_HEIGHT:
            o2 = replace(o, height=float(value))
        else:
            stretch = _stretch(plan, o)
            if stretch is None:
                return None
            width = float(value)
            centre = o.offset + 0.5 * o.width
            offset = min(max(stretch[0], centre - 0.5 * width), stretch[1] - width)
            o2 = replace(o, width=width, offset=round(offset, 2))
        new = plan.with_openings(tuple(o2 if x.id == o.id else x for x in plan.openings))
    if new is None or validate(new, program):
        return None
    return new


def _even(lo: float, hi: float, steps: int = GRID_STEPS) -> tuple[float, ...]:
    if hi < lo - EPS:
        return ()
    vals = np.linspace(lo, max(lo, hi), steps)
    return tuple(sorted({round(float(v), 2) for v in vals}))


def _feasible(plan, var, values, program) -> tuple:
    cur = current_value(plan, var)
    keep = []
    for v in values:
        if v == cur or apply_variable(plan, var, v, program) is not None:
            keep.append(v)
    return tuple(keep)


def _movable_walls(plan: FloorPlan) -> list[tuple[str, str]]:
    """Shared walls whose two sides touch no third space."""
    contacts = plan.geometry.contacts
    touching: dict[tuple[str, Side], set[str]] = {}
    for (a, b), (side, _, _) in contacts.items():
        touching.setdefault((a, side), set()).add(b)
    out = []
    for (a, b), (side, _, _) in sorted(contacts.items()):
        if a < b and touching[(a, side)] == {b} and touching[(b, side.opposite)] == {a}:
            out.append((a, b))
    return out


def extract_variables(plan: FloorPlan, program: DesignProgram | None = None) -> list[DesignVariable]:
    """Design variables of ``plan`` in sweep order, with feasible candidate lists.

    Every candidate applied alone to ``plan`` gives a valid plan (and one that
    meets ``program`` if given). Variables left with a single feasible value
    are dropped.
    """
    out: list[DesignVariable] = []

    def add(kind, target, values, unit="m"):
        var = DesignVariable(kind, target, (current_value(plan, DesignVariable(kind, target, (0,))),))
        dom = _feasible(plan, var, values, program)
        if len(dom) > 1:
            out.append(DesignVariable(kind, target, dom, unit))

    add(VariableKind.ORIENTATION, "plan", ORIENTATIONS, "deg")
    add(VariableKind.REFLECTION, "plan", (False, True), "bool")
    windows = sorted(plan.windows, key=lambda o: o.id)
    for o in windows:
        stretch = _stretch(plan, o)
        if stretch is None:
            continue
        add(VariableKind.OPENING_OFFSET, o.id, _even(stretch[0], stretch[1] - o.width))
        req = program.requirement(plan.space(o.host_space).function) if program else None
        lo = req.min_window_width if req is not None and req.min_window_width > 0 else MIN_WINDOW_WIDTH
        add(VariableKind.OPENING_WIDTH, o.id, _even(lo, stretch[1] - stretch[0]))
        add(VariableKind.OPENING_HEIGHT, o.id, WINDOW_HEIGHTS)
    for a, b in _movable_walls(plan):
        side = plan.geometry.contacts[(a, b)][0]
        c = _edge(plan.space(a).rect, side)
        add(VariableKind.INTERIOR_WALL, f"{a}|{b}", tuple(round(c + d, 2) for d in WALL_SHIFTS))
    for o in windows:
        add(VariableKind.OVERHANG, o.id, SHADING_DEPTHS)
        add(VariableKind.FIN, f"{o.id}:left", SHADING_DEPTHS)
        add(VariableKind.FIN, f"{o.id}:right", SHADING_DEPTHS)
    return out


# -- sweep ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TraceStep:
    variable: str
    old: object
    new: object
    before: float
    after: float
    sweep_pass: int


@dataclass
class OptimizationTrace:
    initial: float
    final: float
    steps: list[TraceStep] = field(default_factory=list)
    passes: int = 0
    evaluations: int = 0

    def to_dict(self) -> dict:
        return {
            "initial_penalty": round(self.initial, 6),
            "final_penalty": round(self.final, 6),
            "passes": self.passes,
            "evaluations": self.evaluations,
            "steps": [{"variable": s.variable, "old": s.old, "new": s.new,
                       "penalty_before": round(s.before, 6), "penalty_after": round(s.after, 6),
                       "pass": s.sweep_pass} for s in self.steps],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


class CachedEvaluator:
    """Memoizes an evaluator on the plan value; counts real evaluations."""

    def __init__(self, fn):
        self.fn = fn
        self.cache: dict[FloorPlan, float] = {}
        self.calls = 0

    def __call__(self, plan: FloorPlan) -> float:
        hit = self.cache.get(plan)
        if hit is None:
            self.calls += 1
            hit = float(self.fn(plan))
            self.cache[plan] = hit
        return hit


def sweep(plan: FloorPlan, variables, evaluator, program: DesignProgram | None = None,
          max_passes: int = MAX_PASSES) -> tuple[FloorPlan, OptimizationTrace]:
    """Greedy coordinate sweeps with strict-improvement acceptance.

    Ties between candidates go to the earlier one in the candidate list and
    ties with the incumbent keep the incumbent.
    """
    ev = evaluator if isinstance(evaluator, CachedEvaluator) else CachedEvaluator(evaluator)
    start_calls = ev.calls
    best = ev(plan)
    trace = OptimizationTrace(best, best)
    for p in range(1, max_passes + 1):
        trace.passes = p
        accepted = False
        for var in variables:
            cur = current_value(plan, var)
            choice = None
            for v in var.domain:
                if v == cur:
                    continue
                cand = apply_variable(plan, var, v, program)
                if cand is None:
                    continue
                score = ev(cand)
                if score < best and (choice is None or score < choice[0]):
                    choice = (score, v, cand)
            if choice is not None:
                trace.steps.append(TraceStep(var.label, cur, choice[1], best, choice[0], p))
                best, plan = choice[0], choice[2]
                accepted = True
                log.debug("pass %d: %s %s -> %s, penalty %.2f", p, var.label, cur, choice[1], best)
        if not accepted:
            break
    trace.final = best
    trace.evaluations = ev.calls - start_calls
    return plan, trace


# -- many designs --------------------------------------------------------------------

@dataclass
class OptimizedDesign:
    index: int                 # position in the input list
    plan: FloorPlan
    trace: OptimizationTrace
    rank: int = 0

    @property
    def penalty(self) -> float:
        return self.trace.final


def _optimize_one(args) -> tuple[FloorPlan, OptimizationTrace]:
    plan, context, program, max_passes = args
    ev = CachedEvaluator(lambda p: context.penalty(p).total)
    variables = extract_variables(plan, program)
    return sweep(plan, variables, ev, program, max_passes)


def optimize_designs(plans, context, program: DesignProgram | None = None, jobs: int = 1,
                     max_passes: int = MAX_PASSES) -> list[OptimizedDesign]:
    """Sweep every plan in the sealed reference mode and rank them by final penalty."""
    work = [(p, context, program, max_passes) for p in plans]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_optimize_one, work))
    else:
        results = [_optimize_one(w) for w in work]
    designs = [OptimizedDesign(i, p, t) for i, (p, t) in enumerate(results)]
    designs.sort(key=lambda d: (d.penalty, d.index))
    for r, d in enumerate(designs, start=1):
        d.rank = r
    return designs
