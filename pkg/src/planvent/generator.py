"""Evolutionary generation of alternative floor plans.

A (mu + lambda) evolution strategy over room rectangles with self-adaptive
mutation steps, where every offspring is polished by a first-improvement local
search over seven moves (translate, resize, swap, align to neighbour, slide
window, resize window, relocate window). Fitness is the weighted design
penalty; a secondary contact-gap term only breaks ties between plans with the
same penalty so that search can see progress toward missing adjacencies.

Every plan with zero design penalty met along the way is archived. The
requested number of designs is drawn from the archive by farthest-point
selection on a coarse room raster, starting from the most compact plan.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from planvent.plan import (
    COMPASS, DOOR_MIN_SHARED, EPS, DesignProgram, FloorPlan, Opening, OpeningKind, Rect, Side,
    Space, SpaceFunction, angular_distance, bounding_box, connect_spaces, exterior_intervals,
    fingerprint, opening_interval_ok, overlap_area, snap, validate,
)

log = logging.getLogger(__name__)

GRID = 0.1
WINDOW_HEIGHT = 1.1
WINDOW_SILL = 1.0
EXTERIOR_DOOR_WIDTH = 0.9
MIN_WINDOW = 0.4
#: default shorter-side bound when a program does not give one
DEFAULT_MIN_SIDE = {
    SpaceFunction.HALL: 1.8, SpaceFunction.CORRIDOR: 1.1, SpaceFunction.KITCHEN: 2.4,
    SpaceFunction.LIVING_ROOM: 3.0, SpaceFunction.BEDROOM: 2.7, SpaceFunction.BATHROOM: 1.6,
}
_POOL_FACTOR = 3
_RASTER = 0.5


class InfeasibleProgramError(ValueError):
    """The design program cannot be satisfied (e.g. area budget too small)."""


class GenerationError(RuntimeError):
    """The search ended without enough zero-penalty designs."""


@dataclass(frozen=True)
class DesignWeights:
    overlap: float = 10.0
    missing_connectivity: float = 10.0
    area_deficit: float = 1.0
    window_width_deficit: float = 1.0
    orientation_mismatch: float = 1.0
    over_area: float = 1.0


@dataclass(frozen=True)
class DesignPenalty:
    overlap: float
    missing_connectivity: float
    area_deficit: float
    window_width_deficit: float
    orientation_mismatch: float
    over_area: float
    total: float


@dataclass(frozen=True)
class SearchConfig:
    population_size: int = 32
    offspring_per_parent: int = 4
    generations: int = 300
    ls_moves_per_individual: int = 500
    seed: int = 7
    target_count: int = 8

    def __post_init__(self):
        for name in ("population_size", "offspring_per_parent", "generations",
                     "ls_moves_per_individual", "target_count"):
            if getattr(self, name) < 1:
                raise ValueError(f"SearchConfig.{name} must be >= 1")


# -- penalty -------------------------------------------------------------------

def design_penalty(plan: FloorPlan, program: DesignProgram,
                   weights: DesignWeights = DesignWeights()) -> DesignPenalty:
    """Scalarize the :func:`validate` report.

    Missing spaces count as an area deficit of their minimum floor area,
    surplus spaces as over-area, misplaced openings as window-width deficit
    and unreachable spaces as missing connections. With positive weights the
    total is zero exactly when the report is empty.
    """
    return _penalty_from_report(validate(plan, program), program, weights)


def _penalty_from_report(report, program, weights) -> DesignPenalty:
    c = dict.fromkeys(("overlap", "conn", "area", "window", "orient", "over"), 0.0)
    for v in report:
        k = v.kind
        if k == "overlap":
            c["overlap"] += v.magnitude
        elif k in ("connectivity", "unreachable"):
            c["conn"] += 1.0
        elif k == "area_deficit":
            c["area"] += v.magnitude
        elif k == "missing_space":
            c["area"] += v.magnitude * program.requirement(SpaceFunction(v.subject)).min_floor_area
        elif k in ("window_width_deficit", "opening_placement"):
            c["window"] += v.magnitude
        elif k == "orientation":
            c["orient"] += 1.0
        elif k in ("over_area", "extra_space"):
            c["over"] += v.magnitude
    total = (weights.overlap * c["overlap"] + weights.missing_connectivity * c["conn"]
             + weights.area_deficit * c["area"] + weights.window_width_deficit * c["window"]
             + weights.orientation_mismatch * c["orient"] + weights.over_area * c["over"])
    return DesignPenalty(c["overlap"], c["conn"], c["area"], c["window"], c["orient"],
                         c["over"], total)


def _contact_gap(a: Rect, b: Rect) -> float:
    dx = max(b.x - a.x2, a.x - b.x2, 0.0)
    dy = max(b.y - a.y2, a.y - b.y2, 0.0)
    ox = min(a.x2, b.x2) - max(a.x, b.x)
    oy = min(a.y2, b.y2) - max(a.y, b.y)
    if dx > EPS and dy > EPS:
        return dx + dy + DOOR_MIN_SHARED
    if dx > EPS:
        return dx + max(0.0, DOOR_MIN_SHARED - oy)
    if dy > EPS:
        return dy + max(0.0, DOOR_MIN_SHARED - ox)
    if ox > EPS and oy > EPS:
        return DOOR_MIN_SHARED
    return max(0.0, DOOR_MIN_SHARED - max(ox, oy))


def _fitness(plan: FloorPlan, program: DesignProgram, weights: DesignWeights) -> tuple[float, float]:
    report = validate(plan, program)
    total = _penalty_from_report(report, program, weights).total
    if total == 0.0:
        return 0.0, 0.0
    by_id = {s.id: s for s in plan.spaces}
    shaping = 0.0
    for v in report:
        if v.kind == "connectivity":
            s = by_id[v.subject]
            need = next(a for a, b in program.connectivity
                        if b is s.function and v.detail.endswith(a.value))
            gaps = [_contact_gap(s.rect, t.rect) for t in plan.spaces if t.function is need]
            shaping += min(gaps, default=10.0)
        elif v.kind == "unreachable":
            s = by_id[v.subject]
            gaps = [_contact_gap(s.rect, t.rect) for t in plan.spaces if t.id != s.id]
            shaping += min(gaps, default=10.0)
    return total, shaping


# -- construction helpers ------------------------------------------------------

def _spec_order(program: DesignProgram) -> list[tuple[str, SpaceFunction]]:
    """Space ids in breadth-first order of the connectivity graph, hall first."""
    functions = [r.function for r in program.required_spaces]
    order: list[SpaceFunction] = []
    start = SpaceFunction.HALL if SpaceFunction.HALL in functions else functions[0]
    frontier = [start]
    while frontier:
        fn = frontier.pop(0)
        if fn in order:
            continue
        order.append(fn)
        for a, b in program.connectivity:
            if a is fn and b not in order:
                frontier.append(b)
            if b is fn and a not in order:
                frontier.append(a)
    order += [f for f in functions if f not in order]
    out = []
    for fn in order:
        req = program.requirement(fn)
        out.extend((f"{fn.value}{k}", fn) for k in range(1, req.count + 1))
    return out


def _min_side(program: DesignProgram, fn: SpaceFunction) -> float:
    req = program.requirement(fn)
    if req is not None and req.min_side > 0:
        return req.min_side
    return DEFAULT_MIN_SIDE.get(fn, 1.5)


def _ceil_grid(v: float) -> float:
    return snap(math.ceil(v / GRID - 1e-9) * GRID)


def _sample_dims(req, min_side: float, rng) -> tuple[float, float]:
    area = req.min_floor_area * rng.uniform(1.0, 1.2)
    short_hi = max(min_side, math.sqrt(area))
    if req.function is SpaceFunction.CORRIDOR:
        short_hi = min(short_hi, min_side + 0.3)
    short = _ceil_grid(rng.uniform(min_side, short_hi))
    long = _ceil_grid(max(area / short, short))
    return (short, long) if rng.random() < 0.5 else (long, short)


def site_side(program: DesignProgram) -> float:
    area = program.max_construction_area
    if not math.isfinite(area):
        area = program.total_min_area * 1.6
    return _ceil_grid(1.4 * math.sqrt(area))


def _attach(rect_w, rect_h, parent: Rect, rng) -> Rect:
    side = int(rng.integers(4))
    contact = DOOR_MIN_SHARED
    if side in (0, 1):  # east / west of parent
        lo, hi = parent.y - rect_h + contact, parent.y2 - contact
        y = snap(rng.uniform(min(lo, hi), max(lo, hi)))
        x = parent.x2 if side == 0 else parent.x - rect_w
    else:
        lo, hi = parent.x - rect_w + contact, parent.x2 - contact
        x = snap(rng.uniform(min(lo, hi), max(lo, hi)))
        y = parent.y2 if side == 2 else parent.y - rect_h
    return Rect(snap(x), snap(y), rect_w, rect_h)


def _local_side_for(sector: str, plan: FloorPlan) -> Side:
    centre = COMPASS[sector]
    return min(Side, key=lambda s: angular_distance(plan.world_azimuth(s), centre))


def _place_windows(plan: FloorPlan, program: DesignProgram, rng) -> FloorPlan:
    prefs = dict(program.opening_orientation_prefs)
    openings = []
    k = 0
    for s in plan.spaces:
        req = program.requirement(s.function)
        if req is None or req.min_window_width <= 0:
            continue
        ext = exterior_intervals(plan, s)
        if s.function in prefs:
            side = _local_side_for(prefs[s.function], plan)
        else:
            side = max(Side, key=lambda sd: (max((b - a for a, b in ext[sd]), default=0.0), sd.value))
        width = snap(req.min_window_width + GRID * int(rng.integers(0, 5)))
        pieces = ext[side] or [(0.0, s.rect.wall_length(side))]
        a, b = max(pieces, key=lambda p: p[1] - p[0])
        offset = snap(max(0.0, 0.5 * (a + b) - width / 2))
        k += 1
        openings.append(Opening(f"W{k}", OpeningKind.WINDOW, s.id, side, offset, width,
                                WINDOW_HEIGHT, WINDOW_SILL))
    return plan.with_openings(openings)


def _refit(plan: FloorPlan, program: DesignProgram) -> FloorPlan:
    """Re-seat openings after room moves: clamp windows into their wall's
    exterior stretch, re-place the entrance door and rebuild interior doors."""
    exterior = {s.id: exterior_intervals(plan, s) for s in plan.spaces}
    windows = []
    for o in plan.openings:
        if o.kind is not OpeningKind.WINDOW:
            continue
        if opening_interval_ok(plan, o, exterior) > EPS:
            pieces = exterior[o.host_space][o.wall_side]
            if pieces:
                o0, o1 = o.offset, o.offset + o.width
                a, b = max(pieces, key=lambda p: (min(o1, p[1]) - max(o0, p[0]), p[1] - p[0]))
                if b - a >= o.width - EPS:
                    o = replace(o, offset=snap(min(max(o.offset, a), b - o.width), 0.01))
        windows.append(o)
    halls = [s for s in plan.spaces if s.function is SpaceFunction.HALL]
    if halls:
        hall = halls[0]
        best = None
        for side in Side:
            for a, b in exterior[hall.id][side]:
                if b - a >= EXTERIOR_DOOR_WIDTH + 0.2 - EPS and (best is None or b - a > best[2] - best[1] + EPS):
                    best = (side, a, b)
        if best is not None:
            side, a, b = best
            windows.append(Opening("X1", OpeningKind.EXTERIOR_DOOR, hall.id, side,
                                   snap(0.5 * (a + b) - EXTERIOR_DOOR_WIDTH / 2, 0.01),
                                   EXTERIOR_DOOR_WIDTH, 2.1, 0.0))
    return connect_spaces(plan.with_openings(windows), program)


def _with_rects(plan: FloorPlan, rects: dict[str, Rect]) -> FloorPlan:
    spaces = tuple(replace(s, rect=rects[s.id]) if s.id in rects else s for s in plan.spaces)
    return replace(plan, spaces=spaces)


# -- seeding -------------------------------------------------------------------

def _child_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *key]))


def _seed_plan(program: DesignProgram, rng) -> FloorPlan:
    order = _spec_order(program)
    side_len = site_side(program)
    centre = side_len / 2
    rects: dict[str, Rect] = {}
    functions: dict[str, SpaceFunction] = {}
    for sid, fn in order:
        req = program.requirement(fn)
        w, h = _sample_dims(req, _min_side(program, fn), rng)
        if not rects:
            rect = Rect(snap(centre - w / 2), snap(centre - h / 2), w, h)
        else:
            parents = [p for p, pfn in functions.items()
                       if (pfn, fn) in program.connectivity or (fn, pfn) in program.connectivity]
            if not parents:
                parents = list(rects)
            best = None
            for _ in range(12):
                parent = rects[parents[int(rng.integers(len(parents)))]]
                cand = _attach(w, h, parent, rng)
                ov = sum(overlap_area(cand, r) for r in rects.values())
                inside = (max(0.0, -cand.x) + max(0.0, -cand.y)
                          + max(0.0, cand.x2 - side_len) + max(0.0, cand.y2 - side_len))
                score = ov + inside
                if best is None or score < best[0] - EPS:
                    best = (score, cand)
            rect = best[1]
        rects[sid] = rect
        functions[sid] = fn
    spaces = tuple(Space(sid, functions[sid], rects[sid], program.ceiling_height) for sid, _ in order)
    plan = FloorPlan(spaces)
    plan = _place_windows(plan, program, rng)
    return _refit(plan, program)


def seed_population(program: DesignProgram, cfg: SearchConfig) -> list[FloorPlan]:
    """Random plans with the exact required space counts, rooms at or above
    their minimum areas, attached to already placed rooms of the functions
    they must connect to. Windows follow orientation preferences and may still
    be misplaced; search repairs them."""
    if not program.required_spaces:
        raise InfeasibleProgramError("design program has no required spaces")
    if program.total_min_area > program.max_construction_area + EPS:
        raise InfeasibleProgramError(
            f"minimum areas sum to {program.total_min_area:.2f} m2, above the maximum "
            f"construction area {program.max_construction_area:.2f} m2")
    return [_seed_plan(program, _child_rng(cfg.seed, 0, i)) for i in range(cfg.population_size)]


# -- local search moves ----------------------------------------------------------

_STEPS = (0.1, 0.2, 0.3, 0.5, 1.0, 2.0)


def _mv_translate(plan, program, rng):
    s = plan.spaces[int(rng.integers(len(plan.spaces)))]
    step = _STEPS[int(rng.integers(len(_STEPS)))] * (1 if rng.random() < 0.5 else -1)
    r = s.rect
    if rng.random() < 0.5:
        r = Rect(snap(r.x + step), r.y, r.w, r.h)
    else:
        r = Rect(r.x, snap(r.y + step), r.w, r.h)
    return _refit(_with_rects(plan, {s.id: r}), program)


def _mv_resize(plan, program, rng):
    s = plan.spaces[int(rng.integers(len(plan.spaces)))]
    lo = _min_side(program, s.function)
    step = _STEPS[int(rng.integers(4))] * (1 if rng.random() < 0.5 else -1)
    r = s.rect
    grow_low = rng.random() < 0.5
    if rng.random() < 0.5:
        w = snap(max(lo, r.w + step))
        x = snap(r.x2 - w) if grow_low else r.x
        r = Rect(x, r.y, w, r.h)
    else:
        h = snap(max(lo, r.h + step))
        y = snap(r.y2 - h) if grow_low else r.y
        r = Rect(r.x, y, r.w, h)
    if r == s.rect:
        return None
    return _refit(_with_rects(plan, {s.id: r}), program)


def _mv_swap(plan, program, rng):
    if len(plan.spaces) < 2:
        return None
    i, j = rng.choice(len(plan.spaces), size=2, replace=False)
    a, b = plan.spaces[int(i)], plan.spaces[int(j)]
    ca = (a.rect.x + a.rect.w / 2, a.rect.y + a.rect.h / 2)
    cb = (b.rect.x + b.rect.w / 2, b.rect.y + b.rect.h / 2)
    ra = Rect(snap(cb[0] - a.rect.w / 2), snap(cb[1] - a.rect.h / 2), a.rect.w, a.rect.h)
    rb = Rect(snap(ca[0] - b.rect.w / 2), snap(ca[1] - b.rect.h / 2), b.rect.w, b.rect.h)
    return _refit(_with_rects(plan, {a.id: ra, b.id: rb}), program)


def _mv_align(plan, program, rng):
    if len(plan.spaces) < 2:
        return None
    i, j = rng.choice(len(plan.spaces), size=2, replace=False)
    s, t = plan.spaces[int(i)], plan.spaces[int(j)]
    r, p = s.rect, t.rect
    side = int(rng.integers(4))
    mode = int(rng.integers(3))
    if side in (0, 1):
        x = p.x2 if side == 0 else p.x - r.w
        if mode == 0:
            y = p.y
        elif mode == 1:
            y = p.y2 - r.h
        else:
            y = min(max(r.y, p.y - r.h + DOOR_MIN_SHARED), p.y2 - DOOR_MIN_SHARED)
        new = Rect(snap(x), snap(y), r.w, r.h)
    else:
        y = p.y2 if side == 2 else p.y - r.h
        if mode == 0:
            x = p.x
        elif mode == 1:
            x = p.x2 - r.w
        else:
            x = min(max(r.x, p.x - r.w + DOOR_MIN_SHARED), p.x2 - DOOR_MIN_SHARED)
        new = Rect(snap(x), snap(y), r.w, r.h)
    if new == r:
        return None
    return _refit(_with_rects(plan, {s.id: new}), program)


def _pick_window(plan, rng):
    wins = [k for k, o in enumerate(plan.openings) if o.kind is OpeningKind.WINDOW]
    if not wins:
        return None, None
    k = wins[int(rng.integers(len(wins)))]
    return k, plan.openings[k]


def _replace_opening(plan, k, new):
    ops = list(plan.openings)
    ops[k] = new
    return plan.with_openings(ops)


def _mv_slide_window(plan, program, rng):
    k, o = _pick_window(plan, rng)
    if o is None:
        return None
    step = _STEPS[int(rng.integers(4))] * (1 if rng.random() < 0.5 else -1)
    wall = plan.space(o.host_space).rect.wall_length(o.wall_side)
    offset = snap(min(max(0.0, o.offset + step), max(0.0, wall - o.width)))
    if offset == o.offset:
        return None
    return _replace_opening(plan, k, replace(o, offset=offset))


def _mv_resize_window(plan, program, rng):
    k, o = _pick_window(plan, rng)
    if o is None:
        return None
    step = (0.1, 0.2, 0.4)[int(rng.integers(3))] * (1 if rng.random() < 0.5 else -1)
    width = snap(max(MIN_WINDOW, o.width + step))
    if width == o.width:
        return None
    return _replace_opening(plan, k, replace(o, width=width))


def _mv_relocate_window(plan, program, rng):
    k, o = _pick_window(plan, rng)
    if o is None:
        return None
    ext = exterior_intervals(plan, plan.space(o.host_space))
    pieces = [(side, a, b) for side in Side for a, b in ext[side] if b - a >= MIN_WINDOW - EPS]
    if not pieces:
        return None
    side, a, b = pieces[int(rng.integers(len(pieces)))]
    width = min(o.width, snap(math.floor((b - a) / GRID + 1e-9) * GRID))
    offset = snap(0.5 * (a + b) - width / 2, 0.01)
    new = replace(o, wall_side=side, offset=offset, width=width)
    if new == o:
        return None
    return _replace_opening(plan, k, new)


MOVES = (
    (_mv_translate, 0.24), (_mv_resize, 0.16), (_mv_swap, 0.08), (_mv_align, 0.22),
    (_mv_slide_window, 0.10), (_mv_resize_window, 0.10), (_mv_relocate_window, 0.10),
)
_MOVE_FUNCS = tuple(m for m, _ in MOVES)
_MOVE_P = np.array([p for _, p in MOVES]) / sum(p for _, p in MOVES)


def local_search(plan: FloorPlan, program: DesignProgram, moves: int, rng,
                 weights: DesignWeights = DesignWeights()) -> FloorPlan:
    """First-improvement local search; never returns a plan with a higher
    design penalty than ``plan``."""
    best = _fitness(plan, program, weights)
    if best[0] == 0.0:
        return plan
    for _ in range(moves):
        move = _MOVE_FUNCS[int(rng.choice(len(_MOVE_FUNCS), p=_MOVE_P))]
        cand = move(plan, program, rng)
        if cand is None:
            continue
        fit = _fitness(cand, program, weights)
        if fit[0] < best[0] - 1e-12 or (abs(fit[0] - best[0]) <= 1e-12 and fit[1] < best[1] - 1e-12):
            plan, best = cand, fit
            if best[0] == 0.0:
                break
    return plan


# -- evolution strategy ----------------------------------------------------------

def _mutate(plan: FloorPlan, program: DesignProgram, sigma: float, rng) -> tuple[FloorPlan, float]:
    n_genes = 4 * len(plan.spaces)
    tau = 1.0 / math.sqrt(2.0 * n_genes)
    sigma = float(min(3.0, max(GRID, sigma * math.exp(tau * rng.standard_normal()))))
    p_gene = min(1.0, 4.0 / n_genes)
    rects = {}
    for s in plan.spaces:
        r = s.rect
        genes = [r.x, r.y, r.w, r.h]
        changed = False
        for g in range(4):
            if rng.random() < p_gene:
                genes[g] = snap(genes[g] + sigma * rng.standard_normal())
                changed = True
        if changed:
            lo = _min_side(program, s.function)
            rects[s.id] = Rect(genes[0], genes[1], snap(max(lo, genes[2])), snap(max(lo, genes[3])))
    if not rects:
        s = plan.spaces[int(rng.integers(len(plan.spaces)))]
        r = s.rect
        rects[s.id] = Rect(snap(r.x + sigma * rng.standard_normal()),
                           snap(r.y + sigma * rng.standard_normal()), r.w, r.h)
    return _refit(_with_rects(plan, rects), program), sigma


def compactness(plan: FloorPlan) -> float:
    """Floor area over bounding-box area; 1.0 for a rectangular footprint."""
    box = bounding_box(plan)
    return plan.floor_area / box.area


def _raster(plan: FloorPlan) -> dict[tuple[int, int], str]:
    box = bounding_box(plan)
    cells = {}
    for s in plan.spaces:
        r = s.rect
        i0 = int(round((r.x - box.x) / _RASTER))
        i1 = int(round((r.x2 - box.x) / _RASTER))
        j0 = int(round((r.y - box.y) / _RASTER))
        j1 = int(round((r.y2 - box.y) / _RASTER))
        for i in range(i0, i1):
            for j in range(j0, j1):
                cells[(i, j)] = s.function.value
    return cells


def _raster_distance(a: dict, b: dict) -> int:
    keys = a.keys() | b.keys()
    return sum(1 for k in keys if a.get(k) != b.get(k))


def _select_diverse(pool: list[FloorPlan], count: int) -> list[FloorPlan]:
    ranked = sorted(pool, key=lambda p: (-round(compactness(p), 9), fingerprint(p)))
    rasters = {id(p): _raster(p) for p in ranked}
    chosen = [ranked[0]]
    while len(chosen) < count:
        best, best_d = None, -1
        for p in ranked:
            if any(p is c for c in chosen):
                continue
            d = min(_raster_distance(rasters[id(p)], rasters[id(c)]) for c in chosen)
            if d > best_d:
                best, best_d = p, d
        chosen.append(best)
    return sorted(chosen, key=lambda p: (-round(compactness(p), 9), fingerprint(p)))


@dataclass
class _Individual:
    plan: FloorPlan
    sigma: float
    fitness: tuple[float, float]
    key: tuple


def run_epsap(program: DesignProgram, cfg: SearchConfig = SearchConfig(),
              weights: DesignWeights = DesignWeights(), history: list | None = None) -> list[FloorPlan]:
    """Generate ``cfg.target_count`` distinct zero-penalty plans, most compact first.

    ``history``, when given, receives the best population fitness of every
    generation (the elitist selection keeps it non-increasing).
    """
    seeds = seed_population(program, cfg)
    pop = []
    for i, plan in enumerate(seeds):
        plan = local_search(plan, program, cfg.ls_moves_per_individual, _child_rng(cfg.seed, 1, i), weights)
        pop.append(_Individual(plan, 1.0, _fitness(plan, program, weights), fingerprint(plan)))
    archive: dict[tuple, FloorPlan] = {}

    def archive_zero(individuals):
        for ind in individuals:
            if ind.fitness[0] == 0.0 and ind.key not in archive:
                archive[ind.key] = ind.plan

    archive_zero(pop)
    pool_target = cfg.target_count * _POOL_FACTOR
    mu = cfg.population_size
    for gen in range(cfg.generations):
        if len(archive) >= pool_target:
            break
        offspring = []
        for i, parent in enumerate(pop):
            for k in range(cfg.offspring_per_parent):
                rng = _child_rng(cfg.seed, 2, gen, i, k)
                child, sigma = _mutate(parent.plan, program, parent.sigma, rng)
                child = local_search(child, program, cfg.ls_moves_per_individual, rng, weights)
                ind = _Individual(child, sigma, _fitness(child, program, weights), fingerprint(child))
                offspring.append(ind)
                archive_zero((ind,))
                if len(archive) >= pool_target:
                    break
            if len(archive) >= pool_target:
                break
        merged: dict[tuple, _Individual] = {}
        for ind in pop + offspring:
            cur = merged.get(ind.key)
            if cur is None or ind.fitness < cur.fitness:
                merged[ind.key] = ind
        pop = sorted(merged.values(), key=lambda d: (d.fitness, d.key))[:mu]
        if history is not None:
            history.append(pop[0].fitness[0])
        log.debug("generation %d: best %.3f, archive %d", gen, pop[0].fitness[0], len(archive))
    if len(archive) < cfg.target_count:
        raise GenerationError(
            f"found {len(archive)} zero-penalty designs, {cfg.target_count} requested; "
            f"best remaining penalty {pop[0].fitness[0]:.3f}")
    pool = sorted(archive.values(), key=fingerprint)
    return _select_diverse(pool, cfg.target_count)
