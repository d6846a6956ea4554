"""Floor plan and design program types with their geometric predicates.

Plans live in a plan-local frame: +y is plan-north, +x is plan-east, rooms are
axis-aligned rectangles with zero-thickness walls. A single ``orientation``
angle (degrees clockwise from true North) and a ``reflected`` flag (mirror
about the plan y-axis, applied before the rotation) place the plan in the
world frame.

Openings are positioned by ``wall_side`` and ``offset``; the offset is measured
along the wall from its lower coordinate (x-min for N/S walls, y-min for E/W
walls).
"""
from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, replace
from functools import cached_property
from enum import Enum
from typing import Iterable

EPS = 1e-6
DEFAULT_CEILING_HEIGHT = 2.7

DOOR_WIDTH = 0.8
DOOR_HEIGHT = 2.0
DOOR_MARGIN = 0.1
#: minimum shared wall length able to host an interior door
DOOR_MIN_SHARED = DOOR_WIDTH + 2 * DOOR_MARGIN

#: half-width of a compass sector used by orientation preferences
SECTOR_HALF_WIDTH = 67.5

PLAN_SCHEMA = "planvent/floorplan"
PROGRAM_SCHEMA = "planvent/design-program"
SCHEMA_VERSION = 1


class SpaceFunction(str, Enum):
    HALL = "Hall"
    CORRIDOR = "Corridor"
    KITCHEN = "Kitchen"
    LIVING_ROOM = "LivingRoom"
    BEDROOM = "Bedroom"
    BATHROOM = "Bathroom"


class OpeningKind(str, Enum):
    WINDOW = "Window"
    INTERIOR_DOOR = "InteriorDoor"
    EXTERIOR_DOOR = "ExteriorDoor"


class Side(str, Enum):
    N = "N"
    S = "S"
    E = "E"
    W = "W"

    @property
    def local_azimuth(self) -> float:
        return {"N": 0.0, "E": 90.0, "S": 180.0, "W": 270.0}[self.value]

    @property
    def opposite(self) -> "Side":
        return {"N": Side.S, "S": Side.N, "E": Side.W, "W": Side.E}[self.value]

    @property
    def horizontal(self) -> bool:
        """True for walls running along x (N and S sides)."""
        return self in (Side.N, Side.S)


COMPASS = {"N": 0.0, "NE": 45.0, "E": 90.0, "SE": 135.0,
           "S": 180.0, "SW": 225.0, "W": 270.0, "NW": 315.0}


class PlanError(ValueError):
    """Invalid plan or program data."""


@dataclass(frozen=True)
class Rect:
    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if not (self.w > 0 and self.h > 0):
            raise PlanError(f"rect dimensions must be positive, got w={self.w}, h={self.h}")

    @property
    def x2(self) -> float:
        return self.x + self.w

    @property
    def y2(self) -> float:
        return self.y + self.h

    @property
    def area(self) -> float:
        return self.w * self.h

    def wall_length(self, side: Side) -> float:
        return self.w if side.horizontal else self.h


@dataclass(frozen=True)
class Space:
    id: str
    function: SpaceFunction
    rect: Rect
    ceiling_height: float = DEFAULT_CEILING_HEIGHT

    def __post_init__(self):
        if self.ceiling_height <= 0:
            raise PlanError(f"space {self.id}: ceiling_height must be positive")
        if not isinstance(self.function, SpaceFunction):
            object.__setattr__(self, "function", SpaceFunction(self.function))

    @property
    def area(self) -> float:
        return self.rect.area


@dataclass(frozen=True)
class Opening:
    id: str
    kind: OpeningKind
    host_space: str
    wall_side: Side
    offset: float
    width: float
    height: float
    sill: float = 0.0
    links_to: str | None = None

    def __post_init__(self):
        if not isinstance(self.kind, OpeningKind):
            object.__setattr__(self, "kind", OpeningKind(self.kind))
        if not isinstance(self.wall_side, Side):
            object.__setattr__(self, "wall_side", Side(self.wall_side))
        if self.width <= 0 or self.height <= 0:
            raise PlanError(f"opening {self.id}: width and height must be positive")

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def on_envelope(self) -> bool:
        return self.kind is not OpeningKind.INTERIOR_DOOR


@dataclass(frozen=True)
class ShadingDevice:
    opening: str
    overhang_depth: float = 0.0
    left_fin_depth: float = 0.0
    right_fin_depth: float = 0.0

    def __post_init__(self):
        if min(self.overhang_depth, self.left_fin_depth, self.right_fin_depth) < 0:
            raise PlanError(f"shading on {self.opening}: depths must be >= 0")


@dataclass(frozen=True)
class FloorPlan:
    """A single-level floor plan.

    Construction does not enforce non-overlap or reachability: search code
    handles infeasible plans and :func:`validate` reports the violations.
    """

    spaces: tuple[Space, ...]
    openings: tuple[Opening, ...] = ()
    shading: tuple[ShadingDevice, ...] = ()
    orientation: float = 0.0
    reflected: bool = False

    def __post_init__(self):
        object.__setattr__(self, "spaces", tuple(self.spaces))
        object.__setattr__(self, "openings", tuple(self.openings))
        object.__setattr__(self, "shading", tuple(self.shading))
        object.__setattr__(self, "orientation", float(self.orientation) % 360.0)
        ids = [s.id for s in self.spaces]
        if len(set(ids)) != len(ids):
            raise PlanError("duplicate space ids")

    @cached_property
    def geometry(self) -> "PlanGeometry":
        return PlanGeometry.of(self.spaces)

    def with_openings(self, openings, shading=None) -> "FloorPlan":
        """Copy with new openings; the room geometry cache carries over."""
        new = replace(self, openings=tuple(openings),
                      shading=self.shading if shading is None else tuple(shading))
        if "geometry" in self.__dict__:
            new.__dict__["geometry"] = self.__dict__["geometry"]
        return new

    def space(self, space_id: str) -> Space:
        for s in self.spaces:
            if s.id == space_id:
                return s
        raise KeyError(space_id)

    def opening(self, opening_id: str) -> Opening:
        for o in self.openings:
            if o.id == opening_id:
                return o
        raise KeyError(opening_id)

    def shading_for(self, opening_id: str) -> ShadingDevice | None:
        for d in self.shading:
            if d.opening == opening_id:
                return d
        return None

    @property
    def floor_area(self) -> float:
        return sum(s.area for s in self.spaces)

    @property
    def windows(self) -> tuple[Opening, ...]:
        return tuple(o for o in self.openings if o.kind is OpeningKind.WINDOW)

    def world_azimuth(self, side: Side) -> float:
        """Outward normal azimuth of a plan-local wall side, degrees from North."""
        az = side.local_azimuth
        if self.reflected:
            az = (360.0 - az) % 360.0
        return (az + self.orientation) % 360.0


@dataclass(frozen=True)
class RequiredSpace:
    function: SpaceFunction
    count: int
    min_floor_area: float
    min_window_width: float = 0.0
    # search bound on the shorter rect side; not a validated requirement
    min_side: float = 0.0

    def __post_init__(self):
        if not isinstance(self.function, SpaceFunction):
            object.__setattr__(self, "function", SpaceFunction(self.function))
        if self.count < 1:
            raise PlanError(f"{self.function.value}: count must be >= 1")
        if self.min_floor_area <= 0:
            raise PlanError(f"{self.function.value}: min_floor_area must be positive")


@dataclass(frozen=True)
class DesignProgram:
    required_spaces: tuple[RequiredSpace, ...]
    connectivity: tuple[tuple[SpaceFunction, SpaceFunction], ...] = ()
    opening_orientation_prefs: tuple[tuple[SpaceFunction, str], ...] = ()
    max_construction_area: float = math.inf
    ceiling_height: float = DEFAULT_CEILING_HEIGHT

    def __post_init__(self):
        object.__setattr__(self, "required_spaces", tuple(self.required_spaces))
        object.__setattr__(
            self, "connectivity",
            tuple((SpaceFunction(a), SpaceFunction(b)) for a, b in self.connectivity))
        prefs = []
        for fn, sector in self.opening_orientation_prefs:
            if sector not in COMPASS:
                raise PlanError(f"unknown compass sector {sector!r}")
            prefs.append((SpaceFunction(fn), sector))
        object.__setattr__(self, "opening_orientation_prefs", tuple(prefs))

    def requirement(self, function: SpaceFunction) -> RequiredSpace | None:
        for r in self.required_spaces:
            if r.function is function:
                return r
        return None

    @property
    def total_min_area(self) -> float:
        return sum(r.count * r.min_floor_area for r in self.required_spaces)

    @property
    def space_count(self) -> int:
        return sum(r.count for r in self.required_spaces)


@dataclass(frozen=True)
class EnvelopeSegment:
    space_id: str
    wall_side: Side
    start: float
    end: float
    azimuth: float

    @property
    def length(self) -> float:
        return self.end - self.start

    @property
    def facing(self) -> str:
        return compass_label(self.azimuth)


@dataclass(frozen=True)
class Violation:
    kind: str
    subject: str
    magnitude: float
    detail: str = ""


# -- geometry ------------------------------------------------------------------

def _rect(obj) -> Rect:
    return obj.rect if isinstance(obj, Space) else obj


def compass_label(azimuth: float) -> str:
    idx = int(math.floor(((azimuth % 360.0) + 22.5) / 45.0)) % 8
    return ["N", "NE", "E", "SE", "S", "SW", "W", "NW"][idx]


def angular_distance(a: float, b: float) -> float:
    d = abs((a - b) % 360.0)
    return min(d, 360.0 - d)


def overlap_area(a: Rect | Space, b: Rect | Space) -> float:
    a, b = _rect(a), _rect(b)
    dx = min(a.x2, b.x2) - max(a.x, b.x)
    dy = min(a.y2, b.y2) - max(a.y, b.y)
    if dx <= EPS or dy <= EPS:
        return 0.0
    return dx * dy


def shared_segment(a: Rect | Space, b: Rect | Space) -> tuple[Side, float, float] | None:
    """Wall of ``a`` touching ``b`` and the contact interval in ``a``'s wall coordinates."""
    a, b = _rect(a), _rect(b)
    if abs(a.x2 - b.x) < EPS or abs(b.x2 - a.x) < EPS:
        lo, hi = max(a.y, b.y), min(a.y2, b.y2)
        if hi - lo > EPS:
            side = Side.E if abs(a.x2 - b.x) < EPS else Side.W
            return side, lo - a.y, hi - a.y
    if abs(a.y2 - b.y) < EPS or abs(b.y2 - a.y) < EPS:
        lo, hi = max(a.x, b.x), min(a.x2, b.x2)
        if hi - lo > EPS:
            side = Side.N if abs(a.y2 - b.y) < EPS else Side.S
            return side, lo - a.x, hi - a.x
    return None


def shared_wall_length(a: Rect | Space, b: Rect | Space) -> float:
    seg = shared_segment(a, b)
    return 0.0 if seg is None else seg[2] - seg[1]


def _subtract(interval: tuple[float, float], cuts: list[tuple[float, float]]):
    pieces = [interval]
    for c0, c1 in sorted(cuts):
        nxt = []
        for p0, p1 in pieces:
            if c1 <= p0 + EPS or c0 >= p1 - EPS:
                nxt.append((p0, p1))
                continue
            if c0 - p0 > EPS:
                nxt.append((p0, c0))
            if p1 - c1 > EPS:
                nxt.append((c1, p1))
        pieces = nxt
    return pieces


def exterior_intervals(plan: FloorPlan, space: Space) -> dict[Side, list[tuple[float, float]]]:
    return plan.geometry.exterior[space.id]


@dataclass(frozen=True)
class PlanGeometry:
    """Pairwise contacts, overlaps and exterior wall stretches of a room set.

    ``contacts[(a, b)]`` holds ``(side of a, lo, hi)`` in a's wall coordinates.
    """

    overlaps: tuple[tuple[str, str, float], ...]
    contacts: dict
    exterior: dict

    @classmethod
    def of(cls, spaces) -> "PlanGeometry":
        boxes = [(s.id, s.rect.x, s.rect.y, s.rect.x + s.rect.w, s.rect.y + s.rect.h, s.rect.w, s.rect.h)
                 for s in spaces]
        overlaps = []
        contacts = {}
        cuts = {b[0]: {Side.N: [], Side.S: [], Side.E: [], Side.W: []} for b in boxes}
        n = len(boxes)
        for i in range(n):
            ia, ax, ay, ax2, ay2, _, _ = boxes[i]
            for j in range(i + 1, n):
                ib, bx, by, bx2, by2, _, _ = boxes[j]
                dx = (ax2 if ax2 < bx2 else bx2) - (ax if ax > bx else bx)
                dy = (ay2 if ay2 < by2 else by2) - (ay if ay > by else by)
                if dx > EPS and dy > EPS:
                    overlaps.append((ia, ib, dx * dy))
                    continue
                if dy > EPS and (abs(ax2 - bx) < EPS or abs(bx2 - ax) < EPS):
                    lo = ay if ay > by else by
                    hi = ay2 if ay2 < by2 else by2
                    sa, sb = (Side.E, Side.W) if abs(ax2 - bx) < EPS else (Side.W, Side.E)
                    ca, cb = (sa, lo - ay, hi - ay), (sb, lo - by, hi - by)
                elif dx > EPS and (abs(ay2 - by) < EPS or abs(by2 - ay) < EPS):
                    lo = ax if ax > bx else bx
                    hi = ax2 if ax2 < bx2 else bx2
                    sa, sb = (Side.N, Side.S) if abs(ay2 - by) < EPS else (Side.S, Side.N)
                    ca, cb = (sa, lo - ax, hi - ax), (sb, lo - bx, hi - bx)
                else:
                    continue
                contacts[(ia, ib)] = ca
                contacts[(ib, ia)] = cb
                cuts[ia][ca[0]].append((ca[1], ca[2]))
                cuts[ib][cb[0]].append((cb[1], cb[2]))
        exterior = {}
        for sid, _, _, _, _, w, h in boxes:
            c = cuts[sid]
            exterior[sid] = {
                side: (_subtract((0.0, w if side is Side.N or side is Side.S else h), c[side])
                       if c[side] else [(0.0, w if side is Side.N or side is Side.S else h)])
                for side in (Side.N, Side.S, Side.E, Side.W)
            }
        return cls(tuple(overlaps), contacts, exterior)


def envelope_sides(plan: FloorPlan) -> list[EnvelopeSegment]:
    out = []
    for space in plan.spaces:
        for side, pieces in exterior_intervals(plan, space).items():
            az = plan.world_azimuth(side)
            out.extend(EnvelopeSegment(space.id, side, p0, p1, az) for p0, p1 in pieces)
    return out


def opening_interval_ok(plan: FloorPlan, opening: Opening, exterior: dict | None = None) -> float:
    """Length of the opening lying outside its admissible wall segment (0 when valid)."""
    geo = plan.geometry
    if opening.host_space not in geo.exterior:
        return opening.width
    o0, o1 = opening.offset, opening.offset + opening.width
    if opening.kind is OpeningKind.INTERIOR_DOOR:
        seg = geo.contacts.get((opening.host_space, opening.links_to))
        allowed = [] if seg is None or seg[0] is not opening.wall_side else [(seg[1], seg[2])]
    else:
        allowed = geo.exterior[opening.host_space][opening.wall_side]
    best = 0.0
    for a0, a1 in allowed:
        best = max(best, min(o1, a1) - max(o0, a0))
    return max(0.0, opening.width - best)


def door_graph(plan: FloorPlan, valid_only: bool = True) -> dict[str, set[str]]:
    graph: dict[str, set[str]] = {s.id: set() for s in plan.spaces}
    for o in plan.openings:
        if o.kind is not OpeningKind.INTERIOR_DOOR or o.links_to is None:
            continue
        if o.host_space not in graph or o.links_to not in graph:
            continue
        if valid_only and opening_interval_ok(plan, o) > EPS:
            continue
        graph[o.host_space].add(o.links_to)
        graph[o.links_to].add(o.host_space)
    return graph


def reachable_from_hall(plan: FloorPlan, graph: dict[str, set[str]] | None = None) -> set[str]:
    graph = door_graph(plan) if graph is None else graph
    halls = [s.id for s in plan.spaces if s.function is SpaceFunction.HALL]
    if not halls:
        return set()
    seen = {halls[0]}
    queue = deque(seen)
    while queue:
        cur = queue.popleft()
        for nxt in sorted(graph[cur]):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def fingerprint(plan: FloorPlan, quantum: float = 0.1) -> tuple:
    """Sorted quantized space rects, translated so the bounding box starts at 0."""
    x0 = min(s.rect.x for s in plan.spaces)
    y0 = min(s.rect.y for s in plan.spaces)
    q = lambda v: int(round(v / quantum))  # noqa: E731
    return tuple(sorted(
        (q(s.rect.x - x0), q(s.rect.y - y0), q(s.rect.w), q(s.rect.h)) for s in plan.spaces))


def bounding_box(plan: FloorPlan) -> Rect:
    x0 = min(s.rect.x for s in plan.spaces)
    y0 = min(s.rect.y for s in plan.spaces)
    x1 = max(s.rect.x2 for s in plan.spaces)
    y1 = max(s.rect.y2 for s in plan.spaces)
    return Rect(x0, y0, x1 - x0, y1 - y0)


# -- requirements --------------------------------------------------------------

def validate(plan: FloorPlan, program: DesignProgram | None = None) -> list[Violation]:
    """List every violated requirement, with magnitudes.

    Without a program only the plan's own invariants are checked: overlaps,
    opening placement and reachability of every space from the hall.
    """
    report: list[Violation] = []
    spaces = plan.spaces
    for a, b, ov in plan.geometry.overlaps:
        report.append(Violation("overlap", f"{a}/{b}", ov))

    bad_openings = set()
    for o in plan.openings:
        miss = opening_interval_ok(plan, o)
        if miss > EPS:
            bad_openings.add(o.id)
            report.append(Violation("opening_placement", o.id, miss,
                                    f"{o.kind.value} outside its wall segment"))

    graph: dict[str, set[str]] = {s.id: set() for s in spaces}
    for o in plan.openings:
        if (o.kind is OpeningKind.INTERIOR_DOOR and o.id not in bad_openings
                and o.links_to in graph and o.host_space in graph):
            graph[o.host_space].add(o.links_to)
            graph[o.links_to].add(o.host_space)
    reached = reachable_from_hall(plan, graph)
    for s in spaces:
        if s.id not in reached:
            report.append(Violation("unreachable", s.id, 1.0, "not reachable from the hall"))

    if program is None:
        return report

    by_function: dict[SpaceFunction, list[Space]] = {}
    for s in spaces:
        by_function.setdefault(s.function, []).append(s)
    for req in program.required_spaces:
        have = by_function.get(req.function, [])
        if len(have) < req.count:
            missing = req.count - len(have)
            report.append(Violation("missing_space", req.function.value, float(missing),
                                    f"{missing} x {req.function.value} missing"))
        for s in have:
            deficit = req.min_floor_area - s.area
            if deficit > EPS:
                report.append(Violation("area_deficit", s.id, deficit))
            if req.min_window_width > 0:
                widths = [o.width for o in plan.openings
                          if o.kind is OpeningKind.WINDOW and o.host_space == s.id
                          and o.id not in bad_openings]
                short = req.min_window_width - max(widths, default=0.0)
                if short > EPS:
                    report.append(Violation("window_width_deficit", s.id, short))
    for fn, same in by_function.items():
        req = program.requirement(fn)
        for s in same[req.count if req is not None else 0:]:
            report.append(Violation("extra_space", s.id, s.area))

    for a_fn, b_fn in program.connectivity:
        partners = {t.id for t in by_function.get(a_fn, [])}
        for s in by_function.get(b_fn, []):
            if not (graph[s.id] & partners):
                report.append(Violation("connectivity", s.id, 1.0,
                                        f"needs a door to a {a_fn.value}"))

    for fn, sector in program.opening_orientation_prefs:
        centre = COMPASS[sector]
        for s in by_function.get(fn, []):
            ok = any(angular_distance(plan.world_azimuth(o.wall_side), centre) <= SECTOR_HALF_WIDTH + EPS
                     for o in plan.openings
                     if o.kind is OpeningKind.WINDOW and o.host_space == s.id
                     and o.id not in bad_openings)
            if not ok:
                report.append(Violation("orientation", s.id, 1.0, f"no window facing {sector}"))

    over = plan.floor_area - program.max_construction_area
    if over > EPS:
        report.append(Violation("over_area", "plan", over))
    return report


def connect_spaces(plan: FloorPlan, program: DesignProgram | None = None) -> FloorPlan:
    """Rebuild the interior doors from the current room geometry.

    Required connections are served first (each space of the second function
    gets a door to its best-contact partner of the first function), then
    doors are added breadth-first until every space that touches a reached
    space is reachable from the hall. Doors are centred on the contact.
    """
    spaces = plan.spaces
    geo = plan.geometry
    contacts = {k: v[2] - v[1] for k, v in geo.contacts.items() if v[2] - v[1] >= DOOR_MIN_SHARED - EPS}

    pairs: list[tuple[str, str]] = []
    linked: set[frozenset] = set()

    def add(host: str, other: str):
        key = frozenset((host, other))
        if key not in linked:
            linked.add(key)
            pairs.append((host, other))

    if program is not None:
        for a_fn, b_fn in program.connectivity:
            for s in spaces:
                if s.function is not b_fn:
                    continue
                options = [(contacts[(s.id, t.id)], t.id) for t in spaces
                           if t.function is a_fn and (s.id, t.id) in contacts]
                if options:
                    options.sort(key=lambda p: (-p[0], p[1]))
                    add(s.id, options[0][1])

    halls = [s.id for s in spaces if s.function is SpaceFunction.HALL]
    if halls:
        while True:
            graph: dict[str, set[str]] = {s.id: set() for s in spaces}
            for h, o in pairs:
                graph[h].add(o)
                graph[o].add(h)
            seen = {halls[0]}
            queue = deque(seen)
            while queue:
                cur = queue.popleft()
                for nxt in sorted(graph[cur]):
                    if nxt not in seen:
                        seen.add(nxt)
                        queue.append(nxt)
            added = False
            for s in spaces:
                if s.id in seen:
                    continue
                options = sorted((-contacts[(s.id, r)], r) for r in seen if (s.id, r) in contacts)
                if options:
                    add(s.id, options[0][1])
                    added = True
                    break
            if not added:
                break

    others = [o for o in plan.openings if o.kind is not OpeningKind.INTERIOR_DOOR]
    doors = []
    for k, (host, other) in enumerate(pairs, start=1):
        side, lo, hi = geo.contacts[(host, other)]
        mid = 0.5 * (lo + hi)
        doors.append(Opening(f"D{k}", OpeningKind.INTERIOR_DOOR, host, side,
                             snap(mid - DOOR_WIDTH / 2, 0.01), DOOR_WIDTH, DOOR_HEIGHT, 0.0, other))
    return plan.with_openings(tuple(others) + tuple(doors))


def snap(value: float, quantum: float = 0.1) -> float:
    """Round to a grid and strip float noise so JSON stays short."""
    return round(round(value / quantum) * quantum, 6)


# -- serialization -------------------------------------------------------------

def _num(v: float):
    v = float(v)
    return int(v) if v.is_integer() and abs(v) < 1e15 else v


def plan_to_dict(plan: FloorPlan) -> dict:
    return {
        "schema": PLAN_SCHEMA,
        "version": SCHEMA_VERSION,
        "orientation": _num(plan.orientation),
        "reflected": plan.reflected,
        "spaces": [
            {"id": s.id, "function": s.function.value,
             "rect": {"x": _num(s.rect.x), "y": _num(s.rect.y), "w": _num(s.rect.w), "h": _num(s.rect.h)},
             "ceiling_height": _num(s.ceiling_height)}
            for s in plan.spaces
        ],
        "openings": [
            {"id": o.id, "kind": o.kind.value, "host_space": o.host_space,
             "wall_side": o.wall_side.value, "offset": _num(o.offset), "width": _num(o.width),
             "height": _num(o.height), "sill": _num(o.sill), "links_to": o.links_to}
            for o in plan.openings
        ],
        "shading": [
            {"opening": d.opening, "overhang_depth": _num(d.overhang_depth),
             "left_fin_depth": _num(d.left_fin_depth), "right_fin_depth": _num(d.right_fin_depth)}
            for d in plan.shading
        ],
    }


def _check_schema(data: dict, schema: str):
    if data.get("schema") != schema:
        raise PlanError(f"expected schema {schema!r}, got {data.get('schema')!r}")
    if data.get("version") != SCHEMA_VERSION:
        raise PlanError(f"unsupported {schema} version {data.get('version')!r}")


def plan_from_dict(data: dict) -> FloorPlan:
    _check_schema(data, PLAN_SCHEMA)
    try:
        spaces = [Space(s["id"], SpaceFunction(s["function"]), Rect(**s["rect"]),
                        s.get("ceiling_height", DEFAULT_CEILING_HEIGHT)) for s in data["spaces"]]
        openings = [Opening(o["id"], OpeningKind(o["kind"]), o["host_space"], Side(o["wall_side"]),
                            o["offset"], o["width"], o["height"], o.get("sill", 0.0), o.get("links_to"))
                    for o in data.get("openings", [])]
        shading = [ShadingDevice(**d) for d in data.get("shading", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise PlanError(f"malformed floor plan: {exc}") from exc
    return FloorPlan(spaces, openings, shading, data.get("orientation", 0.0),
                     bool(data.get("reflected", False)))


def program_to_dict(program: DesignProgram) -> dict:
    return {
        "schema": PROGRAM_SCHEMA,
        "version": SCHEMA_VERSION,
        "required_spaces": [
            {"function": r.function.value, "count": r.count,
             "min_floor_area": _num(r.min_floor_area), "min_window_width": _num(r.min_window_width),
             "min_side": _num(r.min_side)}
            for r in program.required_spaces
        ],
        "connectivity": [[a.value, b.value] for a, b in program.connectivity],
        "opening_orientation_prefs": [[f.value, s] for f, s in program.opening_orientation_prefs],
        "max_construction_area": _num(program.max_construction_area),
        "ceiling_height": _num(program.ceiling_height),
    }


def program_from_dict(data: dict) -> DesignProgram:
    _check_schema(data, PROGRAM_SCHEMA)
    try:
        required = [RequiredSpace(SpaceFunction(r["function"]), int(r["count"]),
                                  float(r["min_floor_area"]), float(r.get("min_window_width", 0.0)),
                                  float(r.get("min_side", 0.0)))
                    for r in data["required_spaces"]]
        return DesignProgram(
            required,
            [tuple(p) for p in data.get("connectivity", [])],
            [tuple(p) for p in data.get("opening_orientation_prefs", [])],
            float(data.get("max_construction_area", math.inf)),
            float(data.get("ceiling_height", DEFAULT_CEILING_HEIGHT)),
        )
    except (KeyError, TypeError) as exc:
        raise PlanError(f"malformed design program: {exc}") from exc


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2) + "\n"


PLAN_KEYS = ("schema", "version", "orientation", "reflected", "spaces", "openings", "shading")


def save_plan(plan: FloorPlan, path, extra: dict | None = None) -> None:
    """Write a plan document; ``extra`` keys (seed, design id...) follow the plan keys."""
    from planvent.io import atomic_write_text

    data = plan_to_dict(plan)
    for key, value in (extra or {}).items():
        if key in PLAN_KEYS:
            raise PlanError(f"extra key {key!r} clashes with the plan schema")
        data[key] = value
    atomic_write_text(path, dumps(data))


def load_plan_document(path) -> tuple[FloorPlan, dict]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    extra = {k: v for k, v in data.items() if k not in PLAN_KEYS}
    return plan_from_dict(data), extra


def load_plan(path) -> FloorPlan:
    return load_plan_document(path)[0]


def load_program(path) -> DesignProgram:
    with open(path, encoding="utf-8") as fh:
        return program_from_dict(json.load(fh))


def iter_space_pairs(plan: FloorPlan) -> Iterable[tuple[Space, Space]]:
    spaces = plan.spaces
    for i, a in enumerate(spaces):
        for b in spaces[i + 1:]:
            yield a, b
