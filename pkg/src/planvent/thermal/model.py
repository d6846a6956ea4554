"""Thermal network of a floor plan: an air node and a mass node per space.

Every space becomes a :class:`Zone` with its envelope surfaces (walls net of
openings, windows, exterior door, roof and ground floor). Shared walls give
interior-wall and interior-door conductances between zones. Air exchange is
carried by :class:`AirLink` objects: one crack per zone to outdoors, one link
per window or exterior door, and one per interior door.

The heavy layers on the room side of the insulation (block walls, roof slab,
floor finish, half of each partition) are lumped into the zone's mass node,
coupled to the air through the inside film. Opaque envelope elements conduct
to outdoors (or the ground) from the mass node through a conductance sized so
that the air-to-outside series path keeps the elements' total U*A, as in the
five-resistance hourly method of ISO 13790; glazing and doors conduct from
the air node.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from planvent.plan import FloorPlan, OpeningKind, validate
from planvent.thermal.constructions import ConstructionSet, ElementKind, reference_constructions

RHO_AIR = 1.2          # kg/m3
CP_AIR = 1005.0        # J/(kg K)
#: effective zone capacitance as a multiple of the air capacitance (furniture, linings)
CAPACITANCE_MULTIPLIER = 15.0
CRACK_ACH = 0.4
OUTDOOR = "Outdoor"


class ThermalModelError(ValueError):
    """The plan cannot be turned into a thermal network."""


class LinkKind(str, enum.Enum):
    CRACK = "Crack"
    WINDOW = "Window"
    DOOR = "Door"


@dataclass(frozen=True)
class Surface:
    kind: ElementKind
    area: float
    u: float
    azimuth: float | None = None     # world azimuth of the outward normal; None if horizontal
    opening: str | None = None
    adjacent: str | None = None      # other zone for interior elements
    inner_capacity: float = 0.0      # J/(m2 K) lumped into the zone mass node
    inner_resistance: float = 0.0    # m2K/W, room air to the mass node

    @property
    def ua(self) -> float:
        return self.u * self.area

    @property
    def massive(self) -> bool:
        return self.inner_capacity > 0.0

    @property
    def u_outer(self) -> float:
        """W/(m2 K) from the conducting node to the far side of the element."""
        if not self.massive:
            return self.u
        r = 1.0 / self.u - self.inner_resistance
        if r <= 0:
            raise ThermalModelError(f"{self.kind.value}: inner resistance exceeds 1/U")
        return 1.0 / r


@dataclass(frozen=True)
class Zone:
    space: str
    function: str
    floor_area: float
    volume: float
    capacitance: float
    surfaces: tuple[Surface, ...]

    def __post_init__(self):
        if self.volume <= 0:
            raise ThermalModelError(f"zone {self.space}: volume must be > 0")
        if self.capacitance < RHO_AIR * CP_AIR * self.volume - 1e-9:
            raise ThermalModelError(f"zone {self.space}: capacitance below the air capacitance")

    def ua(self, *kinds: ElementKind, outdoor_only: bool = True) -> float:
        return sum(s.ua for s in self.surfaces
                   if (not kinds or s.kind in kinds) and (not outdoor_only or s.adjacent is None))

    @property
    def mass_capacitance(self) -> float:
        return sum(s.inner_capacity * s.area for s in self.surfaces)

    @property
    def mass_coupling(self) -> float:
        """W/K between the air and mass nodes."""
        return sum(s.area / s.inner_resistance for s in self.surfaces if s.massive)

    @property
    def opaque_ua(self) -> float:
        """W/K of the heavy elements facing outdoors or the ground."""
        return sum(s.ua for s in self.surfaces if s.massive and s.adjacent is None)

    @property
    def mass_outdoor(self) -> float:
        """W/K from the mass node to the outside.

        Chosen so that, in series with :attr:`mass_coupling`, it gives back
        :attr:`opaque_ua`: all heavy surfaces share one mass node, so the
        per-surface split would let interior walls act as a loss path.
        """
        h_op = self.opaque_ua
        if h_op <= 0.0:
            return 0.0
        h_ms = self.mass_coupling
        if h_ms <= h_op:
            raise ThermalModelError(f"zone {self.space}: mass coupling {h_ms:.3g} W/K does not "
                                    f"exceed the opaque transmittance {h_op:.3g} W/K")
        return 1.0 / (1.0 / h_op - 1.0 / h_ms)

    @property
    def mass_gain_factor(self) -> float:
        """Scales heat injected at the mass node so that its steady share
        reaching the air is the same as through the full element."""
        h_ms = self.mass_coupling
        return (h_ms + self.mass_outdoor) / h_ms if h_ms > 0 else 1.0


@dataclass(frozen=True)
class AirLink:
    kind: LinkKind
    zones: tuple[str, str]     # second entry may be OUTDOOR
    open_area: float = 0.0     # m2 when fully open
    height: float = 0.0        # m, stack height of the opening
    flow: float = 0.0          # m3/s, fixed flow for cracks
    opening: str | None = None

    def __post_init__(self):
        if self.open_area < 0 or self.flow < 0:
            raise ThermalModelError("air link area and flow must be >= 0")


@dataclass(frozen=True)
class GlazedOpening:
    """What the solar calculation needs to know about a window."""

    opening: str
    zone: int
    azimuth: float
    width: float
    height: float
    g_value: float
    overhang: float = 0.0
    left_fin: float = 0.0     # world frame, seen from outside
    right_fin: float = 0.0

    @property
    def area(self) -> float:
        return self.width * self.height


@dataclass(frozen=True)
class OpaqueExterior:
    """An opaque element seen by the sun and the sky (sol-air input)."""

    zone: int
    kind: ElementKind
    area: float
    u_outer: float             # W/(m2 K), turns the sol-air excess into heat at its node
    azimuth: float | None      # None for the roof
    absorptance: float
    emissivity: float
    r_se: float                # m2K/W, outside film
    via_mass: bool


@dataclass(frozen=True, eq=False)
class ThermalModel:
    zones: tuple[Zone, ...]
    links: tuple[AirLink, ...]
    glazing: tuple[GlazedOpening, ...]
    opaque: tuple[OpaqueExterior, ...] = ()

    @property
    def nodes(self) -> int:
        return 2 * len(self.zones)

    @property
    def zone_ids(self) -> list[str]:
        return [z.space for z in self.zones]

    def index(self, space_id: str) -> int:
        for i, z in enumerate(self.zones):
            if z.space == space_id:
                return i
        raise KeyError(space_id)

    def network(self) -> "Network":
        return Network.of(self)


@dataclass(frozen=True, eq=False)
class Network:
    """Dense arrays of a :class:`ThermalModel`, the form the time-march uses.

    Nodes ``0..n-1`` are zone air, ``n..2n-1`` the matching mass nodes. Window
    and door indices refer to air nodes; exterior doors are conduction only
    (kept closed) and so are not part of the opening arrays.
    """

    capacitance: np.ndarray
    volume: np.ndarray            # m3; mass nodes hold no air (inf)
    ua_outdoor: np.ndarray        # W/K, conduction to outdoor air
    ua_ground: np.ndarray         # W/K, ground floor
    crack_flow: np.ndarray        # m3/s per node
    conductance: np.ndarray       # W/K, symmetric node-to-node conduction, zero diagonal
    window_zone: np.ndarray
    window_area: np.ndarray
    window_height: np.ndarray
    door_a: np.ndarray
    door_b: np.ndarray
    door_area: np.ndarray
    door_height: np.ndarray

    @property
    def zones(self) -> int:
        return self.capacitance.size // 2

    @classmethod
    def of(cls, model: ThermalModel) -> "Network":
        n = len(model.zones)
        idx = {z.space: i for i, z in enumerate(model.zones)}
        g = np.zeros((2 * n, 2 * n))
        ua_out = np.zeros(2 * n)
        ua_ground = np.zeros(2 * n)
        for i, z in enumerate(model.zones):
            for s in z.surfaces:
                if s.adjacent is not None:
                    g[i, idx[s.adjacent]] += 0.5 * s.ua   # listed once per side
                    continue
                if s.massive:
                    node, ua = n + i, z.mass_outdoor * s.ua / z.opaque_ua
                else:
                    node, ua = i, s.ua
                if s.kind is ElementKind.GROUND_FLOOR:
                    ua_ground[node] += ua
                else:
                    ua_out[node] += ua
            g[i, n + i] = g[n + i, i] = z.mass_coupling
        g[:n, :n] += g[:n, :n].T.copy()
        crack = np.zeros(2 * n)
        wz, wa, wh, da, db, dA, dh = [], [], [], [], [], [], []
        for link in model.links:
            i = idx[link.zones[0]]
            if link.kind is LinkKind.CRACK:
                crack[i] += link.flow
            elif link.kind is LinkKind.WINDOW:
                wz.append(i)
                wa.append(link.open_area)
                wh.append(link.height)
            elif link.zones[1] != OUTDOOR:
                da.append(i)
                db.append(idx[link.zones[1]])
                dA.append(link.open_area)
                dh.append(link.height)
        # a zone without heavy layers keeps a detached unit mass node
        mass = [z.mass_capacitance or 1.0 for z in model.zones]
        return cls(
            capacitance=np.array([z.capacitance for z in model.zones] + mass),
            volume=np.array([z.volume for z in model.zones] + [np.inf] * n),
            ua_outdoor=ua_out,
            ua_ground=ua_ground,
            crack_flow=crack,
            conductance=g,
            window_zone=np.array(wz, dtype=np.intp),
            window_area=np.array(wa, dtype=float),
            window_height=np.array(wh, dtype=float),
            door_a=np.array(da, dtype=np.intp),
            door_b=np.array(db, dtype=np.intp),
            door_area=np.array(dA, dtype=float),
            door_height=np.array(dh, dtype=float),
        )


def build_thermal_model(plan: FloorPlan, constructions: ConstructionSet | None = None,
                        capacitance_multiplier: float = CAPACITANCE_MULTIPLIER,
                        crack_ach: float = CRACK_ACH) -> ThermalModel:
    """Zones, surfaces and air links of a valid plan."""
    problems = validate(plan)
    if problems:
        v = problems[0]
        raise ThermalModelError(f"plan is not valid: {v.kind} at {v.subject}"
                                + (f" ({len(problems) - 1} more)" if len(problems) > 1 else ""))
    cs = constructions or reference_constructions()
    geo = plan.geometry
    by_space: dict[str, list] = {s.id: [] for s in plan.spaces}
    for o in plan.openings:
        by_space[o.host_space].append(o)
    heights = {s.id: s.ceiling_height for s in plan.spaces}

    zones, links, glazing, opaque = [], [], [], []
    for zi, space in enumerate(plan.spaces):
        h = space.ceiling_height
        surfaces: list[Surface] = []
        for side, pieces in geo.exterior[space.id].items():
            length = sum(b - a for a, b in pieces)
            if length <= 0:
                continue
            az = plan.world_azimuth(side)
            gross = length * h
            for o in by_space[space.id]:
                if o.kind is OpeningKind.INTERIOR_DOOR or o.wall_side is not side:
                    continue
                con = cs.window if o.kind is OpeningKind.WINDOW else cs.exterior_door
                surfaces.append(Surface(con.kind, o.area, con.u, az, o.id))
                gross -= o.area
                if o.kind is OpeningKind.WINDOW:
                    links.append(AirLink(LinkKind.WINDOW, (space.id, OUTDOOR), o.area, o.height,
                                         opening=o.id))
                    glazing.append(_glazed(plan, o, zi, az, con.g_value))
                else:
                    links.append(AirLink(LinkKind.DOOR, (space.id, OUTDOOR), o.area, o.height,
                                         opening=o.id))
            if gross < -1e-9:
                raise ThermalModelError(f"openings exceed the {side.value} wall of {space.id}")
            surfaces.append(_massive(ElementKind.EXTERIOR_WALL, cs, max(gross, 0.0), az))
        for (a, b), (side, lo, hi) in geo.contacts.items():
            if a != space.id:
                continue
            gross = (hi - lo) * min(h, heights[b])
            for o in plan.openings:
                if o.kind is OpeningKind.INTERIOR_DOOR and {o.host_space, o.links_to} == {a, b}:
                    surfaces.append(Surface(ElementKind.INTERIOR_DOOR, o.area, cs.interior_door.u,
                                            opening=o.id, adjacent=b))
                    gross -= o.area
            surfaces.append(_massive(ElementKind.INTERIOR_WALL, cs, max(gross, 0.0), adjacent=b))
        surfaces.append(_massive(ElementKind.ROOF, cs, space.area))
        surfaces.append(_massive(ElementKind.GROUND_FLOOR, cs, space.area))
        volume = space.area * h
        zone = Zone(space.id, space.function.value, space.area, volume,
                    capacitance_multiplier * RHO_AIR * CP_AIR * volume, tuple(surfaces))
        zones.append(zone)
        opaque.extend(_opaque(zi, s, cs, zone.mass_gain_factor) for s in surfaces
                      if s.kind in (ElementKind.EXTERIOR_WALL, ElementKind.ROOF) and s.area > 0)
        links.append(AirLink(LinkKind.CRACK, (space.id, OUTDOOR), flow=crack_ach * volume / 3600.0))
    for o in plan.openings:
        if o.kind is OpeningKind.INTERIOR_DOOR:
            links.append(AirLink(LinkKind.DOOR, (o.host_space, o.links_to), o.area, o.height,
                                 opening=o.id))
    return ThermalModel(tuple(zones), tuple(links), tuple(glazing), tuple(opaque))


def _glazed(plan: FloorPlan, o, zone: int, azimuth: float, g_value: float) -> GlazedOpening:
    dev = plan.shading_for(o.id)
    if dev is None:
        return GlazedOpening(o.id, zone, azimuth, o.width, o.height, g_value)
    left, right = dev.left_fin_depth, dev.right_fin_depth
    if plan.reflected:
        left, right = right, left
    return GlazedOpening(o.id, zone, azimuth, o.width, o.height, g_value,
                         dev.overhang_depth, left, right)


def _massive(kind: ElementKind, cs: ConstructionSet, area: float, azimuth: float | None = None,
             adjacent: str | None = None) -> Surface:
    con = cs.by_kind(kind)
    cap, r_in = con.inner_mass(two_sided=adjacent is not None) if con.layers else (0.0, 0.0)
    return Surface(kind, area, con.u, azimuth, adjacent=adjacent,
                   inner_capacity=cap, inner_resistance=r_in if cap > 0 else 0.0)


def _opaque(zone: int, s: Surface, cs: ConstructionSet, mass_factor: float) -> OpaqueExterior:
    con = cs.by_kind(s.kind)
    outer = con.layers[0]
    u = s.u * mass_factor if s.massive else s.u
    return OpaqueExterior(zone, s.kind, s.area, u, s.azimuth, outer.solar_absorptance,
                          outer.thermal_absorptance, con.films[1], s.massive)
