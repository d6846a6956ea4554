"""Building elements, layer data and U-values of the reference construction."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

#: surface film resistances (m2K/W): (inside, outside)
FILMS_WALL = (0.13, 0.04)
FILMS_ROOF = (0.10, 0.04)
FILMS_INTERIOR = (0.13, 0.13)
FILMS_FLOOR = (0.17, 0.0)
#: computed U-values further than this from the reference value are replaced by it
U_OVERRIDE_TOLERANCE = 0.15
#: layers at or below this conductivity (W/(m K)) count as insulation
INSULATING_CONDUCTIVITY = 0.06


class ElementKind(str, enum.Enum):
    EXTERIOR_WALL = "ExteriorWall"
    INTERIOR_WALL = "InteriorWall"
    CEILING_SLAB = "CeilingSlab"
    ROOF = "Roof"
    GROUND_FLOOR = "GroundFloor"
    EXTERIOR_DOOR = "ExteriorDoor"
    INTERIOR_DOOR = "InteriorDoor"
    WINDOW = "Window"


@dataclass(frozen=True)
class ConstructionLayer:
    name: str
    thickness: float          # m
    conductivity: float       # W/(m K)
    density: float = 0.0      # kg/m3
    specific_heat: float = 0.0  # J/(kg K)
    thermal_absorptance: float = 0.9
    solar_absorptance: float = 0.7
    visible_absorptance: float = 0.7

    def __post_init__(self):
        if self.thickness <= 0:
            raise ValueError(f"layer {self.name!r}: thickness must be > 0")
        if self.conductivity <= 0:
            raise ValueError(f"layer {self.name!r}: conductivity must be > 0")
        for a in (self.thermal_absorptance, self.solar_absorptance, self.visible_absorptance):
            if not 0.0 <= a <= 1.0:
                raise ValueError(f"layer {self.name!r}: absorptances must lie in [0, 1]")

    @property
    def resistance(self) -> float:
        return self.thickness / self.conductivity


def u_value(layers, films: tuple[float, float] = FILMS_WALL) -> float:
    """Steady-state transmittance: 1/U = R_si + sum(d/k) + R_se."""
    layers = list(layers)
    if not layers:
        raise ValueError("u_value needs at least one layer")
    r = films[0] + films[1]
    for layer in layers:
        if layer.conductivity <= 0:
            raise ValueError(f"layer {layer.name!r}: conductivity must be > 0")
        r += layer.thickness / layer.conductivity
    return 1.0 / r


@dataclass(frozen=True)
class Construction:
    """An opaque layer stack, or a glazing described by (U, g, VT).

    ``u`` is the value used by the simulator: the layer-computed U unless it
    misses ``reference_u`` by more than 15 %, in which case the reference wins.
    """

    kind: ElementKind
    layers: tuple[ConstructionLayer, ...] = ()
    films: tuple[float, float] = FILMS_WALL
    reference_u: float | None = None
    g_value: float = 0.0
    visible_transmittance: float = 0.0
    u: float = field(init=False)

    def __post_init__(self):
        if not 0.0 <= self.g_value <= 1.0:
            raise ValueError("g_value must lie in [0, 1]")
        if self.layers:
            computed = u_value(self.layers, self.films)
            ref = self.reference_u
            if ref is not None and abs(computed - ref) > U_OVERRIDE_TOLERANCE * ref:
                computed = ref
        elif self.reference_u is not None:
            computed = self.reference_u
        else:
            raise ValueError(f"{self.kind.value}: needs layers or a reference U-value")
        object.__setattr__(self, "u", computed)

    @property
    def computed_u(self) -> float | None:
        return u_value(self.layers, self.films) if self.layers else None

    @property
    def overridden(self) -> bool:
        return bool(self.layers) and self.u != self.computed_u

    def inner_mass(self, two_sided: bool = False) -> tuple[float, float]:
        """Heat capacity (J/(m2 K)) of the layers on the room side of the
        innermost insulation, and the resistance (m2K/W) from the room air to
        the middle of that mass.

        Layers run from outside to inside. An element with room air on both
        sides (``two_sided``) shares its whole stack equally between them.
        """
        layers = list(self.layers)
        cut = max((i for i, l in enumerate(layers) if l.conductivity <= INSULATING_CONDUCTIVITY),
                  default=-1)
        mass = layers[cut + 1:]
        cap = sum(l.thickness * l.density * l.specific_heat for l in mass)
        r = sum(l.resistance for l in mass)
        share = 0.5 if two_sided else 1.0
        return share * cap, self.films[0] + 0.5 * share * r


def _layer(name, t_cm, k, rho, cp, sa):
    return ConstructionLayer(name, t_cm / 100.0, k, rho, cp, 0.9, sa, sa)


INSULATION = lambda t: _layer("Insulation", t, 0.04, 32.0, 836.8, 0.50)  # noqa: E731
HW_CONCRETE = _layer("High weight concrete", 20.0, 1.73, 2242.6, 836.8, 0.65)
GYPSUM = _layer("Plaster (gypsum)", 2.0, 0.22, 950.0, 840.0, 0.60)
HARDWOOD_DOOR = _layer("Hardwood", 0.5, 0.16, 720.8, 1255.2, 0.78)


@dataclass(frozen=True)
class ConstructionSet:
    exterior_wall: Construction
    interior_wall: Construction
    ceiling_slab: Construction
    roof: Construction
    ground_floor: Construction
    exterior_door: Construction
    interior_door: Construction
    window: Construction

    def by_kind(self, kind: ElementKind) -> Construction:
        return getattr(self, kind.name.lower())


def reference_constructions() -> ConstructionSet:
    """The reference envelope of a single-storey dwelling (Portuguese regulation level).

    The slab construction is kept for completeness; a single storey has a
    roof above and a ground floor below every zone.
    """
    return ConstructionSet(
        exterior_wall=Construction(ElementKind.EXTERIOR_WALL, (
            INSULATION(8.0),
            _layer("Concrete block", 15.0, 1.73, 2242.6, 836.8, 0.65),
            GYPSUM), FILMS_WALL, 0.43),
        interior_wall=Construction(ElementKind.INTERIOR_WALL, (
            GYPSUM, _layer("Concrete block", 7.0, 1.73, 2242.6, 836.8, 0.65), GYPSUM),
            FILMS_INTERIOR, 2.17),
        ceiling_slab=Construction(ElementKind.CEILING_SLAB, (
            HW_CONCRETE, _layer("Hardwood", 3.0, 0.20, 825.0, 2385.0, 0.78)),
            FILMS_INTERIOR, 2.60),
        roof=Construction(ElementKind.ROOF, (
            _layer("Slag", 1.5, 1.44, 881.0, 1673.6, 0.55),
            _layer("Felt and membrane", 1.0, 0.19, 1121.3, 1673.6, 0.75),
            _layer("Dense insulation", 10.0, 0.04, 91.3, 836.8, 0.50),
            HW_CONCRETE, GYPSUM), FILMS_ROOF, 0.37),
        ground_floor=Construction(ElementKind.GROUND_FLOOR, (
            HW_CONCRETE, INSULATION(8.0),
            _layer("Lime plaster", 2.0, 0.80, 1600.0, 840.0, 0.50),
            _layer("Hardwood", 1.5, 0.20, 825.0, 2385.0, 0.78)), FILMS_FLOOR),
        exterior_door=Construction(ElementKind.EXTERIOR_DOOR, (
            INSULATION(1.0), _layer("Hardwood", 1.0, 0.20, 825.0, 2385.0, 0.78)),
            FILMS_WALL, 2.86),
        interior_door=Construction(ElementKind.INTERIOR_DOOR, (
            HARDWOOD_DOOR, _layer("Chipboard", 3.0, 0.07, 430.0, 1260.0, 0.78), HARDWOOD_DOOR),
            FILMS_INTERIOR, 1.36),
        window=Construction(ElementKind.WINDOW, reference_u=2.60, g_value=0.63,
                            visible_transmittance=0.70),
    )
