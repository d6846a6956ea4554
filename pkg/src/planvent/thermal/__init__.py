"""Multi-zone lumped thermal simulation with stack-driven ventilation."""
from planvent.thermal.constructions import (
    Construction, ConstructionLayer, ConstructionSet, ElementKind, reference_constructions, u_value,
)
from planvent.thermal.model import (
    CAPACITANCE_MULTIPLIER, CP_AIR, CRACK_ACH, OUTDOOR, RHO_AIR, AirLink, LinkKind, Network,
    OpaqueExterior, ThermalModel, ThermalModelError, Zone, build_thermal_model,
)
from planvent.thermal.simulate import (
    BACKEND, CONTROL_SUBSTEPS, DOOR_BASE_MODULATION, SEALED, SUBSTEPS, Sealed, SimulationError, ZoneSeries,
    equilibrium_temperatures, opaque_gains, simulate_year, solar_gains, step_zone_temperatures,
    ventilation_flow,
)

__all__ = [
    "AirLink", "BACKEND", "CAPACITANCE_MULTIPLIER", "CONTROL_SUBSTEPS", "CP_AIR", "CRACK_ACH", "Construction",
    "ConstructionLayer", "ConstructionSet", "DOOR_BASE_MODULATION", "ElementKind", "LinkKind",
    "Network", "OUTDOOR", "OpaqueExterior", "RHO_AIR", "SEALED", "SUBSTEPS", "Sealed", "SimulationError", "ThermalModel",
    "ThermalModelError", "Zone", "ZoneSeries", "build_thermal_model", "equilibrium_temperatures",
    "opaque_gains", "reference_constructions", "simulate_year", "solar_gains", "step_zone_temperatures",
    "u_value", "ventilation_flow",
]
