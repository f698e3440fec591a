"""Field-line tracing, section crossings, return maps and winding numbers."""

from .integrator import METHODS, DenseStep, IntegrationStats, integrate
from .tracing import (
    DEFAULT_ATOL,
    DEFAULT_RTOL,
    Crossing,
    CrossingTable,
    SectionMap,
    Trajectory,
    WindingResult,
    crossing_table,
    crossings,
    monodromy,
    return_map,
    rotational_transform,
    section_orbits,
    section_seeds,
    trace,
)

__all__ = [name for name in dir() if not name.startswith("_")]
