"""Hamiltonian descriptions of divergence-free fields transverse to a circle fibration.

Subpackages: :mod:`fieldham.core` (domains, angles, Bessel functions,
spectral grids), :mod:`fieldham.fields` (field specifications and
precondition diagnostics), :mod:`fieldham.tracer` (field-line tracing and
section maps). Modules: :mod:`fieldham.clebsch` (Clebsch potentials),
:mod:`fieldham.moser` (fibrewise Moser trick and the Hamiltonian),
:mod:`fieldham.hamiltonian` (the evolution field and dynamics checks),
:mod:`fieldham.io` and :mod:`fieldham.cli`.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import FieldhamError  # noqa: E402
from .estimators import HamiltonianRepresentation, PoincareSection, RotationalTransform, WeylGauge  # noqa: E402

__all__ = [
    "FieldhamError",
    "HamiltonianRepresentation",
    "PoincareSection",
    "RotationalTransform",
    "WeylGauge",
    "__version__",
]
