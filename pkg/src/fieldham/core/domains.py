"""Planar fibre domains: the disk and the annulus."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, InvalidArgumentError

BOUNDARY_RTOL = 1e-12


class Location(str, enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class Disk:
    """The closed disk of radius ``R`` centred at the origin."""

    R: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.R) and self.R > 0):
            raise InvalidArgumentError(f"disk radius must be positive and finite, got {self.R!r}")

    kind = "disk"

    @property
    def r_inner(self) -> float:
        return 0.0

    @property
    def r_outer(self) -> float:
        return float(self.R)

    @property
    def area(self) -> float:
        return float(np.pi * self.R**2)

    @property
    def diameter(self) -> float:
        return 2.0 * self.R

    @property
    def boundary_radii(self) -> tuple[float, ...]:
        return (float(self.R),)


@dataclass(frozen=True)
class Annulus:
    """The closed annulus ``r0 <= sqrt(x^2 + y^2) <= r1``."""

    r0: float = 1.0
    r1: float = 2.0

    def __post_init__(self):
        if not (np.isfinite(self.r0) and np.isfinite(self.r1) and 0 < self.r0 < self.r1):
            raise InvalidArgumentError(f"annulus needs 0 < r0 < r1, got r0={self.r0!r}, r1={self.r1!r}")

    kind = "annulus"

    @property
    def r_inner(self) -> float:
        return float(self.r0)

    @property
    def r_outer(self) -> float:
        return float(self.r1)

    @property
    def area(self) -> float:
        return float(np.pi * (self.r1**2 - self.r0**2))

    @property
    def diameter(self) -> float:
        return 2.0 * self.r1

    @property
    def boundary_radii(self) -> tuple[float, ...]:
        return (float(self.r0), float(self.r1))


FibreDomain = Disk | Annulus


def boundary_tolerance(domain: FibreDomain) -> float:
    return BOUNDARY_RTOL * domain.diameter


def signed_distance(domain: FibreDomain, x, y):
    """Distance to the boundary, positive inside and negative outside."""
    r = np.hypot(x, y)
    d = domain.r_outer - r
    if isinstance(domain, Annulus):
        d = np.minimum(d, r - domain.r0)
    return d


def classify(domain: FibreDomain, x, y) -> np.ndarray:
    """Vectorised :func:`contains` returning an array of :class:`Location` values."""
    d = np.asarray(signed_distance(domain, x, y))
    tol = boundary_tolerance(domain)
    out = np.full(d.shape, Location.INTERIOR, dtype=object)
    out[np.abs(d) <= tol] = Location.BOUNDARY
    out[d < -tol] = Location.OUTSIDE
    return out


def contains(domain: FibreDomain, x: float, y: float) -> Location:
    """Classify a point as interior, boundary or outside.

    Points within ``1e-12 * diameter`` of the boundary count as boundary.
    """
    d = float(signed_distance(domain, x, y))
    tol = boundary_tolerance(domain)
    if abs(d) <= tol:
        return Location.BOUNDARY
    return Location.INTERIOR if d > 0 else Location.OUTSIDE


def boundary_normal(domain: FibreDomain, x: float, y: float) -> np.ndarray:
    """Outward unit normal at a boundary point.

    On the inner circle of an annulus the outward normal points toward the
    centre.
    """
    if contains(domain, x, y) is not Location.BOUNDARY:
        raise InvalidArgumentError(f"point ({x!r}, {y!r}) is not on the boundary")
    r = float(np.hypot(x, y))
    radial = np.array([x / r, y / r])
    if isinstance(domain, Annulus) and abs(r - domain.r0) <= abs(r - domain.r1):
        return -radial
    return radial


def project_to_boundary(domain: FibreDomain, x, y):
    """Radially project points onto the nearest boundary circle."""
    r = np.hypot(x, y)
    target = np.full_like(r, domain.r_outer)
    if isinstance(domain, Annulus):
        target = np.where(np.abs(r - domain.r0) < np.abs(r - domain.r1), domain.r0, domain.r1)
    scale = target / r
    return x * scale, y * scale


def boundary_points(domain: FibreDomain, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``n`` equally spaced points on each boundary circle.

    Returns ``x, y`` and the outward normals stacked as an ``(m, 2)`` array.
    """
    theta = 2.0 * np.pi * np.arange(n) / n
    xs, ys, normals = [], [], []
    for radius in domain.boundary_radii:
        sign = -1.0 if isinstance(domain, Annulus) and radius == domain.r0 else 1.0
        xs.append(radius * np.cos(theta))
        ys.append(radius * np.sin(theta))
        normals.append(sign * np.column_stack([np.cos(theta), np.sin(theta)]))
    return np.concatenate(xs), np.concatenate(ys), np.concatenate(normals)


def check_inside(domain: FibreDomain, x, y) -> None:
    """Raise :class:`DomainError` if any point lies outside the closed domain."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    d = signed_distance(domain, x, y)
    bad = d < -boundary_tolerance(domain)
    if np.any(bad):
        i = np.unravel_index(np.argmax(bad), d.shape)
        px, py = x[i], y[i]
        raise DomainError(f"point ({float(px)!r}, {float(py)!r}) lies outside the {domain.kind}", (float(px), float(py)))
