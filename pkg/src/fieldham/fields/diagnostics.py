"""Checks of the preconditions the Hamiltonian picture relies on.

* divergence-free (closed two-form ``beta = i_B mu``),
* tangency to the boundary (Dirichlet ``beta``),
* a transverse angle ``m theta + n phi`` (``eta(B) > 0`` everywhere).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ..core.angles import TWO_PI
from ..core.domains import Annulus, Disk, boundary_points, boundary_tolerance, signed_distance
from ..errors import InvalidArgumentError, NoGlobalSectionError, TransversalityError
from .spec import FieldSpec, ReebNormalizedField, angle_value

POSITIVITY_THRESHOLD = 1e-10


class TwoFormSample(NamedTuple):
    """Components of ``beta = i_B (dx ^ dy ^ dphi)`` at a point."""

    xy: float
    yphi: float
    phix: float


def beta_components(spec: FieldSpec, t, x, y) -> TwoFormSample:
    """``beta_xy = B^phi``, ``beta_yphi = B^x``, ``beta_phix = B^y``."""
    bphi, bx, by = spec.evaluate(t, x, y)
    if np.ndim(bphi) == 0:
        return TwoFormSample(float(bphi), float(bx), float(by))
    return TwoFormSample(bphi, bx, by)


# 4th-order central first-derivative stencil as antisymmetric pairs, so
# constant data differences to exactly zero.
_PAIRS = ((1, 8.0 / 12.0), (2, -1.0 / 12.0))


def _interior_nodes(grid, margin: float):
    x, y, is_b = grid.nodes()
    keep = (~is_b) & (signed_distance(grid.domain, x, y) >= margin)
    return x[keep], y[keep]


def exterior_derivative_residual(spec: FieldSpec, n_t: int, grid, h: float | None = None) -> float:
    """Max of ``|d beta|`` by 4th-order central differences.

    ``d beta = (d_phi beta_xy + d_x beta_yphi + d_y beta_phix) dphi ^ dx ^ dy``,
    which is the divergence of ``B``. The stencil of spacing ``h`` (default:
    the grid spacing) is applied at every interior node whose stencil stays
    inside the fibre, for ``n_t`` equally spaced angles.
    """
    if n_t < 8:
        raise InvalidArgumentError("at least 8 angles are required")
    h = grid.spacing if h is None else float(h)
    x, y = _interior_nodes(grid, 2.0 * h * (1.0 + 1e-9))
    if x.size == 0:
        return 0.0
    ht = TWO_PI / n_t
    t = ht * np.arange(n_t)
    T = t[:, None]
    X = np.broadcast_to(x, (n_t, x.size))
    Y = np.broadcast_to(y, (n_t, y.size))
    div = np.zeros((n_t, x.size))
    for off, c in _PAIRS:
        dt = spec.evaluate(T + off * ht, X, Y, check=False)[0] - spec.evaluate(T - off * ht, X, Y, check=False)[0]
        dx = spec.evaluate(T, X + off * h, Y, check=False)[1] - spec.evaluate(T, X - off * h, Y, check=False)[1]
        dy = spec.evaluate(T, X, Y + off * h, check=False)[2] - spec.evaluate(T, X, Y - off * h, check=False)[2]
        div += c * (dt / ht + dx / h + dy / h)
    return float(np.max(np.abs(div)))


def divergence_residual(spec: FieldSpec, n_t: int, grid) -> float:
    """Max over interior nodes of the 4th-order finite-difference divergence."""
    return exterior_derivative_residual(spec, n_t, grid)


def tangency_residual(spec: FieldSpec, n_t: int = 64, n_boundary: int = 256) -> float:
    """Max of ``|B . n|`` over boundary samples (``n_t`` angles by ``n_boundary`` points per circle)."""
    bx, by, normals = boundary_points(spec.domain, n_boundary)
    t = TWO_PI * np.arange(n_t) / n_t
    _, Bx, By = spec.evaluate(t[:, None], bx[None, :], by[None, :])
    flux = Bx * normals[:, 0] + By * normals[:, 1]
    return float(np.max(np.abs(flux)))


# -- transverse angles -----------------------------------------------------


@dataclass(frozen=True)
class CandidateReport:
    """Outcome of testing one angle ``m theta + n phi``.

    ``failing_regions`` names where ``eta(B) <= threshold``: any of
    ``"inner-boundary"``, ``"outer-boundary"``, ``"interior"``.
    """

    m: int
    n: int
    min_value: float
    witness: tuple[float, float, float]
    failing_regions: tuple[str, ...]
    failing_fraction: float
    boundary_failing_fraction: dict = field(default_factory=dict)

    @property
    def transverse(self) -> bool:
        return not self.failing_regions

    def describe(self) -> str:
        if self.transverse:
            return f"(m, n) = ({self.m}, {self.n}): transverse, min eta(B) = {self.min_value:.6g}"
        where = ", ".join(self.failing_regions)
        t, x, y = self.witness
        return (
            f"(m, n) = ({self.m}, {self.n}): fails on {where}; min eta(B) = {self.min_value:.6g} "
            f"at t={t:.6g}, x={x:.6g}, y={y:.6g}"
        )


@dataclass(frozen=True)
class TransverseAngle:
    m: int
    n: int
    min_value: float
    reports: tuple[CandidateReport, ...]


@dataclass(frozen=True)
class _Lattice:
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    region: np.ndarray  # 0 interior, 1 inner boundary, 2 outer boundary


def sample_lattice(domain, n_fibre: int = 128, n_t: int = 64, n_boundary: int | None = None) -> _Lattice:
    """Dense sample of ``S^1 x Sigma`` including every boundary node.

    Annulus: ``n_fibre`` radii (endpoints included) by ``n_fibre`` angles.
    Disk: the ``n_fibre x n_fibre`` Cartesian lattice restricted to the open
    disk plus ``n_boundary`` points on the circle.
    """
    t = TWO_PI * np.arange(n_t) / n_t
    if isinstance(domain, Annulus):
        r = np.linspace(domain.r0, domain.r1, n_fibre)
        th = TWO_PI * np.arange(n_fibre) / n_fibre
        R, TH = np.meshgrid(r, th, indexing="ij")
        x, y = (R * np.cos(TH)).ravel(), (R * np.sin(TH)).ravel()
        region = np.zeros(R.shape, dtype=np.int8)
        region[0] = 1
        region[-1] = 2
        region = region.ravel()
    elif isinstance(domain, Disk):
        g = np.linspace(-domain.R, domain.R, n_fibre)
        X, Y = np.meshgrid(g, g, indexing="ij")
        inside = np.hypot(X, Y) < domain.R - boundary_tolerance(domain)
        nb = n_boundary or 4 * n_fibre
        phi = TWO_PI * np.arange(nb) / nb
        x = np.concatenate([X[inside], domain.R * np.cos(phi)])
        y = np.concatenate([Y[inside], domain.R * np.sin(phi)])
        region = np.concatenate([np.zeros(inside.sum(), np.int8), np.full(nb, 2, np.int8)])
    else:
        raise InvalidArgumentError(f"unsupported domain {domain!r}")
    return _Lattice(t, x, y, region)


_REGION_NAMES = {0: "interior", 1: "inner-boundary", 2: "outer-boundary"}


def candidate_angles(domain, max_order: int = 3) -> list[tuple[int, int]]:
    """Primitive ``(m, n)`` with ``|m|, |n| <= max_order``, ordered by ``|m|+|n|`` then lexicographically.

    Disk fibres only admit ``m = 0``.
    """
    out = []
    for m in range(-max_order, max_order + 1):
        for n in range(-max_order, max_order + 1):
            if (m, n) == (0, 0) or math.gcd(m, n) != 1:
                continue
            if isinstance(domain, Disk) and m != 0:
                continue
            out.append((m, n))
    out.sort(key=lambda mn: (abs(mn[0]) + abs(mn[1]), mn))
    return out


def _evaluate_on_lattice(spec: FieldSpec, lat: _Lattice):
    T = lat.t[:, None]
    X = np.broadcast_to(lat.x, (lat.t.size, lat.x.size))
    Y = np.broadcast_to(lat.y, (lat.t.size, lat.y.size))
    return spec.evaluate(T, X, Y, check=False), X, Y


def _report(m, n, eta, lat, X, Y, threshold) -> CandidateReport:
    i = np.unravel_index(np.argmin(eta), eta.shape)
    witness = (float(lat.t[i[0]]), float(X[i]), float(Y[i]))
    bad = eta <= threshold
    regions = tuple(_REGION_NAMES[k] for k in (1, 2, 0) if np.any(bad[:, lat.region == k]))
    boundary_fraction = {
        _REGION_NAMES[k]: float(np.mean(bad[:, lat.region == k])) for k in (1, 2) if np.any(lat.region == k)
    }
    return CandidateReport(m, n, float(eta[i]), witness, regions, float(np.mean(bad)), boundary_fraction)


def evaluate_angle(spec: FieldSpec, m: int, n: int, n_fibre: int = 128, n_t: int = 64) -> CandidateReport:
    """Sample ``eta(B)`` for ``eta = m dtheta + n dphi`` and report positivity."""
    if isinstance(spec.domain, Disk) and m != 0:
        raise InvalidArgumentError("theta is not defined across the centre of a disk; use m = 0")
    lat = sample_lattice(spec.domain, n_fibre, n_t)
    (bphi, bx, by), X, Y = _evaluate_on_lattice(spec, lat)
    eta = angle_value(m, n, bphi, bx, by, X, Y)
    return _report(m, n, eta, lat, X, Y, POSITIVITY_THRESHOLD)


def find_transverse_angle(spec: FieldSpec, max_order: int = 3, n_fibre: int = 128, n_t: int = 64) -> TransverseAngle:
    """First integer angle ``m theta + n phi`` with ``min eta(B) > 1e-10``.

    Raises :class:`NoGlobalSectionError` carrying one report per candidate
    when none is transverse.
    """
    lat = sample_lattice(spec.domain, n_fibre, n_t)
    (bphi, bx, by), X, Y = _evaluate_on_lattice(spec, lat)
    with np.errstate(invalid="ignore", divide="ignore"):
        btheta = (X * by - Y * bx) / (X * X + Y * Y)
    reports = []
    for m, n in candidate_angles(spec.domain, max_order):
        eta = n * bphi + (m * btheta if m else 0.0)
        rep = _report(m, n, eta, lat, X, Y, POSITIVITY_THRESHOLD)
        reports.append(rep)
        if rep.transverse:
            return TransverseAngle(m, n, rep.min_value, tuple(reports))
    lines = "\n".join(r.describe() for r in reports)
    raise NoGlobalSectionError("no integer angle combination is transverse to the field:\n" + lines, reports)


def reeb_normalize(spec: FieldSpec, angle: tuple[int, int], n_fibre: int = 64, n_t: int = 32) -> ReebNormalizedField:
    """``B / eta(B)`` after checking ``eta(B) > 0`` on a sample lattice."""
    m, n = angle
    rep = evaluate_angle(spec, m, n, n_fibre, n_t)
    if rep.min_value <= 0:
        raise TransversalityError(
            f"eta(B) = {rep.min_value:.6g} <= 0 for (m, n) = ({m}, {n})", witness=rep.witness
        )
    return ReebNormalizedField(spec, m, n)
