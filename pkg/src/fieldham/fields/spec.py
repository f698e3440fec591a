"""Divergence-free vector fields on S^1 x Sigma.

Every field returns contravariant components ``(B^phi, B^x, B^y)`` with respect
to the coordinates ``(phi, x, y)``. The volume form is ``dx ^ dy ^ dphi`` and
the metric is flat, so divergence-free means
``d_phi B^phi + d_x B^x + d_y B^y = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..core.angles import TWO_PI
from ..core.bessel import bessel_j, bessel_zero
from ..core.domains import Annulus, Disk, FibreDomain, check_inside
from ..errors import InvalidArgumentError


class FieldSpec:
    """Base class: a vector field on the solid or hollow torus ``S^1 x Sigma``.

    Subclasses implement :meth:`_components`, which must be pure and
    vectorised over broadcastable ``t, x, y`` arrays.
    """

    domain: FibreDomain

    def evaluate(self, t, x, y, check: bool = True):
        """Components ``(B^phi, B^x, B^y)`` at the given points.

        With ``check`` set, points outside the closed fibre raise
        :class:`~fieldham.errors.DomainError`.
        """
        t, x, y = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (t, x, y)))
        if check:
            check_inside(self.domain, x, y)
        return self._components(t, x, y)

    def _components(self, t, x, y):
        raise NotImplementedError

    def __call__(self, t, x, y):
        return self.evaluate(t, x, y)


def eval_field(spec: FieldSpec, t: float, x: float, y: float) -> tuple[float, float, float]:
    """Point evaluation returning plain floats."""
    bphi, bx, by = spec.evaluate(t, x, y)
    return float(bphi), float(bx), float(by)


def polar_components(bx, by, x, y):
    """Radial component and angular rate ``(B^r, B^theta)`` of a fibre vector."""
    r2 = x * x + y * y
    r = np.sqrt(r2)
    return (x * bx + y * by) / r, (x * by - y * bx) / r2


# -- presets ---------------------------------------------------------------


@dataclass(frozen=True)
class ConstantField(FieldSpec):
    """A field with constant Cartesian components ``(B^phi, B^x, B^y)``."""

    domain: FibreDomain
    components: tuple[float, float, float] = (0.0, 1.0, 0.0)

    def _components(self, t, x, y):
        bphi, bx, by = (float(c) for c in self.components)
        return np.full(x.shape, bphi), np.full(x.shape, bx), np.full(x.shape, by)


def straight_field(domain: FibreDomain) -> ConstantField:
    """The straight field ``d/dx``."""
    return ConstantField(domain, (0.0, 1.0, 0.0))


def toroidal_field(domain: FibreDomain) -> ConstantField:
    """The field ``d/dphi``."""
    return ConstantField(domain, (1.0, 0.0, 0.0))


def zero_field(domain: FibreDomain) -> ConstantField:
    return ConstantField(domain, (0.0, 0.0, 0.0))


@dataclass(frozen=True)
class LundquistField(FieldSpec):
    """Force-free Bessel field ``B = (J1(r)/r) d_theta - J0(r) d_phi``.

    The default domain is the annulus between the first zeros of J0 and J1,
    on which ``B . grad(theta + phi) = J1(r)/r - J0(r) > 0``.
    """

    domain: FibreDomain = field(default_factory=lambda: lundquist_annulus())

    def _components(self, t, x, y):
        r = np.hypot(x, y)
        j0 = bessel_j(0, r)
        j1 = bessel_j(1, r)
        with np.errstate(invalid="ignore", divide="ignore"):
            rate = np.where(r > 0, j1 / np.where(r > 0, r, 1.0), 0.5)
        return -np.asarray(j0, dtype=float), -y * rate, x * rate

    @staticmethod
    def angular_rate(r):
        """``B^theta = J1(r)/r``."""
        return np.asarray(bessel_j(1, r)) / np.asarray(r)

    @staticmethod
    def toroidal(r):
        """``B^phi = -J0(r)``."""
        return -np.asarray(bessel_j(0, r))

    @staticmethod
    def rotational_transform(r):
        """Analytic winding ratio ``-J1(r) / (r J0(r))``."""
        return -np.asarray(bessel_j(1, r)) / (np.asarray(r) * np.asarray(bessel_j(0, r)))

    @staticmethod
    def flux_function(r):
        """``J0(r)``: constant on field lines, ``d(-J0) = J1 dr``."""
        return np.asarray(bessel_j(0, r))


def lundquist_annulus() -> Annulus:
    """Annulus between the first zero of J0 and the first zero of J1."""
    return Annulus(bessel_zero(0, 1), bessel_zero(1, 1))


# -- perturbations ---------------------------------------------------------


def _cutoff_profile(domain: FibreDomain, k: int):
    """Radial amplitude vanishing to second order on the boundary, and its derivative."""
    if isinstance(domain, Annulus):
        r0, r1 = domain.r0, domain.r1
        h2 = (0.5 * (r1 - r0)) ** 2

        def c(r):
            q = (r - r0) * (r1 - r) / h2
            return q**3

        def dc(r):
            q = (r - r0) * (r1 - r) / h2
            return 3.0 * q**2 * (r1 + r0 - 2.0 * r) / h2

        return c, dc
    R = domain.R
    p = abs(k) + 2

    def c(r):
        u = r / R
        return u**p * (1.0 - u * u) ** 3

    def dc(r):
        u = r / R
        return (p * u ** (p - 1) * (1.0 - u * u) ** 3 - 6.0 * u ** (p + 1) * (1.0 - u * u) ** 2) / R

    return c, dc


@dataclass(frozen=True)
class HelicalMode:
    """Potential ``c(r) [cos(psi) dtheta + sin(psi) dphi]`` with ``psi = k theta - l phi + phase``.

    ``c`` is a radial cutoff vanishing with its first two derivatives on the
    boundary, so the field ``d alpha`` contracted through the volume form is
    divergence-free, tangential and flux-free.
    """

    k: int = 1
    l: int = 1
    phase: float = 0.0

    def field(self, domain: FibreDomain, t, x, y):
        r = np.hypot(x, y)
        theta = np.arctan2(y, x)
        c, dc = _cutoff_profile(domain, self.k)
        psi = self.k * theta - self.l * t + self.phase
        cos_p, sin_p = np.cos(psi), np.sin(psi)
        cr, dcr = c(r), dc(r)
        # alpha = P dtheta + Q dphi; r B^phi = P_r, r B^r = Q_theta - P_phi, r B^theta = -Q_r.
        with np.errstate(invalid="ignore", divide="ignore"):
            inv_r = np.where(r > 0, 1.0 / np.where(r > 0, r, 1.0), 0.0)
        b_phi = dcr * cos_p * inv_r
        b_r = (self.k * cr * cos_p - self.l * cr * sin_p) * inv_r
        r_b_theta = -dcr * sin_p
        cth = np.where(r > 0, x * inv_r, 1.0)
        sth = np.where(r > 0, y * inv_r, 0.0)
        bx = b_r * cth - r_b_theta * sth
        by = b_r * sth + r_b_theta * cth
        return b_phi, bx, by

    def potential(self, domain: FibreDomain, t, x, y):
        """Polar components ``(P, Q)`` of the potential ``P dtheta + Q dphi``."""
        r = np.hypot(x, y)
        theta = np.arctan2(y, x)
        c, _ = _cutoff_profile(domain, self.k)
        psi = self.k * theta - self.l * t + self.phase
        return c(r) * np.cos(psi), c(r) * np.sin(psi)


@dataclass(frozen=True)
class PerturbedField(FieldSpec):
    """``base + epsilon * mode`` with the mode built from a cut-off potential."""

    base: FieldSpec
    mode: HelicalMode = HelicalMode()
    epsilon: float = 0.05

    @property
    def domain(self) -> FibreDomain:
        return self.base.domain

    def _components(self, t, x, y):
        b = self.base._components(t, x, y)
        p = self.mode.field(self.domain, t, x, y)
        e = self.epsilon
        return b[0] + e * p[0], b[1] + e * p[1], b[2] + e * p[2]


# -- suspensions -----------------------------------------------------------


@dataclass(frozen=True)
class SuspensionField(FieldSpec):
    """``X = d_t + V_t`` for the generating velocity ``V`` of an isotopy."""

    isotopy: "object"

    @property
    def domain(self) -> FibreDomain:
        return self.isotopy.domain

    def _components(self, t, x, y):
        vx, vy = self.isotopy.velocity(t, x, y)
        return np.ones_like(x), vx, vy


# -- gridded data ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GriddedField(FieldSpec):
    """Field sampled on a uniform periodic angle grid times a Cartesian box.

    ``data`` has shape ``(3, nt, nx, ny)`` holding ``B^phi, B^x, B^y`` at
    ``t_k = 2 pi k / nt`` and the tensor nodes ``x_nodes x y_nodes``.
    Evaluation uses tensor interpolation of order 1 (multilinear) or 3
    (cubic), periodic in ``t`` and clamped to the box in ``x, y``.
    """

    domain: FibreDomain
    x_nodes: np.ndarray
    y_nodes: np.ndarray
    data: np.ndarray
    order: int = 3
    _interp: list = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        from scipy.interpolate import RegularGridInterpolator

        if self.order not in (1, 3):
            raise InvalidArgumentError(f"interpolation order must be 1 or 3, got {self.order!r}")
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 4 or data.shape[0] != 3:
            raise InvalidArgumentError("gridded data must have shape (3, nt, nx, ny)")
        if not np.all(np.isfinite(data)):
            raise InvalidArgumentError("gridded data must be finite")
        nt = data.shape[1]
        pad = 2 if self.order == 3 else 1
        t_nodes = TWO_PI * np.arange(-pad, nt + pad) / nt
        padded = np.concatenate([data[:, -pad:], data, data[:, :pad]], axis=1)
        method = "cubic" if self.order == 3 else "linear"
        interps = [
            RegularGridInterpolator((t_nodes, np.asarray(self.x_nodes), np.asarray(self.y_nodes)), padded[i], method=method)
            for i in range(3)
        ]
        object.__setattr__(self, "_interp", interps)

    def _components(self, t, x, y):
        xn, yn = np.asarray(self.x_nodes), np.asarray(self.y_nodes)
        pts = np.stack(
            [np.mod(t, TWO_PI), np.clip(x, xn[0], xn[-1]), np.clip(y, yn[0], yn[-1])],
            axis=-1,
        )
        return tuple(f(pts) for f in self._interp)

    @classmethod
    def from_field(cls, spec: FieldSpec, nt: int, nx: int, ny: int | None = None, order: int = 3) -> "GriddedField":
        """Sample another field on the bounding box of its domain.

        Nodes outside the domain are filled by evaluating the analytic
        expression without the domain check.
        """
        ny = nx if ny is None else ny
        ro = spec.domain.r_outer
        xn = np.linspace(-ro, ro, nx)
        yn = np.linspace(-ro, ro, ny)
        T, X, Y = np.meshgrid(TWO_PI * np.arange(nt) / nt, xn, yn, indexing="ij")
        data = np.stack(spec.evaluate(T, X, Y, check=False))
        return cls(spec.domain, xn, yn, data, order)


# -- wrappers --------------------------------------------------------------


@dataclass(frozen=True)
class FunctionField(FieldSpec):
    """Field given by a user callable ``func(t, x, y) -> (B^phi, B^x, B^y)``."""

    domain: FibreDomain
    func: Callable

    def _components(self, t, x, y):
        bphi, bx, by = self.func(t, x, y)
        return tuple(np.broadcast_to(np.asarray(c, dtype=float), x.shape) for c in (bphi, bx, by))


@dataclass(frozen=True)
class ReversedField(FieldSpec):
    """The field ``-B``; its flow is the inverse flow of ``B``."""

    base: FieldSpec

    @property
    def domain(self) -> FibreDomain:
        return self.base.domain

    def _components(self, t, x, y):
        return tuple(-c for c in self.base._components(t, x, y))


def angle_value(m: int, n: int, bphi, bx, by, x, y):
    """``eta(B)`` for ``eta = m dtheta + n dphi``."""
    out = n * bphi
    if m:
        out = out + m * (x * by - y * bx) / (x * x + y * y)
    return out


@dataclass(frozen=True)
class ReebNormalizedField(FieldSpec):
    """``B / eta(B)``: same field lines, with ``eta`` advancing at unit rate."""

    base: FieldSpec
    m: int
    n: int

    @property
    def domain(self) -> FibreDomain:
        return self.base.domain

    def _components(self, t, x, y):
        bphi, bx, by = self.base._components(t, x, y)
        eta = angle_value(self.m, self.n, bphi, bx, by, x, y)
        return bphi / eta, bx / eta, by / eta


@dataclass(frozen=True)
class AdaptedField(FieldSpec):
    """The field expressed in the coordinates ``(m theta + phi, x, y)``.

    The new angle ``t = m theta + phi`` replaces ``phi``; fibre components are
    unchanged and the volume form ``dx ^ dy ^ dt`` equals ``dx ^ dy ^ dphi``.
    A level set ``t = const`` is a helicoidal slice of the original torus.
    """

    base: FieldSpec
    m: int

    @property
    def domain(self) -> FibreDomain:
        return self.base.domain

    def _components(self, t, x, y):
        if self.m == 0:
            return self.base._components(t, x, y)
        theta = np.arctan2(y, x)
        phi = t - self.m * theta
        bphi, bx, by = self.base._components(phi, x, y)
        return angle_value(self.m, 1, bphi, bx, by, x, y), bx, by


def adapt_angle(spec: FieldSpec, angle: tuple[int, int]) -> FieldSpec:
    """Recoordinatise so that the angle ``m theta + phi`` becomes the toroidal angle."""
    m, n = angle
    if n != 1:
        raise InvalidArgumentError(f"angle recombination needs n = 1, got (m, n) = ({m}, {n})")
    if m and isinstance(spec.domain, Disk):
        raise InvalidArgumentError("theta is not a coordinate on a disk fibre; use m = 0")
    return AdaptedField(spec, m) if m else spec


__all__ = [
    "FieldSpec",
    "ConstantField",
    "LundquistField",
    "HelicalMode",
    "PerturbedField",
    "SuspensionField",
    "GriddedField",
    "FunctionField",
    "ReversedField",
    "ReebNormalizedField",
    "AdaptedField",
    "adapt_angle",
    "angle_value",
    "eval_field",
    "lundquist_annulus",
    "polar_components",
    "straight_field",
    "toroidal_field",
    "zero_field",
]
