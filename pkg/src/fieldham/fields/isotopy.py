"""Isotopies of the fibre and the suspension fields they generate."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..core.angles import TWO_PI
from ..core.domains import Annulus, FibreDomain
from ..errors import InvalidArgumentError
from .spec import SuspensionField


class Isotopy:
    """A family ``f_s`` of fibre maps, ``s`` in ``[0, 2 pi]``, with ``f_0 = id``.

    Subclasses provide :meth:`map` and the generating velocity
    :meth:`velocity`, ``V_s(x) = (d/ds) f_s(f_s^{-1}(x))``.
    """

    domain: FibreDomain

    def map(self, s, x, y):
        raise NotImplementedError

    def velocity(self, s, x, y):
        raise NotImplementedError

    def jacobian_det(self, s, x, y, h: float = 1e-5):
        """Central-difference Jacobian determinant of ``f_s``."""
        fxp = self.map(s, x + h, y)
        fxm = self.map(s, x - h, y)
        fyp = self.map(s, x, y + h)
        fym = self.map(s, x, y - h)
        a = (fxp[0] - fxm[0]) / (2 * h)
        b = (fyp[0] - fym[0]) / (2 * h)
        c = (fxp[1] - fxm[1]) / (2 * h)
        d = (fyp[1] - fym[1]) / (2 * h)
        return a * d - b * c


@dataclass(frozen=True)
class RadialTwistIsotopy(Isotopy):
    """``f_s(r, theta) = (r, theta + s * rate(r))``: rotation of each circle.

    ``rate`` is the angular velocity profile; the generating velocity is
    ``rate(r) * (-y, x)``, independent of ``s``.
    """

    domain: FibreDomain
    rate: Callable

    def map(self, s, x, y):
        angle = np.asarray(s) * self.rate(np.hypot(x, y))
        c, sn = np.cos(angle), np.sin(angle)
        return c * x - sn * y, sn * x + c * y

    def inverse(self, s, x, y):
        return self.map(-np.asarray(s), x, y)

    def velocity(self, s, x, y):
        w = self.rate(np.hypot(x, y))
        return -w * y, w * x

    def jacobian_det(self, s, x, y, h: float = 1e-5):
        # Rotating each circle rigidly preserves area exactly.
        return np.ones(np.broadcast(s, x, y).shape)


class _Constant:
    def __init__(self, value: float):
        self.value = float(value)

    def __call__(self, r):
        return np.full(np.shape(r), self.value)

    def __eq__(self, other):
        return isinstance(other, _Constant) and other.value == self.value

    def __hash__(self):
        return hash(self.value)


def rigid_rotation_isotopy(domain: FibreDomain, omega: float) -> RadialTwistIsotopy:
    """``f_s = `` rotation by ``s * omega``; the time-2pi map rotates by ``2 pi omega``."""
    return RadialTwistIsotopy(domain, _Constant(omega))


def identity_isotopy(domain: FibreDomain) -> RadialTwistIsotopy:
    return rigid_rotation_isotopy(domain, 0.0)


def smoothstep(u):
    u = np.clip(u, 0.0, 1.0)
    return u * u * (3.0 - 2.0 * u)


class _DehnProfile:
    def __init__(self, r0: float, r1: float, n: int):
        self.r0, self.r1, self.n = float(r0), float(r1), int(n)

    def twist(self, r):
        """Twist angle ``w(r) = 2 pi smoothstep((r - r0)/(r1 - r0))``."""
        return TWO_PI * smoothstep((np.asarray(r) - self.r0) / (self.r1 - self.r0))

    def __call__(self, r):
        return self.n * self.twist(r) / TWO_PI

    def __eq__(self, other):
        return isinstance(other, _DehnProfile) and (other.r0, other.r1, other.n) == (self.r0, self.r1, self.n)

    def __hash__(self):
        return hash((self.r0, self.r1, self.n))


def dehn_twist_isotopy(annulus: Annulus, n_twists: int) -> RadialTwistIsotopy:
    """Isotopy from the identity to the ``n_twists``-fold Dehn twist.

    ``f_s(r, theta) = (r, theta + (s / 2 pi) n w(r))`` with
    ``w(r) = 2 pi smoothstep((r - r0)/(r1 - r0))``, so ``f_{2 pi}`` fixes the
    inner circle pointwise and turns the outer circle by ``2 pi n``.
    """
    if not isinstance(annulus, Annulus):
        raise InvalidArgumentError("Dehn twists are defined on an annulus")
    if int(n_twists) != n_twists:
        raise InvalidArgumentError(f"number of twists must be an integer, got {n_twists!r}")
    return RadialTwistIsotopy(annulus, _DehnProfile(annulus.r0, annulus.r1, int(n_twists)))


@dataclass(frozen=True)
class FunctionIsotopy(Isotopy):
    """Isotopy given by callables ``map(s, x, y)`` and ``velocity(s, x, y)``."""

    domain: FibreDomain
    map_func: Callable
    velocity_func: Callable

    def map(self, s, x, y):
        return self.map_func(s, x, y)

    def velocity(self, s, x, y):
        return self.velocity_func(s, x, y)


def check_isotopy(iso: Isotopy, n_s: int = 17, n_r: int = 9, n_theta: int = 16) -> None:
    """Sample ``f_0 = id`` and positivity of the Jacobian of ``f_s``."""
    dom = iso.domain
    r = np.linspace(dom.r_inner, dom.r_outer, n_r)
    if dom.r_inner == 0.0:
        r = r[1:]
    th = TWO_PI * np.arange(n_theta) / n_theta
    R, TH = np.meshgrid(r, th, indexing="ij")
    X, Y = R * np.cos(TH), R * np.sin(TH)
    fx, fy = iso.map(0.0, X, Y)
    if np.max(np.hypot(fx - X, fy - Y)) > 1e-12 * dom.diameter:
        raise InvalidArgumentError("isotopy does not start at the identity")
    # Shrink interior samples slightly so central differences stay in range.
    shrink = 1.0 - 1e-4
    for s in np.linspace(0.0, TWO_PI, n_s):
        det = iso.jacobian_det(s, X * shrink, Y * shrink)
        if np.min(det) <= 0:
            i = np.unravel_index(np.argmin(det), det.shape)
            raise InvalidArgumentError(
                f"isotopy Jacobian is not positive at s={s:.6g}, x=({X[i]:.6g}, {Y[i]:.6g}): {det[i]:.6g}"
            )


def suspension_field(iso: Isotopy) -> SuspensionField:
    """The field ``d_t + V_t`` whose time-2pi map on ``t = 0`` is ``f_{2 pi}``."""
    check_isotopy(iso)
    return SuspensionField(iso)
