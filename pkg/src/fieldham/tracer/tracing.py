"""Field-line tracing, section crossings, return maps and winding numbers.

The state of a traced orbit is ``(phi, x, y, L, sigma)``: the toroidal angle
(unwrapped), the fibre point, the lifted angle ``L = m theta + n phi``
integrated as ``dL/ds = eta(B)`` so no angle unwrapping is needed, and an
auxiliary parameter. When tracing the Reeb-normalised field ``B / eta(B)``,
``sigma`` accumulates the parameter of ``B`` itself (``dsigma/ds = 1/eta``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core.angles import TWO_PI, wrap_angle
from ..core.domains import Disk, boundary_tolerance, check_inside, signed_distance
from ..errors import (
    BoundaryExitError,
    InvalidArgumentError,
    StagnationError,
    TransversalityError,
)
from ..fields.spec import FieldSpec
from .integrator import DenseStep, IntegrationStats, integrate

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12
#: Orbits further outside the fibre than this multiple of the diameter have left it.
EXIT_RTOL = 1e-8
BISECTION_ITERATIONS = 60
BISECTION_TOL = 1e-12
#: Denominator winding per transit below which the rotational transform is reported infinite.
DIVERGENCE_TOL = 1e-12


@dataclass
class Trajectory:
    """Samples of a field line at the accepted integration steps."""

    s: np.ndarray
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    stats: IntegrationStats
    exited: bool = False


@dataclass(frozen=True)
class Crossing:
    s: float
    t: float
    x: float
    y: float

    @property
    def point(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass
class CrossingTable:
    """Section crossings of a batch of orbits; arrays have shape ``(n_seeds, count)``.

    ``s`` is the tracing parameter at each crossing and ``sigma`` the
    parameter of the un-normalised field (equal to ``s`` for raw tracing).
    """

    s: np.ndarray
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    sigma: np.ndarray
    stats: IntegrationStats


@dataclass
class SectionMap:
    """First-return data of the section ``m theta + n phi = level``."""

    angle: tuple[int, int]
    level: float
    x_in: np.ndarray
    x_out: np.ndarray
    tau: np.ndarray
    tau_raw: np.ndarray
    stats: IntegrationStats = field(repr=False, default_factory=IntegrationStats)

    @property
    def delta(self) -> float:
        """Uniform lower bound of the return time over the samples."""
        return float(np.min(self.tau)) if self.tau.size else np.inf

    @property
    def injectivity_margin(self) -> float:
        """Smallest distance between images of distinct seeds."""
        if len(self.x_out) < 2:
            return np.inf
        d = np.hypot(*(self.x_out[:, None, :] - self.x_out[None, :, :]).transpose(2, 0, 1))
        same = np.hypot(*(self.x_in[:, None, :] - self.x_in[None, :, :]).transpose(2, 0, 1)) == 0
        d[same] = np.inf
        return float(np.min(d))


@dataclass(frozen=True)
class WindingResult:
    """Estimated rotational transform and the raw winding increments.

    ``value`` is ``+inf`` or ``-inf`` when the denominator winding is below
    ``1e-12`` per transit, or below the accumulated local error bound of the
    integration (``diverged`` is then set).
    """

    value: float
    ratio: float
    numerator_winding: float
    denominator_winding: float
    transits: float
    diverged: bool


def _angle_rate(m: int, n: int, bphi, bx, by, x, y):
    out = n * bphi
    if m:
        out = out + m * (x * by - y * bx) / (x * x + y * y)
    return out


class _Rhs:
    """Right-hand side of the augmented field-line system."""

    def __init__(self, spec: FieldSpec, m: int, n: int, normalize: bool, extra_angle=None):
        if m and isinstance(spec.domain, Disk):
            raise InvalidArgumentError("theta is not defined across the centre of a disk; use m = 0")
        self.spec = spec
        self.m, self.n = m, n
        self.normalize = normalize
        self.extra = extra_angle

    def __call__(self, s, Y):
        phi, x, y = Y[:, 0], Y[:, 1], Y[:, 2]
        bphi, bx, by = self.spec._components(phi, x, y)
        eta = _angle_rate(self.m, self.n, bphi, bx, by, x, y)
        out = np.empty_like(Y)
        if self.normalize:
            if np.any(eta <= 0):
                i = int(np.argmin(eta))
                raise TransversalityError(
                    f"eta(B) = {eta[i]:.6g} <= 0 at (t, x, y) = ({wrap_angle(phi[i]):.6g}, {x[i]:.6g}, {y[i]:.6g})",
                    witness=(wrap_angle(phi[i]), float(x[i]), float(y[i])),
                )
            inv = 1.0 / eta
            out[:, 0] = bphi * inv
            out[:, 1] = bx * inv
            out[:, 2] = by * inv
            out[:, 3] = 1.0
            out[:, 4] = inv
        else:
            out[:, 0] = bphi
            out[:, 1] = bx
            out[:, 2] = by
            out[:, 3] = eta
            out[:, 4] = 1.0
        if self.extra is not None:
            m2, n2 = self.extra
            out[:, 5] = _angle_rate(m2, n2, bphi, bx, by, x, y)
            if self.normalize:
                out[:, 5] *= inv
        return out


class _Boundary:
    """Projects near-boundary points onto the boundary and detects exits."""

    def __init__(self, domain, exit_rtol: float = EXIT_RTOL):
        self.domain = domain
        self.inside_band = boundary_tolerance(domain)
        self.exit_tol = exit_rtol * domain.diameter
        self.exited = None

    def __call__(self, Y):
        x, y = Y[:, 1], Y[:, 2]
        d = signed_distance(self.domain, x, y)
        out = d < -self.exit_tol
        if np.any(out):
            i = int(np.argmax(out))
            self.exited = (wrap_angle(Y[i, 0]), float(x[i]), float(y[i]))
        snap = (d <= self.inside_band) & ~out
        if np.any(snap):
            r = np.hypot(x[snap], y[snap])
            radii = np.asarray(self.domain.boundary_radii)
            target = radii[np.argmin(np.abs(r[:, None] - radii[None, :]), axis=1)]
            Y = Y.copy()
            Y[snap, 1] *= target / r
            Y[snap, 2] *= target / r
        return Y


def _check_seeds(spec: FieldSpec, phi, x, y):
    check_inside(spec.domain, x, y)
    bphi, bx, by = spec._components(np.asarray(phi, float), np.asarray(x, float), np.asarray(y, float))
    still = (bphi == 0) & (bx == 0) & (by == 0)
    if np.any(still):
        i = int(np.argmax(still))
        pt = (float(np.atleast_1d(phi)[i]), float(np.atleast_1d(x)[i]), float(np.atleast_1d(y)[i]))
        raise StagnationError(f"the field vanishes at the seed {pt}", point=pt)


def trace(
    spec: FieldSpec,
    seed: tuple[float, float, float],
    s_max: float,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> Trajectory:
    """Integrate the field line through ``seed = (t, x, y)`` for parameter ``s_max``.

    Stops early with ``exited = True`` if the orbit leaves the fibre.
    """
    t0, x0, y0 = (float(v) for v in seed)
    _check_seeds(spec, t0, x0, y0)
    rhs = _Rhs(spec, 0, 1, normalize=False)
    boundary = _Boundary(spec.domain)
    samples = [(0.0, t0, x0, y0)]

    def on_step(step: DenseStep) -> bool:
        samples.append((step.s1, step.y1[0, 0], step.y1[0, 1], step.y1[0, 2]))
        return boundary.exited is not None

    Y0 = np.array([[t0, x0, y0, 0.0, 0.0]])
    _, _, stats = integrate(rhs, 0.0, Y0, float(s_max), rtol, atol, on_step=on_step, post_step=boundary)
    arr = np.array(samples)
    return Trajectory(arr[:, 0], wrap_angle(arr[:, 1]), arr[:, 2], arr[:, 3], stats, boundary.exited is not None)


def _first_level(L0, level):
    k = np.floor((L0 - level) / TWO_PI + 1e-12)
    return level + TWO_PI * (k + 1.0)


def _crossing_run(spec, angle, level, Y0, count, normalize, rtol, atol, extra_angle=None):
    m, n = angle
    rhs = _Rhs(spec, m, n, normalize, extra_angle)
    boundary = _Boundary(spec.domain)
    batch = Y0.shape[0]
    next_level = _first_level(Y0[:, 3], level)
    done = np.zeros(batch, dtype=int)
    out = np.full((batch, count, Y0.shape[1] + 1), np.nan)

    def on_step(step: DenseStep) -> bool:
        if boundary.exited is not None:
            raise BoundaryExitError(f"orbit left the fibre near {boundary.exited}", point=boundary.exited)
        while True:
            hit = np.flatnonzero((step.y1[:, 3] >= next_level) & (done < count))
            if hit.size == 0:
                break
            lo = np.zeros(hit.size)
            hi = np.ones(hit.size)
            target = next_level[hit]
            for _ in range(BISECTION_ITERATIONS):
                if np.max(hi - lo) * abs(step.h) < BISECTION_TOL:
                    break
                mid = 0.5 * (lo + hi)
                below = step.component(mid, 3, hit) < target
                lo = np.where(below, mid, lo)
                hi = np.where(below, hi, mid)
            theta = np.zeros(batch)
            theta[hit] = 0.5 * (lo + hi)
            state = step(theta)[hit]
            out[hit, done[hit], 0] = step.s0 + theta[hit] * step.h
            out[hit, done[hit], 1:] = state
            done[hit] += 1
            next_level[hit] += TWO_PI
        return bool(np.all(done >= count))

    if count > 0:
        _, _, stats = integrate(rhs, 0.0, Y0, np.inf, rtol, atol, on_step=on_step, post_step=boundary)
    else:
        stats = IntegrationStats()
    return out, stats


def _as_table(out, stats, normalize) -> CrossingTable:
    s = out[..., 0]
    sigma = out[..., 5] if normalize else s
    return CrossingTable(s, wrap_angle(np.nan_to_num(out[..., 1])), out[..., 2], out[..., 3], sigma, stats)


def _lifted(angle, phi, x, y):
    m, n = angle
    theta = np.arctan2(y, x) if m else 0.0
    return m * theta + n * np.asarray(phi, dtype=float)


def crossing_table(
    spec: FieldSpec,
    angle: tuple[int, int],
    level: float,
    seeds,
    count: int,
    normalize: bool = False,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> CrossingTable:
    """Crossings of ``m theta + n phi = level (mod 2 pi)`` for a batch of seeds ``(t, x, y)``.

    Each crossing is located by bisection on the dense output of the lifted
    angle to ``|ds| < 1e-12``. With ``normalize`` the Reeb field
    ``B / eta(B)`` is traced, so consecutive crossings are ``2 pi`` apart.
    """
    seeds = np.atleast_2d(np.asarray(seeds, dtype=float))
    if seeds.shape[1] != 3:
        raise InvalidArgumentError("seeds must be (t, x, y) triples")
    phi, x, y = seeds[:, 0], seeds[:, 1], seeds[:, 2]
    _check_seeds(spec, phi, x, y)
    L0 = _lifted(angle, phi, x, y)
    Y0 = np.column_stack([phi, x, y, L0, np.zeros_like(L0)])
    out, stats = _crossing_run(spec, angle, float(level), Y0, int(count), normalize, rtol, atol)
    return _as_table(out, stats, normalize)


def crossings(
    spec: FieldSpec,
    angle: tuple[int, int],
    level: float,
    seed: tuple[float, float, float],
    count: int,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> list[Crossing]:
    """The first ``count`` crossings of the section ``m theta + n phi = level`` along the raw field."""
    table = crossing_table(spec, angle, level, [seed], count, normalize=False, rtol=rtol, atol=atol)
    return [Crossing(float(table.s[0, k]), float(table.t[0, k]), float(table.x[0, k]), float(table.y[0, k])) for k in range(count)]


def section_seeds(angle: tuple[int, int], level: float, points) -> np.ndarray:
    """Lift fibre points onto the section ``m theta + n phi = level`` as ``(t, x, y)``."""
    m, n = angle
    if abs(n) != 1:
        raise InvalidArgumentError(f"sections are parametrised by the fibre only for n = +-1, got n = {n}")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    theta = np.arctan2(pts[:, 1], pts[:, 0]) if m else np.zeros(len(pts))
    phi = (level - m * theta) / n
    return np.column_stack([phi, pts[:, 0], pts[:, 1]])


def section_orbits(
    spec: FieldSpec,
    angle: tuple[int, int],
    level: float,
    points,
    n_transits: int,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> CrossingTable:
    """Iterates of the first-return map for seeds on the section, via the Reeb field."""
    seeds = section_seeds(angle, level, points)
    phi, x, y = seeds.T
    _check_seeds(spec, phi, x, y)
    Y0 = np.column_stack([phi, x, y, np.full(len(x), float(level)), np.zeros(len(x))])
    out, stats = _crossing_run(spec, angle, float(level), Y0, int(n_transits), True, rtol, atol)
    return _as_table(out, stats, True)


def return_map(
    spec: FieldSpec,
    angle: tuple[int, int],
    level: float,
    points,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> SectionMap:
    """First return to the section ``m theta + n phi = level`` of fibre points on it.

    Return times are measured in the parameter of the Reeb field, so a full
    circuit takes ``tau = 2 pi``; the parameter of the raw field is kept in
    ``tau_raw``.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    table = section_orbits(spec, angle, level, pts, 1, rtol, atol)
    x_out = np.column_stack([table.x[:, 0], table.y[:, 0]])
    return SectionMap(tuple(angle), float(level), pts.copy(), x_out, table.s[:, 0].copy(), table.sigma[:, 0].copy(), table.stats)


def monodromy(
    spec: FieldSpec,
    angle: tuple[int, int],
    level: float,
    points,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> np.ndarray:
    """Time-``2 pi`` map of the Reeb field restricted to the section, sampled at ``points``."""
    return return_map(spec, angle, level, points, rtol, atol).x_out


def _birkhoff_weight_derivative(u):
    """Derivative of the normalised bump ``exp(-1/(u(1-u)))`` (integral one)."""
    u = np.asarray(u, dtype=float)
    inner = (u > 0) & (u < 1)
    g = np.zeros_like(u)
    ui = u[inner]
    q = ui * (1.0 - ui)
    g[inner] = np.exp(-1.0 / q) * (1.0 - 2.0 * ui) / q**2
    return g / 0.007029858406609609


def rotational_transform(
    spec: FieldSpec,
    numerator: tuple[int, int],
    denominator: tuple[int, int],
    seed: tuple[float, float, float],
    n_transits: int,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> WindingResult:
    """Winding ratio of two angles along the field line through ``seed = (t, x, y)``.

    The orbit is traced until either angle has advanced by ``2 pi n_transits``.
    The estimate is a weighted Birkhoff average of the two winding rates,
    which converges much faster than the plain ratio on quasi-periodic orbits.
    """
    if n_transits < 1:
        raise InvalidArgumentError("at least one transit is required")
    t0, x0, y0 = (float(v) for v in seed)
    _check_seeds(spec, t0, x0, y0)
    m1, n1 = numerator
    m2, n2 = denominator
    rhs = _Rhs(spec, m2, n2, normalize=False, extra_angle=(m1, n1))
    boundary = _Boundary(spec.domain)
    goal = TWO_PI * n_transits
    Y0 = np.array([[t0, x0, y0, 0.0, 0.0, 0.0]])
    record = [(0.0, 0.0, 0.0)]
    final = {}

    def on_step(step: DenseStep) -> bool:
        if boundary.exited is not None:
            raise BoundaryExitError(f"orbit left the fibre near {boundary.exited}", point=boundary.exited)
        den, num = step.y1[0, 3], step.y1[0, 5]
        if max(abs(den), abs(num)) < goal:
            record.append((step.s1, num, den))
            return False
        # Locate where the leading angle completes the requested transits.
        idx = 5 if abs(num) >= abs(den) else 3
        target = np.sign(step.y1[0, idx]) * goal
        lo, hi = 0.0, 1.0
        for _ in range(BISECTION_ITERATIONS):
            if (hi - lo) * abs(step.h) < BISECTION_TOL:
                break
            mid = 0.5 * (lo + hi)
            val = step.component(np.array([mid]), idx)[0]
            if (val - target) * np.sign(target) < 0:
                lo = mid
            else:
                hi = mid
        theta = 0.5 * (lo + hi)
        state = step(theta)[0]
        record.append((step.s0 + theta * step.h, state[5], state[3]))
        final["done"] = True
        return True

    _, _, stats = integrate(rhs, 0.0, Y0, np.inf, rtol, atol, on_step=on_step, post_step=boundary)
    rec = np.array(record)
    s, num, den = rec[:, 0], rec[:, 1], rec[:, 2]
    S = s[-1]
    transits = max(abs(num[-1]), abs(den[-1])) / TWO_PI
    ratio = num[-1] / den[-1] if den[-1] != 0 else np.copysign(np.inf, num[-1])
    # A winding smaller than the accumulated local error bound is indistinguishable from zero.
    zero_level = max(DIVERGENCE_TOL * transits, stats.steps * atol)
    if abs(den[-1]) <= zero_level:
        value = np.copysign(np.inf, num[-1]) if num[-1] != 0 else np.nan
        return WindingResult(float(value), float(ratio), float(num[-1]), float(den[-1]), float(transits), True)
    # Weighted averages: integral w(s/S) dL / integral w(s/S) ds, integrated by parts
    # against the stored lifts (w vanishes at both ends).
    wprime = _birkhoff_weight_derivative(s / S)
    wnum = -np.trapezoid(wprime * num, s)
    wden = -np.trapezoid(wprime * den, s)
    if abs(wden) < 1e-12 * S:
        value = np.copysign(np.inf, wnum)
        return WindingResult(float(value), float(ratio), float(num[-1]), float(den[-1]), float(transits), True)
    return WindingResult(float(wnum / wden), float(ratio), float(num[-1]), float(den[-1]), float(transits), False)
