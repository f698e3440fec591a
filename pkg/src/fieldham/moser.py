"""Fibrewise Moser trick and the Hamiltonian of a transverse field.

Write the field in coordinates ``(t, x, y)`` where ``t = m theta + phi`` is
a transverse angle, and let ``w_t = B^t(t, .)`` be the density of the fibre
form ``omega_t = w_t dx ^ dy``. For a reference angle ``o``:

1. ``rho_t = w_t - w_o`` has zero integral (flux constancy) and so has a
   primitive ``alpha_t`` whose tangential component vanishes on the boundary;
2. the flow of ``X_s = (-alpha_y, alpha_x) / (s w_t + (1 - s) w_o)`` from
   ``s = 0`` to ``1`` is a fibre map ``Psi_t`` with ``Psi_t^* omega_t = omega_o``;
3. pulling ``beta`` back by ``(t, x) -> (t, Psi_t(x))`` leaves
   ``omega_o + nu_t ^ dt`` with ``nu_t`` closed and tangentially zero on the
   boundary, hence exact on a planar fibre: ``nu_t = -dH_t``.

All fibre calculus is spectral on a :class:`~fieldham.core.grids.PolarGrid`
and the angle ``t`` is sampled uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core.angles import TWO_PI
from .core.domains import Disk, signed_distance
from .core.grids import PolarGrid
from .core.spectral import cheb_cumulative, harmonics, fourier_cumulative, fourier_derivative
from .errors import (
    CohomologyObstructionError,
    DegeneracyError,
    InstabilityError,
    InvalidArgumentError,
    NonExactError,
    PreconditionError,
    RepresentationFailureError,
)
from .fields.diagnostics import tangency_residual
from .fields.spec import FieldSpec, adapt_angle

DEFAULT_S_STEPS = 64
FLUX_RTOL = 1e-6
PERIOD_TOL = 1e-8
CLOSEDNESS_TOL = 1e-5
NU_TOL = 1e-4
PULLBACK_TOL = 1e-5
BOUNDARY_TOL = 1e-9
TANGENCY_TOL = 1e-8
_TRIM = 1e-15


# -- data types ------------------------------------------------------------


@dataclass
class AreaForm:
    """Density ``w`` of ``w dx ^ dy`` on a polar grid (leading axes allowed)."""

    grid: PolarGrid
    density: np.ndarray
    t: float | np.ndarray | None = None

    @property
    def min_abs(self) -> float:
        return float(np.min(np.abs(self.density)))

    @property
    def witness(self) -> tuple[float, float]:
        """Fibre point where ``|w|`` is smallest."""
        idx = np.unravel_index(np.argmin(np.abs(self.density)), self.density.shape)
        i, j = idx[-2], idx[-1]
        return float(self.grid.x[i, j]), float(self.grid.y[i, j])

    @property
    def single_signed(self) -> bool:
        return bool(np.all(self.density > 0) or np.all(self.density < 0))

    def integral(self) -> np.ndarray | float:
        out = self.grid.integrate(self.density)
        return float(out) if np.ndim(out) == 0 else out


@dataclass
class OneFormFibre:
    """Cartesian components ``a_x dx + a_y dy`` on a polar grid (leading axes allowed)."""

    grid: PolarGrid
    ax: np.ndarray
    ay: np.ndarray
    dirichlet: bool = False

    def curl(self) -> np.ndarray:
        """``d a / (dx ^ dy)`` at every node."""
        return self.grid.curl(self.ax, self.ay)

    def tangential(self) -> np.ndarray:
        """Tangential component ``a(tau)`` on the boundary rings, shape ``(..., rings, ntheta)``."""
        rings = [0, -1] if not self.grid.is_disk else [-1]
        c, s = np.cos(self.grid.theta), np.sin(self.grid.theta)
        return np.stack([-s * self.ax[..., i, :] + c * self.ay[..., i, :] for i in rings], axis=-2)

    def tangential_residual(self) -> float:
        return float(np.max(np.abs(self.tangential())))

    def angular(self) -> np.ndarray:
        """``a(d_theta) = -y a_x + x a_y`` at every node."""
        return -self.grid.y * self.ax + self.grid.x * self.ay

    def radial(self) -> np.ndarray:
        """``a(d_r)`` at every node."""
        c, s = np.cos(self.grid.theta), np.sin(self.grid.theta)
        return c * self.ax + s * self.ay


@dataclass
class FluxReport:
    """Flux of ``beta`` through the angle level sets ``t = const``."""

    angles: np.ndarray
    values: np.ndarray
    tolerance: float

    @property
    def deviation(self) -> float:
        return float(np.max(self.values) - np.min(self.values))

    @property
    def relative_deviation(self) -> float:
        scale = float(np.max(np.abs(self.values)))
        return self.deviation / scale if scale > 0 else self.deviation


@dataclass
class MoserResult:
    """Fibre maps ``Psi_t`` sampled at the grid nodes and their diagnostics."""

    t: np.ndarray
    psi_x: np.ndarray
    psi_y: np.ndarray
    jacobian: np.ndarray
    pullback_residual: float
    boundary_residual: float
    min_jacobian: float
    s_steps: int


@dataclass
class HamiltonianField:
    """``H_t`` on the angle by fibre grid, normalised by ``H_t(x0) = 0``."""

    H: np.ndarray
    x0: tuple[float, float]
    path_residual: float
    periods: np.ndarray


@dataclass
class HamiltonianRep:
    """The data ``(omega_o, H, Psi)`` with ``Psi^* beta = omega_o - dH ^ dt``.

    ``angle = (m, n)`` names the transverse angle ``t = m theta + n phi``
    that serves as time and ``reference`` the slice whose fibre form is kept.
    Arrays over the angle grid have shape ``(nt, nr, ntheta)``.
    """

    angle: tuple[int, int]
    reference: float
    grid: PolarGrid
    t: np.ndarray
    w_o: np.ndarray
    H: np.ndarray
    psi_x: np.ndarray
    psi_y: np.ndarray
    nu_x: np.ndarray
    nu_y: np.ndarray
    x0: tuple[float, float]
    residuals: dict = field(default_factory=dict)
    s_steps: int = DEFAULT_S_STEPS

    @property
    def omega(self) -> AreaForm:
        return AreaForm(self.grid, self.w_o, self.reference)

    @property
    def displacement(self) -> tuple[np.ndarray, np.ndarray]:
        return self.psi_x - self.grid.x, self.psi_y - self.grid.y


# -- fibre forms and flux --------------------------------------------------


def _angle_nodes(nt: int, reference: float) -> np.ndarray:
    if nt < 1:
        raise InvalidArgumentError("at least one angle node is required")
    return reference + TWO_PI * np.arange(nt) / nt


def _density(spec: FieldSpec, t, grid: PolarGrid) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return spec.evaluate(t[..., None, None], grid.x, grid.y, check=False)[0]


def fibre_form(spec: FieldSpec, t: float, grid: PolarGrid, angle: tuple[int, int] = (0, 1)) -> AreaForm:
    """Pullback of ``beta`` to the level set ``m theta + n phi = t``: ``w = B^t``.

    Degeneracy is reported through :attr:`AreaForm.min_abs` and
    :attr:`AreaForm.witness`, not raised.
    """
    adapted = adapt_angle(spec, angle)
    return AreaForm(grid, _density(adapted, t, grid), float(t))


def flux(
    spec: FieldSpec,
    angles,
    grid: PolarGrid | None = None,
    angle: tuple[int, int] = (0, 1),
    n: int = 128,
) -> FluxReport:
    """Per-angle quadrature of ``omega_t`` over the fibre.

    The default grid has ``n`` radii by ``n`` angles; the quadrature is
    spectrally accurate for smooth fields, and the reported tolerance is a
    few units of roundoff in the summed values.
    """
    grid = PolarGrid(spec.domain, n, n) if grid is None else grid
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    adapted = adapt_angle(spec, angle)
    dens = _density(adapted, angles, grid)
    values = np.atleast_1d(grid.integrate(dens))
    scale = float(np.max(grid.integrate(np.abs(dens)))) if angles.size else 0.0
    return FluxReport(angles, values, 64 * np.finfo(float).eps * scale)


# -- primitives --------------------------------------------------------------


def smootherstep(u):
    """C2 ramp ``u^3 (10 - 15 u + 6 u^2)`` clipped to ``[0, 1]``, and its derivative in ``u``."""
    u = np.clip(u, 0.0, 1.0)
    value = u**3 * (10.0 + u * (-15.0 + 6.0 * u))
    slope = 30.0 * u * u * (1.0 - u) ** 2
    return value, slope


class _PeriodicSeries:
    """Trigonometric interpolant of uniform samples with its zero-mean antiderivative.

    Leading axes of the samples are batch axes. Modes below ``_TRIM`` times
    the largest one (over the whole batch) are dropped.
    """

    def __init__(self, g: np.ndarray):
        n = g.shape[-1]
        spec = np.fft.rfft(g, axis=-1) / n
        spec[..., 1:] *= 2.0
        if n % 2 == 0:
            spec[..., -1] = 0.0
        self.mean = spec[..., 0].real.copy()
        spec[..., 0] = 0.0
        mag = np.abs(spec).reshape((-1, spec.shape[-1])).max(axis=0)
        keep = np.flatnonzero(mag > _TRIM * max(mag.max(), np.finfo(float).tiny))
        m = keep[-1] + 1 if keep.size else 1
        self.k = np.arange(m, dtype=float)
        self.re, self.im = spec[..., :m].real, spec[..., :m].imag
        k = np.where(self.k > 0, self.k, 1.0)
        # Antiderivative of c e^{ik theta} is c e^{ik theta} / (ik).
        self.anti_re, self.anti_im = self.im / k, -self.re / k

    def evaluate(self, theta):
        """``(g - mean, Gamma)`` at angles of shape ``batch + (p,)``."""
        cos, sin = harmonics(theta, self.k.size)

        def combine(re, im):
            return np.einsum("...m,...pm->...p", re, cos) - np.einsum("...m,...pm->...p", im, sin)

        return combine(self.re, self.im), combine(self.anti_re, self.anti_im)

    def harmonic_extension(self, theta, rho):
        """Polynomial extension ``sum_k rho^k Gamma_k e^{ik theta}`` of ``Gamma`` into the unit disk.

        Returns the angular derivative and the ``rho`` derivative of the
        extension at points ``(rho, theta)`` of shape ``batch + (p,)``.
        """
        cos, sin = harmonics(theta, self.k.size)
        rho = np.asarray(rho, dtype=float)[..., None]
        power = rho ** self.k
        dpower = self.k * rho ** np.maximum(self.k - 1.0, 0.0)

        def combine(re, im, w):
            return np.einsum("...m,...pm->...p", re, w * cos) - np.einsum("...m,...pm->...p", im, w * sin)

        return combine(self.re, self.im, power), combine(self.anti_re, self.anti_im, dpower)


class FibrePrimitive:
    """Dirichlet primitive ``alpha`` of a zero-integral density ``rho``.

    ``a(r, theta) = int_{r_b}^{r} rho s ds`` gives ``d(a dtheta) = rho dx ^ dy``
    (radial homotopy from the inner circle, or from the axis on a disk). The
    boundary trace ``g = a(r_outer, .)`` has zero mean, so with ``Gamma' = g``
    and an extension ``G`` of ``Gamma`` to the fibre that equals it on the
    outer circle, ``alpha = a dtheta - dG`` has the same differential and
    vanishing tangential part on the boundary. On an annulus
    ``G = chi(r) Gamma`` with the polynomial ramp ``chi`` rising from 0 on
    the inner circle to 1 on the outer one. On a disk ``G`` is the harmonic
    extension ``sum_k (r/R)^|k| Gamma_k e^{ik theta}``, a polynomial in
    ``x, y``, so no ramp kink spoils the spectral derivatives.
    Leading axes of ``rho`` are batch axes.
    """

    def __init__(self, grid: PolarGrid, rho: np.ndarray):
        self.grid = grid
        self.a = grid.radial_moment(rho)
        self.gamma = _PeriodicSeries(self.a[..., -1, :])
        self._interp = None

    def _polar(self, a, r, theta):
        dom = self.grid.domain
        if isinstance(dom, Disk):
            rho = np.broadcast_to(r / dom.R, np.shape(theta))
            g_theta, g_rho = self.gamma.harmonic_extension(theta, rho)
            return -g_rho / dom.R, a - g_theta
        width = dom.r1 - dom.r0
        chi, dchi = smootherstep((r - dom.r0) / width)
        g_prime, gamma = self.gamma.evaluate(theta)
        return -dchi / width * gamma, a - chi * g_prime

    @staticmethod
    def _cartesian(a_r, a_theta, r, theta):
        c, s = np.cos(theta), np.sin(theta)
        return a_r * c - a_theta * s / r, a_r * s + a_theta * c / r

    def on_grid(self) -> OneFormFibre:
        g = self.grid
        batch = self.a.shape[:-2]
        theta = np.broadcast_to(g.theta, batch + (g.ntheta,))
        R = g.r[:, None]
        a_r, a_t = [], []
        for i, r in enumerate(g.r):
            ar, at = self._polar(self.a[..., i, :], r, theta)
            a_r.append(ar)
            a_t.append(at)
        a_r = np.stack(a_r, axis=-2)
        a_t = np.stack(a_t, axis=-2)
        ax, ay = self._cartesian(a_r, a_t, R, g.theta)
        return OneFormFibre(g, ax, ay, dirichlet=True)

    def at(self, x, y):
        """Cartesian components at points ``x, y`` of shape ``batch + (p,)``."""
        if self._interp is None:
            self._interp = self.grid.interpolant(self.a, trim=_TRIM)
        r = np.hypot(x, y)
        theta = np.arctan2(y, x)
        a = self._interp(x, y)
        a_r, a_t = self._polar(a, r, theta)
        return self._cartesian(a_r, a_t, r, theta)


def _obstruction_tol(grid: PolarGrid, rho: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(rho))), 1.0) if np.size(rho) else 1.0
    return 1e-9 * grid.domain.area * scale


def primitive_one_form(rho: AreaForm, tol: float | None = None) -> tuple[OneFormFibre, float]:
    """Dirichlet ``alpha`` with ``d alpha = rho``; returns it with the max residual ``|d alpha - rho|``.

    Raises :class:`CohomologyObstructionError` when ``|integral rho|``
    exceeds ``tol`` (default ``1e-9`` times area times ``max(1, max |rho|)``).
    """
    grid = rho.grid
    dens = np.asarray(rho.density, dtype=float)
    tol = _obstruction_tol(grid, dens) if tol is None else float(tol)
    total = np.atleast_1d(grid.integrate(dens))
    worst = float(np.max(np.abs(total))) if total.size else 0.0
    if worst > tol:
        raise CohomologyObstructionError(
            f"the two-form has total integral {worst:.6g} (tolerance {tol:.3g}); "
            "only zero-integral forms have a primitive vanishing tangentially on the boundary",
            integral=worst,
        )
    alpha = FibrePrimitive(grid, dens).on_grid()
    residual = float(np.max(np.abs(alpha.curl() - dens))) if dens.size else 0.0
    return alpha, residual


# -- the Moser flow ----------------------------------------------------------


def _check_densities(w: np.ndarray, grid: PolarGrid, t: np.ndarray):
    bad = ~(w > 0)
    if np.any(bad):
        k, i, j = np.argwhere(bad)[0]
        witness = (float(t[k]), float(grid.x[i, j]), float(grid.y[i, j]))
        raise DegeneracyError(
            f"fibre-form density {w[k, i, j]:.6g} is not positive at (t, x, y) = {witness}; "
            "the angle is not transverse to the field",
            witness=witness,
        )


def moser_flow(
    adapted: FieldSpec,
    grid: PolarGrid,
    nt: int,
    reference: float = 0.0,
    s_steps: int = DEFAULT_S_STEPS,
) -> MoserResult:
    """Fibre maps ``Psi_t`` with ``Psi_t^* omega_t = omega_o`` at ``nt`` uniform angles.

    ``adapted`` is the field in coordinates whose toroidal angle is the
    transverse angle (see :func:`~fieldham.fields.spec.adapt_angle`). The
    flow of ``X_s`` is integrated with ``s_steps`` classical RK4 steps from
    every grid node; Jacobians are spectral derivatives of the sampled maps.
    """
    if s_steps < 1:
        raise InvalidArgumentError("s_steps must be positive")
    t = _angle_nodes(nt, reference)
    w = _density(adapted, t, grid)
    _check_densities(w, grid, t)
    w_o = w[0]
    rho = w - w_o
    total = grid.integrate(rho)
    tol = _obstruction_tol(grid, rho)
    if np.max(np.abs(total)) > tol:
        k = int(np.argmax(np.abs(total)))
        raise CohomologyObstructionError(
            f"flux through the slice t = {t[k]:.6g} differs from the reference by {total[k]:.6g}",
            integral=float(total[k]),
        )
    prim = FibrePrimitive(grid, rho)
    shape = (nt, grid.nr * grid.ntheta)
    P = np.stack([np.broadcast_to(grid.x.ravel(), shape), np.broadcast_to(grid.y.ravel(), shape)]).copy()
    T = np.broadcast_to(t[:, None], shape)
    t_ref = np.full(shape, float(reference))

    def velocity(s, pts):
        x, y = pts
        ax, ay = prim.at(x, y)
        wt = adapted._components(T, x, y)[0]
        wo = adapted._components(t_ref, x, y)[0]
        ws = s * wt + (1.0 - s) * wo
        return np.stack([-ay / ws, ax / ws])

    if np.any(rho != 0.0):
        ds = 1.0 / s_steps
        for i in range(s_steps):
            s = i * ds
            k1 = velocity(s, P)
            k2 = velocity(s + 0.5 * ds, P + 0.5 * ds * k1)
            k3 = velocity(s + 0.5 * ds, P + 0.5 * ds * k2)
            k4 = velocity(s + ds, P + ds * k3)
            P = P + (ds / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            depth = signed_distance(grid.domain, P[0], P[1])
            if np.min(depth) < -BOUNDARY_TOL * max(1.0, grid.domain.diameter):
                raise InstabilityError(
                    f"the Moser flow left the fibre by {-np.min(depth):.3g} at s = {s + ds:.4g}; "
                    "increase s_steps or the fibre resolution"
                )
    psi_x = P[0].reshape((nt,) + grid.shape)
    psi_y = P[1].reshape((nt,) + grid.shape)
    jac = _jacobian(grid, psi_x, psi_y)
    w_psi = adapted._components(t[:, None, None], psi_x, psi_y)[0]
    pullback = float(np.max(np.abs(w_psi * jac - w_o)))
    ring = grid.boundary_mask
    radii = np.hypot(psi_x, psi_y)[:, ring]
    boundary = float(np.max(np.abs(radii - grid.R[ring]))) if ring.any() else 0.0
    return MoserResult(t, psi_x, psi_y, jac, pullback, boundary, float(np.min(jac)), s_steps)


def _jacobian(grid: PolarGrid, psi_x: np.ndarray, psi_y: np.ndarray) -> np.ndarray:
    xx, xy = grid.gradient(psi_x)
    yx, yy = grid.gradient(psi_y)
    return xx * yy - xy * yx


# -- nu and H ----------------------------------------------------------------


def extract_nu(adapted: FieldSpec, grid: PolarGrid, flow: MoserResult) -> tuple[OneFormFibre, dict]:
    """The one-forms ``nu_t`` with ``Psi^* beta = omega_o + nu_t ^ dt``.

    With ``B~ = DPsi^{-1} (B_fib o Psi - d_t Psi B^t o Psi)`` and ``J = det DPsi``,
    ``nu_t = J (B~^x dy - B~^y dx)``. Returns the family and the closedness
    (curl) and Dirichlet (tangential) residuals.
    """
    t = flow.t
    px, py = flow.psi_x, flow.psi_y
    T = np.broadcast_to(t[:, None, None], px.shape)
    bt, bx, by = adapted._components(T, px, py)
    nt = t.size
    dpx = fourier_derivative(px - grid.x, axis=0) if nt > 1 else np.zeros_like(px)
    dpy = fourier_derivative(py - grid.y, axis=0) if nt > 1 else np.zeros_like(py)
    vx = bx - dpx * bt
    vy = by - dpy * bt
    xx, xy = grid.gradient(px)
    yx, yy = grid.gradient(py)
    # J * DPsi^{-1} is the adjugate, so J B~ = adj(DPsi) v.
    jbx = yy * vx - xy * vy
    jby = -yx * vx + xx * vy
    nu = OneFormFibre(grid, -jby, jbx, dirichlet=True)
    report = {"closedness": float(np.max(np.abs(nu.curl()))), "dirichlet": nu.tangential_residual()}
    return nu, report


def cohomology_period(nu: OneFormFibre, radius: float | None = None) -> np.ndarray:
    """Loop integrals of ``nu`` around the circle ``r = radius`` (default: the core circle).

    Disk fibres have no non-contractible loop, so all periods are zero.
    """
    grid = nu.grid
    batch = nu.ax.shape[:-2]
    if grid.is_disk:
        return np.zeros(batch)
    dom = grid.domain
    radius = 0.5 * (dom.r0 + dom.r1) if radius is None else float(radius)
    if not dom.r0 <= radius <= dom.r1:
        raise InvalidArgumentError(f"radius {radius!r} is outside the annulus")
    n = grid.ntheta
    th = TWO_PI * np.arange(n) / n
    x = np.broadcast_to(radius * np.cos(th), batch + (n,))
    y = np.broadcast_to(radius * np.sin(th), batch + (n,))
    a_theta = grid.interpolant(nu.angular())(x, y)
    return TWO_PI * np.mean(a_theta, axis=-1)


def _normalization_node(grid: PolarGrid) -> tuple[int, int]:
    """Index of the fixed boundary node at angle 0 where ``H`` vanishes."""
    return (0 if not grid.is_disk else grid.nr - 1), 0


def extract_hamiltonian(
    nu: OneFormFibre,
    closedness: float | None = None,
    period_tol: float = PERIOD_TOL,
    closedness_tol: float = CLOSEDNESS_TOL,
) -> HamiltonianField:
    """``H_t(x) = -int nu_t`` along paths from a fixed boundary node ``x0``.

    Path family A runs radially along ``theta = 0`` and then around the
    circle through ``x``; family B runs around the boundary circle through
    ``x0`` and then radially. Their difference is the path-independence
    residual.
    """
    grid = nu.grid
    periods = np.atleast_1d(cohomology_period(nu))
    worst = float(np.max(np.abs(periods))) if periods.size else 0.0
    if worst >= period_tol:
        raise NonExactError(
            f"loop period {worst:.6g} of nu is not zero; the family is closed but not exact "
            "(only a locally Hamiltonian description exists)",
            periods=periods,
        )
    closedness = float(np.max(np.abs(nu.curl()))) if closedness is None else closedness
    if closedness >= closedness_tol:
        raise RepresentationFailureError(f"nu is not closed: curl residual {closedness:.3g}", value=closedness)

    i0, _ = _normalization_node(grid)
    a, b = grid._span
    half = 0.5 * (b - a)
    lower = -1.0 if not grid.is_disk else 1.0
    nu_r = nu.radial()
    nu_t = nu.angular()

    def radial_integral(f):
        # The radial component changes sign under the fold r -> -r.
        return grid.physical(cheb_cumulative(grid.full(f, parity=-1), axis=-2, lower=lower)) * half

    def angular_integral(f):
        G, mean = fourier_cumulative(f, axis=-1)
        return G + mean[..., None] * grid.theta

    ray = radial_integral(nu_r)[..., :, :1]
    H_a = -(ray + angular_integral(nu_t))
    ring = angular_integral(nu_t[..., i0 : i0 + 1, :])
    H_b = -(ring + radial_integral(nu_r))
    x0 = (float(grid.x[i0, 0]), float(grid.y[i0, 0]))
    residual = float(np.max(np.abs(H_a - H_b)))
    return HamiltonianField(H_a, x0, residual, periods)


# -- the full pipeline --------------------------------------------------------


def hamiltonian_representation(
    spec: FieldSpec,
    angle: tuple[int, int] = (0, 1),
    nr: int = 64,
    ntheta: int = 64,
    nt: int = 32,
    reference: float = 0.0,
    s_steps: int = DEFAULT_S_STEPS,
    flux_rtol: float = FLUX_RTOL,
    strict: bool = True,
    pullback_tol: float = PULLBACK_TOL,
    nu_tol: float = NU_TOL,
    period_tol: float = PERIOD_TOL,
) -> HamiltonianRep:
    """Run fibre forms, flux check, Moser flow, ``nu`` and ``H`` extraction.

    ``angle = (m, 1)`` is the transverse angle used as time. Each stage
    raises an error naming its obstruction; with ``strict`` the pullback and
    ``nu`` residuals are also required to lie below ``pullback_tol`` and
    ``nu_tol``. Loop periods of ``nu`` at or above ``period_tol`` always raise.
    """
    m, n = angle
    if n != 1:
        raise InvalidArgumentError(f"the representation uses angles with n = 1, got {angle}")
    tang = tangency_residual(spec)
    if tang >= TANGENCY_TOL:
        raise PreconditionError(f"the field is not tangential to the boundary (max |B.n| = {tang:.3g})", witness=tang)
    adapted = adapt_angle(spec, angle)
    grid = PolarGrid(spec.domain, nr, ntheta)
    t = _angle_nodes(nt, reference)
    w = _density(adapted, t, grid)
    _check_densities(w, grid, t)

    fluxes = grid.integrate(w)
    scale = float(np.max(np.abs(fluxes)))
    deviation = float(np.max(fluxes) - np.min(fluxes))
    if deviation > flux_rtol * scale:
        raise CohomologyObstructionError(
            f"flux through the angle slices varies by {deviation:.6g} (relative {deviation / scale:.3g}); "
            "the fibre forms are not cohomologous",
            integral=deviation,
        )

    flow = moser_flow(adapted, grid, nt, reference, s_steps)
    if flow.min_jacobian <= 0:
        raise DegeneracyError(f"Psi reverses orientation (min Jacobian {flow.min_jacobian:.3g})")
    if strict and flow.pullback_residual >= pullback_tol:
        raise RepresentationFailureError(
            f"pullback residual {flow.pullback_residual:.3g} exceeds {pullback_tol:g}; increase s_steps or resolution",
            value=flow.pullback_residual,
        )
    nu, nu_report = extract_nu(adapted, grid, flow)
    if strict:
        for key in ("closedness", "dirichlet"):
            if nu_report[key] >= nu_tol:
                raise RepresentationFailureError(f"nu {key} residual {nu_report[key]:.3g} exceeds {nu_tol:g}", value=nu_report[key])
    ham = extract_hamiltonian(nu, nu_report["closedness"], period_tol, CLOSEDNESS_TOL if strict else np.inf)
    Hx, Hy = grid.gradient(ham.H)
    decomposition = float(
        max(
            flow.pullback_residual,
            np.max(np.abs(nu.ax + Hx)),
            np.max(np.abs(nu.ay + Hy)),
        )
    )
    residuals = {
        "flux_deviation": deviation / scale,
        "pullback": flow.pullback_residual,
        "boundary": flow.boundary_residual,
        "min_jacobian": flow.min_jacobian,
        "closedness": nu_report["closedness"],
        "dirichlet": nu_report["dirichlet"],
        "period": float(np.max(np.abs(ham.periods))) if ham.periods.size else 0.0,
        "path_independence": ham.path_residual,
        "decomposition": decomposition,
    }
    return HamiltonianRep(
        (m, n), float(reference), grid, t, w[0], ham.H, flow.psi_x, flow.psi_y, nu.ax, nu.ay, ham.x0, residuals, s_steps
    )


__all__ = [
    "AreaForm",
    "FibrePrimitive",
    "FluxReport",
    "HamiltonianField",
    "HamiltonianRep",
    "MoserResult",
    "OneFormFibre",
    "cohomology_period",
    "extract_hamiltonian",
    "extract_nu",
    "fibre_form",
    "flux",
    "hamiltonian_representation",
    "moser_flow",
    "primitive_one_form",
    "smootherstep",
]
