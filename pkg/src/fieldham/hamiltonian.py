"""Non-autonomous Hamiltonian dynamics from a representation ``(omega_o, H, Psi)``.

The evolution field ``E_H = d_t + X_H`` on the angle times the fibre has
``X_H = (-dH/dy, dH/dx) / w_o``, so ``i_{X_H} omega_o = -dH``. Its orbits
are the field lines in the coordinates produced by ``Psi``; mapping them
back through ``Psi`` must reproduce the Poincare section of the field.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core.angles import TWO_PI
from .core.domains import check_inside
from .core.spectral import trig_cardinal_weights
from .errors import InvalidArgumentError, StagnationError
from .fields.spec import FieldSpec, adapt_angle
from .moser import HamiltonianRep, MoserResult, _jacobian, extract_nu
from .tracer.integrator import IntegrationStats, integrate
from .tracer.tracing import DEFAULT_ATOL, DEFAULT_RTOL, section_orbits

NEWTON_ITERATIONS = 50
NEWTON_TOL = 1e-12
_TRIM = 1e-15


class EvolutionField:
    """Vector field ``X_H`` of a representation at any angle ``t`` and fibre point.

    ``H`` is interpolated spectrally on the fibre and trigonometrically in
    ``t`` through the stored angle nodes.
    """

    def __init__(self, rep: HamiltonianRep):
        self.rep = rep
        grid = rep.grid
        self._H = grid.interpolant(rep.H, trim=_TRIM)
        self._w = grid.interpolant(rep.w_o, trim=_TRIM)
        self._cache: tuple[float, object] | None = None

    def _slice(self, t: float):
        if self._cache is None or self._cache[0] != t:
            weights = trig_cardinal_weights(t, self.rep.t.size, self.rep.t[0])
            self._cache = (t, self._H.combine(weights))
        return self._cache[1]

    def hamiltonian(self, t: float, x, y) -> np.ndarray:
        return self._slice(float(t))(x, y)

    def __call__(self, t: float, x, y) -> tuple[np.ndarray, np.ndarray]:
        _, hx, hy = self._slice(float(t)).with_gradient(x, y)
        w = self._w(x, y)
        return -hy / w, hx / w

    def lift(self, t: float, x, y) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Components ``(dt(E), X^x, X^y)`` of ``E_H = d_t + X_H``; the first is identically one."""
        vx, vy = self(t, x, y)
        return np.ones_like(vx), vx, vy


def evolution_field(rep: HamiltonianRep) -> EvolutionField:
    return EvolutionField(rep)


@dataclass
class HamiltonOrbits:
    """Orbits of ``E_H`` sampled at ``t = t0 + 2 pi k``; arrays have shape ``(n_seeds, n_transits + 1)``.

    ``area_defect`` is the largest ``|w_o(F(x)) det DF(x) / w_o(x) - 1|`` of
    the once-around map ``F`` over the seeds, from central differences with
    step ``fd_step`` (``nan`` when not requested).
    """

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    stats: IntegrationStats
    area_defect: float = float("nan")
    fd_step: float = 0.0


def integrate_hamilton(
    rep: HamiltonianRep,
    points,
    n_transits: int,
    t0: float | None = None,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    area_check: bool = False,
    fd_step: float = 1e-5,
) -> HamiltonOrbits:
    """Integrate ``dx/dt = X_H(t, x)`` from ``t0`` (default: the reference angle) over whole transits."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[-1] != 2:
        raise InvalidArgumentError("points must have shape (n, 2)")
    if n_transits < 0:
        raise InvalidArgumentError("the number of transits must be non-negative")
    check_inside(rep.grid.domain, pts[:, 0], pts[:, 1])
    field = EvolutionField(rep)
    t0 = rep.reference if t0 is None else float(t0)
    n = len(pts)
    if area_check:
        offsets = fd_step * np.array([[1, 0], [-1, 0], [0, 1], [0, -1]], dtype=float)
        Y = np.concatenate([pts] + [pts + o for o in offsets])
    else:
        Y = pts.copy()

    def rhs(t, state):
        vx, vy = field(t, state[:, 0], state[:, 1])
        return np.column_stack([vx, vy])

    xs = [Y[:n, 0].copy()]
    ys = [Y[:n, 1].copy()]
    stats = IntegrationStats()
    t = t0
    area = float("nan")
    for k in range(n_transits):
        t, Y, st = integrate(rhs, t, Y, t0 + TWO_PI * (k + 1), rtol, atol)
        stats.steps += st.steps
        stats.rejected += st.rejected
        stats.evaluations += st.evaluations
        stats.max_error = max(stats.max_error, st.max_error)
        xs.append(Y[:n, 0].copy())
        ys.append(Y[:n, 1].copy())
        if area_check and k == 0:
            xp, xm, yp, ym = (Y[n * (i + 1) : n * (i + 2)] for i in range(4))
            dx = (xp - xm) / (2 * fd_step)
            dy = (yp - ym) / (2 * fd_step)
            det = dx[:, 0] * dy[:, 1] - dx[:, 1] * dy[:, 0]
            w = field._w
            ratio = w(Y[:n, 0], Y[:n, 1]) * det / w(pts[:, 0], pts[:, 1])
            area = float(np.max(np.abs(ratio - 1.0)))
    times = t0 + TWO_PI * np.arange(n_transits + 1)
    return HamiltonOrbits(times, np.column_stack(xs), np.column_stack(ys), stats, area, fd_step if area_check else 0.0)


class FibreMap:
    """``Psi_t`` at one stored angle node as an interpolated map with inverse."""

    def __init__(self, rep: HamiltonianRep, index: int = 0):
        grid = rep.grid
        self._px = grid.interpolant(rep.psi_x[index], trim=_TRIM)
        self._py = grid.interpolant(rep.psi_y[index], trim=_TRIM)

    def __call__(self, x, y):
        return self._px(x, y), self._py(x, y)

    def inverse(self, x, y):
        """Solve ``Psi(u) = (x, y)`` by Newton iteration started at ``(x, y)``."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        u, v = x.copy(), y.copy()
        for _ in range(NEWTON_ITERATIONS):
            fx, ax, ay = self._px.with_gradient(u, v)
            fy, bx, by = self._py.with_gradient(u, v)
            rx, ry = fx - x, fy - y
            if np.max(np.abs(rx), initial=0.0) <= NEWTON_TOL and np.max(np.abs(ry), initial=0.0) <= NEWTON_TOL:
                return u, v
            det = ax * by - ay * bx
            u = u - (by * rx - ay * ry) / det
            v = v - (-bx * rx + ax * ry) / det
        worst = int(np.argmax(np.hypot(rx, ry)))
        raise StagnationError(
            f"inverting Psi did not converge after {NEWTON_ITERATIONS} Newton steps",
            point=(float(x.flat[worst]), float(y.flat[worst])),
        )


@dataclass
class DynamicsComparison:
    """Section crossings of the field (route A) against mapped Hamiltonian orbits (route B).

    Point arrays have shape ``(n_seeds, n_transits, 2)``.
    """

    seeds: np.ndarray
    route_a: np.ndarray
    route_b: np.ndarray

    @property
    def distance(self) -> np.ndarray:
        return np.hypot(*(self.route_a - self.route_b).transpose(2, 0, 1))

    @property
    def max_discrepancy(self) -> float:
        return float(np.max(self.distance)) if self.distance.size else 0.0


def compare_dynamics(
    spec: FieldSpec,
    rep: HamiltonianRep,
    points,
    n_transits: int,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> DynamicsComparison:
    """Compare the first-return orbits of ``spec`` with those of ``E_H`` for the same seeds.

    Route A traces the field to the section ``t = reference``. Route B
    starts at ``Psi_o^{-1}(x)``, integrates ``E_H`` over whole transits and
    maps the iterates back through ``Psi_o``.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    table = section_orbits(spec, rep.angle, rep.reference, pts, n_transits, rtol, atol)
    route_a = np.stack([table.x, table.y], axis=-1)
    psi = FibreMap(rep, 0)
    u, v = psi.inverse(pts[:, 0], pts[:, 1])
    orbits = integrate_hamilton(rep, np.column_stack([u, v]), n_transits, rep.reference, rtol, atol)
    bx, by = psi(orbits.x[:, 1:], orbits.y[:, 1:])
    return DynamicsComparison(pts, route_a, np.stack([bx, by], axis=-1))


def decomposition_residual(spec: FieldSpec, rep: HamiltonianRep) -> float:
    """``max(|J w_t(Psi) - w_o|, |nu + dH|)`` with ``nu`` recomputed from ``spec`` and the stored ``Psi``."""
    adapted = adapt_angle(spec, rep.angle)
    grid = rep.grid
    jac = _jacobian(grid, rep.psi_x, rep.psi_y)
    w_psi = adapted._components(rep.t[:, None, None], rep.psi_x, rep.psi_y)[0]
    pullback = float(np.max(np.abs(w_psi * jac - rep.w_o)))
    flow = MoserResult(rep.t, rep.psi_x, rep.psi_y, jac, pullback, 0.0, float(np.min(jac)), rep.s_steps)
    nu, _ = extract_nu(adapted, grid, flow)
    hx, hy = grid.gradient(rep.H)
    return float(max(pullback, np.max(np.abs(nu.ax + hx)), np.max(np.abs(nu.ay + hy))))


__all__ = [
    "DynamicsComparison",
    "EvolutionField",
    "FibreMap",
    "HamiltonOrbits",
    "compare_dynamics",
    "decomposition_residual",
    "evolution_field",
    "integrate_hamilton",
]
