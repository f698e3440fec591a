"""Direct vector-potential constructions in double-Clebsch form.

Two constructions write ``beta = dP ^ dQ + dT ^ dH``:

* :func:`local_flux_coordinates` integrates the field along one coordinate
  of a rectangular chart ``(u1, u2, u3)`` with ``Q = u1`` and ``T = u3``;
* :func:`weyl_potential` integrates along radial rays of the fibre, giving
  a potential ``alpha = P dtheta - H dphi`` with no ``dr`` component.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson, quad_vec

from .core.angles import TWO_PI
from .core.domains import Annulus, Disk
from .core.grids import PolarGrid
from .core.spectral import fourier_derivative
from .errors import (
    DegenerateTransformationError,
    InvalidArgumentError,
    PreconditionError,
    SingularGaugeError,
)
from .fields.diagnostics import tangency_residual
from .fields.spec import FieldSpec

WEYL_RTOL = 1e-10
TANGENCY_TOL = 1e-8
AXIS_RADII = np.logspace(-6, -2, 9)
AXIS_GROWTH = 10.0


@dataclass
class ClebschPair:
    """Potentials ``P`` and ``H`` on a node grid and their diagnostics.

    ``coords`` maps coordinate names to node arrays broadcastable to the
    shape of ``P``. ``residual`` is the max-norm mismatch between the
    two-form rebuilt from ``(P, H)`` and ``beta``. ``degenerate`` lists the
    node indices where the transformation Jacobian vanishes.
    """

    P: np.ndarray
    H: np.ndarray
    coords: dict
    chart: str
    residual: float
    degenerate: np.ndarray = field(default_factory=lambda: np.zeros((0, 3), dtype=int))
    diagnostics: dict = field(default_factory=dict)


# -- local flux coordinates ------------------------------------------------


def _node_index(nodes: np.ndarray, value: float, name: str) -> int:
    i = int(np.argmin(np.abs(nodes - value)))
    if abs(nodes[i] - value) > 1e-12 * max(1.0, abs(value)):
        raise InvalidArgumentError(f"base {name} = {value!r} is not a grid node")
    return i


def _cumulative_from(values: np.ndarray, nodes: np.ndarray, axis: int, start: int) -> np.ndarray:
    """``integral_{nodes[start]}^{u} values du`` along ``axis``, Richardson-refined trapezoid."""
    total = cumulative_simpson(values, x=nodes, axis=axis, initial=0.0)
    return total - np.take(total, [start], axis=axis)


def local_flux_coordinates(
    u1,
    u2,
    u3,
    sqrtg_B: np.ndarray,
    a: float,
    b: float,
    degeneracy_tol: float = 1e-10,
    max_degenerate_fraction: float = 0.0,
    chart: str = "(u1, u2, u3)",
) -> ClebschPair:
    """Flux coordinates ``(q, p, t) = (u1, P, u3)`` on a rectangular chart.

    ``sqrtg_B`` has shape ``(3, n1, n2, n3)`` and holds the densities
    ``sqrt(g) B^i`` on the tensor nodes. With ``c2 = 0``::

        P = -int_a^{u2} sqrt(g) B^3 dv + c1,   c1 = int_b^{u3} sqrt(g) B^2(u1, a, v) dv
        H = -int_a^{u2} sqrt(g) B^1 dv

    ``a`` and ``b`` must be nodes of ``u2`` and ``u3``. The relation
    ``d3 P + d1 H = sqrt(g) B^2`` is checked by second-order differences and
    reported as ``residual``. Nodes with ``|sqrt(g) B^3| <= degeneracy_tol``
    make the transformation singular; if their fraction exceeds
    ``max_degenerate_fraction`` a :class:`DegenerateTransformationError` is raised.
    """
    u1, u2, u3 = (np.asarray(u, dtype=float) for u in (u1, u2, u3))
    dens = np.asarray(sqrtg_B, dtype=float)
    if dens.shape != (3, u1.size, u2.size, u3.size):
        raise InvalidArgumentError(f"densities must have shape (3, {u1.size}, {u2.size}, {u3.size}), got {dens.shape}")
    for name, u in (("u1", u1), ("u2", u2), ("u3", u3)):
        if u.size < 3 or np.any(np.diff(u) <= 0):
            raise InvalidArgumentError(f"{name} must hold at least 3 strictly increasing nodes")
    if not np.all(np.isfinite(dens)):
        raise InvalidArgumentError("field densities must be finite")
    b1, b2, b3 = dens
    ia = _node_index(u2, a, "a")
    ib = _node_index(u3, b, "b")

    bad = np.abs(b3) <= degeneracy_tol
    degenerate = np.argwhere(bad)
    if bad.any() and bad.mean() > max_degenerate_fraction:
        i, j, k = degenerate[0]
        raise DegenerateTransformationError(
            f"sqrt(g) B^3 vanishes on {bad.sum()} of {bad.size} nodes (first at u = "
            f"({u1[i]:.6g}, {u2[j]:.6g}, {u3[k]:.6g})); the field is not transverse to the u3 level sets",
            nodes=degenerate,
        )

    c1 = _cumulative_from(b2[:, ia, :], u3, axis=-1, start=ib)
    P = -_cumulative_from(b3, u2, axis=1, start=ia) + c1[:, None, :]
    H = -_cumulative_from(b1, u2, axis=1, start=ia)

    d3P = np.gradient(P, u3, axis=2, edge_order=2)
    d1H = np.gradient(H, u1, axis=0, edge_order=2)
    mismatch = d3P + d1H - b2
    d2P = np.gradient(P, u2, axis=1, edge_order=2)
    d2H = np.gradient(H, u2, axis=1, edge_order=2)
    residual = float(max(np.max(np.abs(mismatch)), np.max(np.abs(d2P + b3)), np.max(np.abs(d2H + b1))))
    compat = float(np.max(np.abs(np.gradient(mismatch, u2, axis=1, edge_order=2))))
    coords = {"u1": u1[:, None, None], "u2": u2[None, :, None], "u3": u3[None, None, :]}
    return ClebschPair(
        P,
        H,
        coords,
        chart,
        residual,
        degenerate,
        {"c1": c1, "a": float(a), "b": float(b), "compatibility": compat, "identity_residual": float(np.max(np.abs(mismatch)))},
    )


def sample_chart(spec: FieldSpec, kind: str, n: int = 65, nt: int = 33):
    """Densities ``sqrt(g) B^i`` of a field on a standard rectangular chart.

    ``kind = "cartesian"``: ``(x, y, phi)`` over the square inscribed in the
    fibre (for an annulus, a square inside the right half of the ring).
    ``kind = "polar"``: ``(r, theta, phi)`` with ``sqrt(g) = r`` (annulus only).
    Returns ``(u1, u2, u3, densities, chart name)``.
    """
    dom = spec.domain
    u3 = np.linspace(0.0, TWO_PI, nt)
    if kind == "cartesian":
        if isinstance(dom, Disk):
            half = dom.R / np.sqrt(2.0)
            u1 = np.linspace(-half, half, n)
            u2 = np.linspace(-half, half, n)
        else:
            # Largest axis-aligned square in {x > 0} between the two circles.
            side = _annulus_square_side(dom.r0, dom.r1)
            u1 = np.linspace(dom.r0, dom.r0 + side, n)
            u2 = np.linspace(-0.5 * side, 0.5 * side, n)
        U1, U2, U3 = np.meshgrid(u1, u2, u3, indexing="ij")
        bphi, bx, by = spec.evaluate(U3, U1, U2)
        return u1, u2, u3, np.stack([bx, by, bphi]), "(x, y, phi)"
    if kind == "polar":
        if not isinstance(dom, Annulus):
            raise InvalidArgumentError("the polar chart covers an annulus fibre only")
        u1 = np.linspace(dom.r0, dom.r1, n)
        u2 = np.linspace(0.0, TWO_PI, n)
        U1, U2, U3 = np.meshgrid(u1, u2, u3, indexing="ij")
        X, Y = U1 * np.cos(U2), U1 * np.sin(U2)
        bphi, bx, by = spec.evaluate(U3, X, Y)
        br = (X * bx + Y * by) / U1
        btheta = (X * by - Y * bx) / U1**2
        return u1, u2, u3, np.stack([U1 * br, U1 * btheta, U1 * bphi]), "(r, theta, phi)"
    raise InvalidArgumentError(f"unknown chart {kind!r}; use 'cartesian' or 'polar'")


def _annulus_square_side(r0: float, r1: float) -> float:
    # Square [r0, r0 + s] x [-s/2, s/2]; its outer corners touch the outer circle.
    # (r0 + s)^2 + s^2/4 = r1^2.
    qa, qb, qc = 1.25, 2.0 * r0, r0 * r0 - r1 * r1
    return (-qb + np.sqrt(qb * qb - 4.0 * qa * qc)) / (2.0 * qa)


# -- Weyl gauge ------------------------------------------------------------


def _ray_integrands(spec: FieldSpec, t, r, theta, r_base: float):
    """``(r - r_b) * s * (B^phi, B^theta)`` at ``s = r_b + u (r - r_b)`` as functions of ``u``."""
    c, sn = np.cos(theta), np.sin(theta)
    span = r - r_base

    def f(u):
        s = r_base + u * span
        bphi, bx, by = spec._components(t, s * c, s * sn)
        # s * B^theta = cos(theta) B^y - sin(theta) B^x, free of the 1/s factor.
        return np.stack([span * s * bphi, span * (c * by - sn * bx)])

    return f


def _axis_check(spec: FieldSpec, n_theta: int = 16, n_t: int = 8) -> dict:
    """Growth of ``s B^phi`` and ``s B^theta`` toward the axis along sampled rays."""
    s = AXIS_RADII[:, None, None]
    th = TWO_PI * np.arange(n_theta) / n_theta
    t = TWO_PI * np.arange(n_t) / n_t
    T, S, TH = np.broadcast_arrays(t[None, None, :], s, th[None, :, None])
    bphi, bx, by = spec._components(T, S * np.cos(TH), S * np.sin(TH))
    worst = 0.0
    for name, v in (("s B^phi", S * bphi), ("s B^theta", np.cos(TH) * by - np.sin(TH) * bx)):
        mag = np.abs(v)
        med = np.median(mag, axis=0)
        inner = mag[0]
        if not np.all(np.isfinite(mag)) or np.any(inner > AXIS_GROWTH * med):
            bad = ~np.isfinite(inner) | (inner > AXIS_GROWTH * med)
            j, k = np.argwhere(bad)[0]
            raise SingularGaugeError(
                f"{name} grows toward the axis: |value| = {inner[j, k]:.6g} at r = {AXIS_RADII[0]:.1e}, "
                f"median {med[j, k]:.6g} over r in [1e-6, 1e-2] (theta = {th[j]:.6g}, t = {t[k]:.6g})"
            )
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = np.where(med > 0, inner / med, 0.0)
        worst = max(worst, float(np.max(ratio)))
    return {"axis_growth": worst}


def weyl_potential(
    spec: FieldSpec,
    nr: int = 128,
    ntheta: int = 128,
    nt: int = 8,
    rtol: float = WEYL_RTOL,
) -> ClebschPair:
    """Weyl-gauge potential ``alpha = P dtheta - H dphi`` along radial rays.

    With ``sqrt(g) = r`` in polar coordinates::

        P = int_{r_b}^{r} s B^phi(s) ds,    H = int_{r_b}^{r} s B^theta(s) ds

    where ``r_b = 0`` on a disk (retraction to the axis) and ``r_b = r0`` on
    an annulus (retraction to the inner circle, which needs a tangential
    field). The ray integrals use adaptive Gauss-Kronrod quadrature to
    relative tolerance ``rtol``. ``residual`` is ``max |d alpha - beta|`` over
    all nodes, with ``d alpha`` computed spectrally on the polar grid and in
    ``phi``.
    """
    dom = spec.domain
    if isinstance(dom, Disk):
        r_base = 0.0
        diagnostics = _axis_check(spec)
    elif isinstance(dom, Annulus):
        r_base = dom.r0
        tang = tangency_residual(spec)
        if tang >= TANGENCY_TOL:
            raise PreconditionError(
                f"the field is not tangential to the boundary (max |B.n| = {tang:.3g}); "
                "the retraction to the inner circle needs a Dirichlet two-form",
                witness=tang,
            )
        diagnostics = {"tangency": tang}
    else:
        raise InvalidArgumentError(f"unsupported domain {dom!r}")
    if nt < 1:
        raise InvalidArgumentError("at least one angle slice is required")

    grid = PolarGrid(dom, nr, ntheta)
    t = TWO_PI * np.arange(nt) / nt
    T = np.broadcast_to(t[:, None, None], (nt,) + grid.shape)
    Rn = np.broadcast_to(grid.R, T.shape)
    TH = np.broadcast_to(grid.T, T.shape)
    f = _ray_integrands(spec, T, Rn, TH, r_base)
    vals, err = quad_vec(f, 0.0, 1.0, epsabs=1e-14, epsrel=rtol, norm="max", quadrature="gk15")
    P, H = vals
    diagnostics["quadrature_error"] = float(err)

    residual = _weyl_residual(spec, grid, t, P, H)
    X = np.broadcast_to(grid.x, T.shape)
    Y = np.broadcast_to(grid.y, T.shape)
    coords = {"t": T, "x": X, "y": Y, "r": Rn, "theta": TH}
    diagnostics["alpha_r"] = 0.0
    chart = "weyl (disk, axis retraction)" if r_base == 0.0 else "weyl (annulus, inner-circle retraction)"
    return ClebschPair(P, H, coords, chart, residual, diagnostics=diagnostics)


def weyl_two_form(grid: PolarGrid, P: np.ndarray, H: np.ndarray):
    """Cartesian components ``(beta_xy, beta_yphi, beta_phix)`` of ``d(P dtheta - H dphi)``.

    ``P`` and ``H`` have shape ``(nt, nr, ntheta)`` on uniform angles ``t``.
    """
    rr = grid.r[:, None]
    X, Y = grid.x, grid.y
    P_t = fourier_derivative(P, axis=0)
    Hx, Hy = grid.gradient(H)
    xy = grid.d_r(P) / rr
    yphi = -Hy - P_t * X / rr**2
    phix = Hx - P_t * Y / rr**2
    return xy, yphi, phix


def _weyl_residual(spec: FieldSpec, grid: PolarGrid, t: np.ndarray, P: np.ndarray, H: np.ndarray) -> float:
    xy, yphi, phix = weyl_two_form(grid, P, H)
    bphi, bx, by = spec.evaluate(t[:, None, None], grid.x[None], grid.y[None])
    return float(max(np.max(np.abs(xy - bphi)), np.max(np.abs(yphi - bx)), np.max(np.abs(phix - by))))


__all__ = [
    "ClebschPair",
    "local_flux_coordinates",
    "sample_chart",
    "weyl_potential",
    "weyl_two_form",
]
