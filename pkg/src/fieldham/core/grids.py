"""Fibre grids with quadrature weights and spectral calculus.

Two families are provided:

* :class:`PolarGrid` -- Chebyshev-Lobatto radii by uniform angles. On the
  annulus the radii span ``[r0, r1]``. On the disk the grid uses the folded
  diameter ``[-R, R]`` with an even number of Lobatto nodes, so no node sits
  on the axis; a function is continued to negative radius by
  ``f(-r, theta) = f(r, theta + pi)``. Differentiation, interpolation and
  radial integration are spectral on the folded line.
* :class:`CartesianDiskGrid` -- cell-centred Cartesian nodes inside a disk
  plus nodes on the boundary circle, with exact cut-cell areas as weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as C

from ..errors import InvalidArgumentError
from . import spectral
from .domains import Annulus, Disk, FibreDomain


@dataclass(frozen=True, eq=False)
class PolarGrid:
    """Polar tensor grid of ``nr`` radii by ``ntheta`` angles.

    Arrays shaped ``(nr, ntheta)`` hold node values; radii ascend along the
    first axis and ``theta[k] = 2*pi*k/ntheta``.
    """

    domain: FibreDomain
    nr: int
    ntheta: int
    r: np.ndarray = field(init=False, repr=False)
    theta: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.nr < 4 or self.ntheta < 4:
            raise InvalidArgumentError("polar grids need at least 4 nodes per direction")
        if self.ntheta % 2:
            raise InvalidArgumentError("the angular node count must be even")
        a, b = self._span
        xi = 0.5 * (a + b) + 0.5 * (b - a) * spectral.lobatto_nodes(self._n_full)
        r = xi[-self.nr :].copy() if self.is_disk else xi
        if self.is_disk:
            r[-1] = self.domain.R
        else:
            r[0], r[-1] = self.domain.r0, self.domain.r1
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "theta", 2.0 * np.pi * np.arange(self.ntheta) / self.ntheta)

    # -- geometry ---------------------------------------------------------

    @property
    def is_disk(self) -> bool:
        return isinstance(self.domain, Disk)

    @property
    def _n_full(self) -> int:
        return 2 * self.nr if self.is_disk else self.nr

    @property
    def _span(self) -> tuple[float, float]:
        if self.is_disk:
            return -self.domain.R, self.domain.R
        return self.domain.r0, self.domain.r1

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nr, self.ntheta)

    @property
    def R(self) -> np.ndarray:
        return np.broadcast_to(self.r[:, None], self.shape)

    @property
    def T(self) -> np.ndarray:
        return np.broadcast_to(self.theta[None, :], self.shape)

    @property
    def x(self) -> np.ndarray:
        return self.r[:, None] * np.cos(self.theta)[None, :]

    @property
    def y(self) -> np.ndarray:
        return self.r[:, None] * np.sin(self.theta)[None, :]

    @property
    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        mask[-1] = True
        if not self.is_disk:
            mask[0] = True
        return mask

    @property
    def spacing(self) -> float:
        """Mean radial node spacing, used as the finite-difference step."""
        return (self.domain.r_outer - self.domain.r_inner) / (self.nr - 1)

    def nodes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Flattened ``x, y`` and boundary flags."""
        return self.x.ravel(), self.y.ravel(), self.boundary_mask.ravel()

    @property
    def weights(self) -> np.ndarray:
        """Quadrature weights for ``integral f dx dy``; shape ``(nr, ntheta)``."""
        dtheta = 2.0 * np.pi / self.ntheta
        if self.is_disk:
            radial = self._disk_radial_weights()
        else:
            half = 0.5 * (self.domain.r1 - self.domain.r0)
            radial = spectral.clenshaw_curtis_weights(self.nr) * half * self.r
        return np.repeat((radial * dtheta)[:, None], self.ntheta, axis=1)

    def _disk_radial_weights(self) -> np.ndarray:
        # The angular mean of a smooth planar function is a smooth function of
        # u = r^2, so integral_0^R g r dr = (1/2) integral_0^{R^2} g du is
        # computed by Chebyshev moments in u.
        R = self.domain.R
        u = 2.0 * (self.r / R) ** 2 - 1.0
        k = np.arange(self.nr)
        V = C.chebvander(u, self.nr - 1).T
        even = k % 2 == 0
        moments = np.zeros(self.nr)
        moments[even] = 2.0 / (1.0 - k[even].astype(float) ** 2) * (R**2 / 4.0)
        return np.linalg.solve(V, moments)

    # -- folding ----------------------------------------------------------

    def full(self, f: np.ndarray, parity: int = 1) -> np.ndarray:
        """Continue node values to the full Chebyshev line.

        On the disk, ``parity`` is the sign picked up under ``r -> -r``
        (``+1`` for planar scalars, ``-1`` for quantities such as ``r * f``).
        """
        f = np.asarray(f, dtype=float)
        if not self.is_disk:
            return f
        shifted = np.roll(f, -self.ntheta // 2, axis=-1)[..., ::-1, :]
        return np.concatenate([parity * shifted, f], axis=-2)

    def physical(self, F: np.ndarray) -> np.ndarray:
        return F[..., -self.nr :, :]

    def xi(self) -> np.ndarray:
        a, b = self._span
        return 0.5 * (a + b) + 0.5 * (b - a) * spectral.lobatto_nodes(self._n_full)

    # -- calculus ---------------------------------------------------------

    def d_r(self, f: np.ndarray, parity: int = 1) -> np.ndarray:
        a, b = self._span
        D = spectral.lobatto_diff_matrix(self._n_full) * (2.0 / (b - a))
        return self.physical(np.einsum("ij,...jk->...ik", D, self.full(f, parity)))

    def d_theta(self, f: np.ndarray) -> np.ndarray:
        return spectral.fourier_derivative(np.asarray(f, dtype=float), axis=-1)

    def gradient(self, f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Cartesian gradient ``(df/dx, df/dy)`` of a scalar on the grid."""
        fr = self.d_r(f)
        ft = self.d_theta(f)
        c, s = np.cos(self.theta), np.sin(self.theta)
        rr = self.r[:, None]
        return c * fr - s * ft / rr, s * fr + c * ft / rr

    def curl(self, ax: np.ndarray, ay: np.ndarray) -> np.ndarray:
        """Scalar ``d(ax dx + ay dy) / (dx ^ dy)``."""
        c, s = np.cos(self.theta), np.sin(self.theta)
        rr = self.r[:, None]
        a_r = ax * c + ay * s
        # r * (angular component) is even under the fold r -> -r.
        a_t = rr * (-ax * s + ay * c)
        return (self.d_r(a_t) - self.d_theta(a_r)) / rr

    def integrate(self, f: np.ndarray) -> np.ndarray:
        """Integral over the fibre of node values; reduces the last two axes."""
        return np.einsum("...ij,ij->...", np.asarray(f, dtype=float), self.weights)

    def radial_moment(self, rho: np.ndarray) -> np.ndarray:
        """``integral_{r_inner}^{r} rho(s, theta) s ds`` at every node."""
        a, b = self._span
        F = self.full(rho) * self.xi()[:, None]
        lower = 0.0 if self.is_disk else -1.0
        return self.physical(spectral.cheb_cumulative(F, axis=-2, lower=lower)) * (0.5 * (b - a))

    def interpolant(self, f: np.ndarray, parity: int = 1, trim: float = 0.0) -> "PolarInterpolant":
        return PolarInterpolant(self, f, parity, trim)


class PolarInterpolant:
    """Spectral interpolant of node values on a :class:`PolarGrid`.

    Leading batch axes are allowed; the evaluation points then carry the same
    batch axes.
    """

    def __init__(self, grid: PolarGrid, f: np.ndarray, parity: int = 1, trim: float = 0.0):
        a, b = grid._span
        self.grid = grid
        self._interp = spectral.TensorInterpolant(grid.full(f, parity), a, b, trim)

    def combine(self, weights) -> "PolarInterpolant":
        """Unbatched interpolant of ``sum_j weights[j] * member_j`` (first batch axis)."""
        out = object.__new__(type(self))
        out.grid = self.grid
        out._interp = self._interp.combine(weights)
        return out

    def __call__(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return self._interp(np.hypot(x, y), np.arctan2(y, x))

    def with_gradient(self, x, y):
        """Value and Cartesian gradient at the given points."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        r = np.hypot(x, y)
        th = np.arctan2(y, x)
        v, v_r, v_t = self._interp.derivatives(r, th)
        c, s = np.cos(th), np.sin(th)
        return v, c * v_r - s * v_t / r, s * v_r + c * v_t / r


def _circle_segment_integral(x0: float, x1: float, R: float) -> float:
    """``integral_{x0}^{x1} sqrt(R^2 - x^2) dx`` for ``-R <= x0 <= x1 <= R``."""

    def F(x):
        x = min(max(x, -R), R)
        return 0.5 * (x * np.sqrt(max(R * R - x * x, 0.0)) + R * R * np.arcsin(x / R))

    return F(x1) - F(x0)


def cell_disk_area(x0: float, x1: float, y0: float, y1: float, R: float) -> float:
    """Exact area of the rectangle ``[x0,x1] x [y0,y1]`` intersected with the disk of radius ``R``."""
    lo, hi = max(x0, -R), min(x1, R)
    if lo >= hi:
        return 0.0
    breaks = {lo, hi}
    for yy in (y0, y1):
        if abs(yy) < R:
            xb = np.sqrt(R * R - yy * yy)
            for cand in (-xb, xb):
                if lo < cand < hi:
                    breaks.add(cand)
    pts = sorted(breaks)
    area = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        m = 0.5 * (a + b)
        s = np.sqrt(R * R - m * m)
        top_is_circle = s < y1
        bottom_is_circle = -s > y0
        top = s if top_is_circle else y1
        bottom = -s if bottom_is_circle else y0
        if top <= bottom:
            continue
        seg = _circle_segment_integral(a, b, R)
        area += (seg if top_is_circle else y1 * (b - a)) - (-seg if bottom_is_circle else y0 * (b - a))
    return area


@dataclass(frozen=True, eq=False)
class CartesianDiskGrid:
    """Cell-centred Cartesian nodes inside a disk plus boundary-circle nodes.

    The square ``[-R, R]^2`` is split into ``n x n`` cells. A cell whose centre
    lies inside the disk contributes a node with weight equal to the exact
    area of the cell inside the disk; the inside area of the remaining cut
    cells is assigned to the nearest boundary node. ``n_boundary`` nodes sit
    on the circle at equally spaced angles.
    """

    domain: Disk
    n: int
    n_boundary: int = 0
    x: np.ndarray = field(init=False, repr=False)
    y: np.ndarray = field(init=False, repr=False)
    is_boundary: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.domain, Disk):
            raise InvalidArgumentError("CartesianDiskGrid needs a disk domain")
        if self.n < 8:
            raise InvalidArgumentError("grid resolution must be at least 8 per direction")
        R = self.domain.R
        n_b = self.n_boundary or 4 * self.n
        object.__setattr__(self, "n_boundary", n_b)
        h = 2.0 * R / self.n
        edges = -R + h * np.arange(self.n + 1)
        centres = 0.5 * (edges[:-1] + edges[1:])
        X, Y = np.meshgrid(centres, centres, indexing="ij")
        inside = np.hypot(X, Y) < R * (1.0 - 1e-12)
        area = np.zeros((self.n, self.n))
        for i in range(self.n):
            for j in range(self.n):
                cx, cy = centres[i], centres[j]
                corner = np.hypot(abs(cx) + 0.5 * h, abs(cy) + 0.5 * h)
                if corner <= R:
                    area[i, j] = h * h
                else:
                    area[i, j] = cell_disk_area(edges[i], edges[i + 1], edges[j], edges[j + 1], R)
        phi = 2.0 * np.pi * np.arange(n_b) / n_b
        bx, by = R * np.cos(phi), R * np.sin(phi)
        bw = np.zeros(n_b)
        orphan = (~inside) & (area > 0)
        if np.any(orphan):
            ang = np.mod(np.arctan2(Y[orphan], X[orphan]), 2.0 * np.pi)
            idx = np.rint(ang / (2.0 * np.pi / n_b)).astype(int) % n_b
            np.add.at(bw, idx, area[orphan])
        object.__setattr__(self, "x", np.concatenate([X[inside], bx]))
        object.__setattr__(self, "y", np.concatenate([Y[inside], by]))
        object.__setattr__(self, "is_boundary", np.concatenate([np.zeros(inside.sum(), bool), np.ones(n_b, bool)]))
        object.__setattr__(self, "weights", np.concatenate([area[inside], bw]))

    @property
    def spacing(self) -> float:
        return 2.0 * self.domain.R / self.n

    def nodes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.x, self.y, self.is_boundary

    def integrate(self, f: np.ndarray) -> np.ndarray:
        return np.asarray(f, dtype=float) @ self.weights


def default_fibre_grid(domain: FibreDomain, n: int = 64):
    """The documented default grid: Cartesian for disks, polar for annuli."""
    if isinstance(domain, Disk):
        return CartesianDiskGrid(domain, n)
    return PolarGrid(domain, n, n)


def spectral_grid(domain: FibreDomain, nr: int, ntheta: int) -> PolarGrid:
    """Polar grid suitable for the spectral pipelines on either domain kind."""
    if isinstance(domain, (Disk, Annulus)):
        return PolarGrid(domain, nr, ntheta)
    raise InvalidArgumentError(f"unsupported domain {domain!r}")
