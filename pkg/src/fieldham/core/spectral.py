"""Chebyshev and Fourier building blocks for tensor grids."""

from __future__ import annotations

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy import fft


def lobatto_nodes(n: int) -> np.ndarray:
    """Chebyshev-Gauss-Lobatto nodes on [-1, 1] in ascending order."""
    return -np.cos(np.pi * np.arange(n) / (n - 1))


def lobatto_diff_matrix(n: int) -> np.ndarray:
    """Differentiation matrix on the ascending Lobatto nodes of [-1, 1]."""
    N = n - 1
    x = np.cos(np.pi * np.arange(n) / N)
    c = np.ones(n)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(n)
    dx = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (dx + np.eye(n))
    D -= np.diag(D.sum(axis=1))
    # The nodes above are descending; reversing both axes gives the ascending matrix.
    return D[::-1, ::-1].copy()


def clenshaw_curtis_weights(n: int) -> np.ndarray:
    """Quadrature weights on the ascending Lobatto nodes of [-1, 1]."""
    N = n - 1
    j = np.arange(n)
    w = np.zeros(n)
    half = N // 2
    v = np.ones(n)
    for k in range(1, half + 1):
        b = 1.0 if 2 * k == N else 2.0
        v -= b * np.cos(2.0 * k * np.pi * j / N) / (4.0 * k * k - 1.0)
    w = 2.0 * v / N
    w[0] *= 0.5
    w[-1] *= 0.5
    return w[::-1].copy()


def cheb_coefficients(values: np.ndarray, axis: int = 0) -> np.ndarray:
    """Chebyshev coefficients of the interpolant through ascending Lobatto samples."""
    v = np.flip(np.asarray(values), axis=axis)
    n = v.shape[axis]
    coef = fft.dct(v, type=1, axis=axis) / (n - 1)
    index = [slice(None)] * coef.ndim
    for end in (0, n - 1):
        index[axis] = end
        coef[tuple(index)] *= 0.5
    return coef


def cheb_cumulative(values: np.ndarray, axis: int, lower: float) -> np.ndarray:
    """Antiderivative (in the [-1, 1] variable) vanishing at ``lower``, sampled on the nodes."""
    v = np.moveaxis(np.asarray(values, dtype=float), axis, 0)
    n = v.shape[0]
    coef = cheb_coefficients(v, axis=0)
    anti = C.chebint(coef, lbnd=lower, axis=0)
    out = C.chebval(lobatto_nodes(n), anti, tensor=True)
    # chebval puts the evaluation axis last.
    out = np.moveaxis(out, -1, 0)
    return np.moveaxis(out, 0, axis)


def fourier_derivative(f: np.ndarray, axis: int = -1, order: int = 1) -> np.ndarray:
    """Spectral derivative of samples of a 2*pi-periodic function."""
    n = f.shape[axis]
    spec = fft.rfft(f, axis=axis)
    k = np.arange(spec.shape[axis])
    mult = (1j * k) ** order
    if n % 2 == 0 and order % 2 == 1:
        mult[-1] = 0.0
    shape = [1] * f.ndim
    shape[axis] = -1
    return fft.irfft(spec * mult.reshape(shape), n=n, axis=axis)


def fourier_cumulative(g: np.ndarray, axis: int = -1) -> tuple[np.ndarray, np.ndarray]:
    """Periodic antiderivative of samples on a uniform grid starting at 0.

    Returns ``(G, mean)`` where ``mean`` is the average of ``g`` and ``G`` is
    the antiderivative of ``g - mean`` vanishing at theta = 0.
    """
    n = g.shape[axis]
    spec = fft.rfft(g, axis=axis)
    k = np.arange(spec.shape[axis]).astype(float)
    index = [slice(None)] * g.ndim
    index[axis] = 0
    mean = spec[tuple(index)].real / n
    k[0] = 1.0
    mult = 1.0 / (1j * k)
    mult[0] = 0.0
    if n % 2 == 0:
        mult[-1] = 0.0
    shape = [1] * g.ndim
    shape[axis] = -1
    G = fft.irfft(spec * mult.reshape(shape), n=n, axis=axis)
    G0 = np.take(G, [0], axis=axis)
    return G - G0, mean


def trig_cardinal_weights(t: float, n: int, t0: float = 0.0) -> np.ndarray:
    """Weights ``L_j(t)`` of the trigonometric interpolant through ``n`` uniform nodes ``t0 + 2 pi j / n``."""
    k = np.arange(n // 2 + 1)
    factor = np.full(k.size, 2.0)
    factor[0] = 1.0
    if n % 2 == 0:
        factor[-1] = 1.0
    u = t - t0 - 2.0 * np.pi * np.arange(n) / n
    return np.cos(np.outer(u, k)) @ factor / n


def harmonics(theta: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray]:
    """``cos(k theta)`` and ``sin(k theta)`` for ``k < m``, stacked on a new last axis.

    Built by repeated complex multiplication, which is much cheaper than
    evaluating ``m`` trigonometric functions per point.
    """
    z = np.exp(1j * np.asarray(theta, dtype=float))
    powers = np.empty(z.shape + (m,), dtype=complex)
    powers[..., 0] = 1.0
    if m > 1:
        powers[..., 1:] = z[..., None]
        np.cumprod(powers[..., 1:], axis=-1, out=powers[..., 1:])
    return powers.real, powers.imag


class TensorInterpolant:
    """Chebyshev-by-Fourier interpolant of samples on a polar tensor grid.

    ``values`` has shape ``(..., n_cheb, n_theta)`` with the radial axis
    sampled at ascending Lobatto nodes of ``[a, b]``. Leading axes are batch
    axes; :meth:`__call__` evaluates each batch member at its own points.
    With ``trim > 0`` trailing coefficients below ``trim`` times the largest
    one are discarded, which speeds up evaluation of band-limited data.
    """

    def __init__(self, values: np.ndarray, a: float, b: float, trim: float = 0.0):
        values = np.asarray(values, dtype=float)
        self.a = float(a)
        self.b = float(b)
        self.n_theta = values.shape[-1]
        coef = cheb_coefficients(values, axis=-2)
        spec = fft.rfft(coef, axis=-1) / self.n_theta
        m = spec.shape[-1]
        factor = np.full(m, 2.0)
        factor[0] = 1.0
        if self.n_theta % 2 == 0:
            factor[-1] = 1.0
        spec = spec * factor
        if trim > 0.0:
            # Drop trailing radial rows and angular columns that are negligible for every member.
            mag = np.abs(spec).reshape((-1,) + spec.shape[-2:]).max(axis=0)
            keep = mag > trim * max(mag.max(), np.finfo(float).tiny)
            rows = np.flatnonzero(keep.any(axis=1))
            cols = np.flatnonzero(keep.any(axis=0))
            n_rows = rows[-1] + 1 if rows.size else 1
            n_cols = cols[-1] + 1 if cols.size else 1
            spec = spec[..., :n_rows, :n_cols]
        self.spec = spec
        # Real and imaginary parts stacked along the last axis keep the products in real arithmetic.
        self._stacked = np.concatenate([spec.real, spec.imag], axis=-1)
        self.batch_shape = values.shape[:-2]

    def combine(self, weights) -> "TensorInterpolant":
        """Unbatched interpolant of ``sum_j weights[j] * member_j`` (first batch axis)."""
        out = object.__new__(type(self))
        out.__dict__.update(self.__dict__)
        out.spec = np.tensordot(weights, self.spec, axes=(0, 0))
        out._stacked = np.tensordot(weights, self._stacked, axes=(0, 0))
        out.batch_shape = self.batch_shape[1:]
        return out

    def _radial_basis(self, xi: np.ndarray) -> np.ndarray:
        k = self.spec.shape[-2]
        u = (2.0 * xi - self.a - self.b) / (self.b - self.a)
        T = np.empty(xi.shape + (k,))
        T[..., 0] = 1.0
        if k > 1:
            T[..., 1] = u
        for j in range(2, k):
            T[..., j] = 2.0 * u * T[..., j - 1] - T[..., j - 2]
        return T

    def __call__(self, xi, theta) -> np.ndarray:
        """Evaluate at radial coordinates ``xi`` and angles ``theta``.

        Both have shape ``batch_shape + (p,)``, or ``(p,)`` when there is no batch.
        """
        xi = np.asarray(xi, dtype=float)
        theta = np.asarray(theta, dtype=float)
        T = self._radial_basis(xi)
        m = self.spec.shape[-1]
        cos, sin = harmonics(theta, m)
        # (..., p, k) @ (..., k, 2m) -> (..., p, 2m)
        partial = T @ self._stacked
        return np.sum(partial[..., :m] * cos - partial[..., m:] * sin, axis=-1)

    def derivatives(self, xi, theta):
        """Value and first derivatives with respect to ``xi`` and ``theta``."""
        xi = np.asarray(xi, dtype=float)
        theta = np.asarray(theta, dtype=float)
        k = self.spec.shape[-2]
        u = (2.0 * xi - self.a - self.b) / (self.b - self.a)
        T = np.empty(xi.shape + (k,))
        dT = np.empty(xi.shape + (k,))
        T[..., 0] = 1.0
        dT[..., 0] = 0.0
        if k > 1:
            T[..., 1] = u
            dT[..., 1] = 1.0
        for j in range(2, k):
            T[..., j] = 2.0 * u * T[..., j - 1] - T[..., j - 2]
            dT[..., j] = 2.0 * T[..., j - 1] + 2.0 * u * dT[..., j - 1] - dT[..., j - 2]
        dT *= 2.0 / (self.b - self.a)
        m = self.spec.shape[-1]
        ks = np.arange(m)
        cos, sin = harmonics(theta, m)
        vp = T @ self._stacked
        dp = dT @ self._stacked
        value = np.sum(vp[..., :m] * cos - vp[..., m:] * sin, axis=-1)
        d_xi = np.sum(dp[..., :m] * cos - dp[..., m:] * sin, axis=-1)
        d_theta = -np.sum((vp[..., :m] * sin + vp[..., m:] * cos) * ks, axis=-1)
        return value, d_xi, d_theta
