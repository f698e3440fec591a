"""Explicit Runge-Kutta integrators with dense output, vectorised over a batch.

Two embedded pairs are available: Dormand-Prince 8(5,3) (``"dop853"``, the
default) and Dormand-Prince 5(4) (``"dp54"``). All members of a batch share
one step size, chosen so that the worst member meets the tolerance. Callers
observe every accepted step through a callback receiving a
:class:`DenseStep`, which is how section crossings are located without
storing the whole solution.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import InvalidArgumentError, StiffnessError
from . import _dop853

# Dormand-Prince 5(4) tableau.
_DP54_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_DP54_A = np.zeros((6, 6))
_DP54_A[1, :1] = [1 / 5]
_DP54_A[2, :2] = [3 / 40, 9 / 40]
_DP54_A[3, :3] = [44 / 45, -56 / 15, 32 / 9]
_DP54_A[4, :4] = [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]
_DP54_A[5, :5] = [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]
_DP54_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# Difference between the 5th- and 4th-order weights (7 stages, FSAL).
_DP54_E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
# Continuous extension: y(s0 + theta h) = y0 + h * sum_j K_j * (P_j . [theta, theta^2, theta^3, theta^4]).
_DP54_P = np.array(
    [
        [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
METHODS = ("dop853", "dp54")


@dataclass
class IntegrationStats:
    steps: int = 0
    rejected: int = 0
    evaluations: int = 0
    max_error: float = 0.0


@dataclass
class DenseStep:
    """One accepted step ``[s0, s0 + h]`` with its continuous extension.

    ``K`` holds the stage derivatives including the final one (FSAL). For
    the 8th-order pair the interpolant needs three more stages, which are
    evaluated on first use only. ``y1`` is the accepted state after any
    post-step adjustment; ``y1_raw`` is the unadjusted Runge-Kutta value the
    interpolant ends at.
    """

    s0: float
    h: float
    y0: np.ndarray
    y1: np.ndarray
    K: np.ndarray
    method: str = "dop853"
    rhs: Callable | None = field(default=None, repr=False)
    stats: IntegrationStats | None = field(default=None, repr=False)
    y1_raw: np.ndarray | None = field(default=None, repr=False)
    _coef: np.ndarray | None = field(default=None, repr=False)

    @property
    def s1(self) -> float:
        return self.s0 + self.h

    def _coefficients(self) -> np.ndarray:
        """Polynomial data of shape ``(k, batch, dim)`` for the interpolant."""
        if self._coef is not None:
            return self._coef
        if self.method == "dp54":
            self._coef = np.tensordot(_DP54_P.T, self.K, axes=(1, 0))
            return self._coef
        n = _dop853.N_STAGES
        K = np.empty((_dop853.N_STAGES_EXTENDED,) + self.y0.shape)
        K[: n + 1] = self.K
        h = self.h
        for s, (a, c) in enumerate(zip(_dop853.A[n + 1 :], _dop853.C[n + 1 :]), start=n + 1):
            dy = np.tensordot(a[:s], K[:s], axes=(0, 0))
            K[s] = self.rhs(self.s0 + c * h, self.y0 + h * dy)
        if self.stats is not None:
            self.stats.evaluations += 3
        F = np.empty((7,) + self.y0.shape)
        delta = (self.y1 if self.y1_raw is None else self.y1_raw) - self.y0
        f_old, f_new = self.K[0], self.K[n]
        F[0] = delta
        F[1] = h * f_old - delta
        F[2] = 2 * delta - h * (f_new + f_old)
        F[3:] = h * np.tensordot(_dop853.D, K, axes=(1, 0))
        self._coef = F
        return F

    def _evaluate(self, coef: np.ndarray, y0: np.ndarray, theta: np.ndarray) -> np.ndarray:
        if self.method == "dp54":
            poly = np.zeros(coef.shape[1:])
            for c in coef[::-1]:
                poly = poly * theta + c
            return y0 + self.h * theta * poly
        # y0 + x (F0 + (1 - x)(F1 + x (F2 + (1 - x)(F3 + ...))))
        out = np.zeros(coef.shape[1:])
        for i, c in enumerate(coef[::-1]):
            out = out + c
            out = out * (theta if i % 2 == 0 else 1.0 - theta)
        return y0 + out

    def __call__(self, theta) -> np.ndarray:
        """State at ``s0 + theta * h``; ``theta`` is a scalar or one value per batch member."""
        theta = np.asarray(theta, dtype=float)
        if theta.ndim == 1:
            theta = theta[:, None]
        return self._evaluate(self._coefficients(), self.y0, theta)

    def component(self, theta, index: int, members=None) -> np.ndarray:
        """Single state component at per-member ``theta`` (cheaper than :meth:`__call__`)."""
        coef = self._coefficients()[:, :, index]
        y0 = self.y0[:, index]
        if members is not None:
            coef, y0 = coef[:, members], y0[members]
        return self._evaluate(coef, y0, np.asarray(theta, dtype=float))


def _initial_step(rhs, s0, y0, f0, direction, rtol, atol, order) -> float:
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + direction * h0 * f0
    f1 = rhs(s0 + direction * h0, y1)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / (order + 1))
    return min(100 * h0, h1)


def _error_dp54(K, hs, scale) -> float:
    err = hs * np.tensordot(_DP54_E, K, axes=(0, 0)) / scale
    return float(np.max(np.sqrt(np.mean(err**2, axis=-1))))


def _error_dop853(K, hs, scale) -> float:
    # Per member: the 5th-order estimate damped by the 3rd-order one.
    e5 = np.sum((np.tensordot(_dop853.E5, K, axes=(0, 0)) / scale) ** 2, axis=-1)
    e3 = np.sum((np.tensordot(_dop853.E3, K, axes=(0, 0)) / scale) ** 2, axis=-1)
    denom = e5 + 0.01 * e3
    with np.errstate(invalid="ignore", divide="ignore"):
        err = np.where(denom > 0, abs(hs) * e5 / np.sqrt(denom * K.shape[-1]), 0.0)
    return float(np.max(err))


_TABLEAUX = {
    "dp54": (_DP54_A, _DP54_B, _DP54_C, _error_dp54, 4),
    "dop853": (
        _dop853.A[: _dop853.N_STAGES, : _dop853.N_STAGES],
        _dop853.B,
        _dop853.C[: _dop853.N_STAGES],
        _error_dop853,
        7,
    ),
}


def integrate(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    s0: float,
    y0: np.ndarray,
    s_end: float,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    on_step: Callable[[DenseStep], bool] | None = None,
    post_step: Callable[[np.ndarray], np.ndarray] | None = None,
    max_step: float = np.inf,
    max_steps: int = 10_000_000,
    method: str = "dop853",
) -> tuple[float, np.ndarray, IntegrationStats]:
    """Integrate ``dy/ds = rhs(s, y)`` from ``s0`` toward ``s_end``.

    ``y0`` has shape ``(batch, dim)``. ``on_step`` is called after every
    accepted step and stops the integration by returning ``True``;
    ``post_step`` may adjust the accepted state (e.g. boundary projection).
    Returns the final parameter, the final state and statistics.
    """
    if method not in _TABLEAUX:
        raise InvalidArgumentError(f"unknown method {method!r}; choose one of {METHODS}")
    A, B, C, error_norm, err_order = _TABLEAUX[method]
    n_stages = B.size
    exponent = -1.0 / (err_order + 1)
    y = np.array(y0, dtype=float)
    stats = IntegrationStats()
    s = float(s0)
    direction = 1.0 if s_end >= s0 else -1.0
    f = rhs(s, y)
    stats.evaluations += 1
    if s == s_end:
        return s, y, stats
    h = min(_initial_step(rhs, s, y, f, direction, rtol, atol, err_order), max_step, abs(s_end - s))
    stats.evaluations += 1
    K = np.empty((n_stages + 1,) + y.shape)
    while True:
        if stats.steps >= max_steps:
            raise StiffnessError(f"maximum number of steps ({max_steps}) exceeded at s={s!r}")
        min_h = 10.0 * np.finfo(float).eps * max(abs(s), 1.0)
        if h < min_h:
            raise StiffnessError(f"step size underflow at s={s!r} (h={h:.3g})")
        remaining = abs(s_end - s)
        last = h >= remaining
        if last:
            h = remaining
        hs = direction * h
        K[0] = f
        for i in range(1, n_stages):
            dy = np.tensordot(A[i, :i], K[:i], axes=(0, 0))
            K[i] = rhs(s + C[i] * hs, y + hs * dy)
        y_new = y + hs * np.tensordot(B, K[:n_stages], axes=(0, 0))
        f_new = rhs(s + hs, y_new)
        K[n_stages] = f_new
        stats.evaluations += n_stages
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err_norm = error_norm(K, hs, scale)
        if not np.isfinite(err_norm):
            err_norm = np.inf
        if err_norm <= 1.0:
            stats.steps += 1
            stats.max_error = max(stats.max_error, err_norm)
            s_new = s_end if last else s + hs
            y_raw = y_new
            if post_step is not None:
                y_new = post_step(y_new)
            step = DenseStep(s, hs, y, y_new, K.copy(), method, rhs, stats, y_raw)
            s, y, f = s_new, y_new, f_new
            stop = on_step(step) if on_step is not None else False
            if stop or last:
                return s, y, stats
            factor = MAX_FACTOR if err_norm == 0 else min(MAX_FACTOR, SAFETY * err_norm**exponent)
            h = min(h * factor, max_step)
        else:
            stats.rejected += 1
            factor = MIN_FACTOR if not np.isfinite(err_norm) else max(MIN_FACTOR, SAFETY * err_norm**exponent)
            h = h * factor
