"""Estimator-style wrappers: ``fit(field)`` then evaluate on fibre points.

These are thin adapters over the functional API that give the usual
``get_params`` / ``set_params`` behaviour and fitted attributes with a
trailing underscore. ``X`` is always an array of fibre points ``(n, 2)``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .clebsch import weyl_potential
from .fields.diagnostics import find_transverse_angle
from .fields.spec import FieldSpec
from .hamiltonian import EvolutionField, integrate_hamilton
from .moser import DEFAULT_S_STEPS, hamiltonian_representation
from .tracer.tracing import DEFAULT_ATOL, DEFAULT_RTOL, rotational_transform, section_orbits


def _points(X) -> np.ndarray:
    X = check_array(X, dtype=float)
    if X.shape[1] != 2:
        raise ValueError(f"expected fibre points of shape (n, 2), got {X.shape}")
    return X


def _angle(spec: FieldSpec, angle):
    if angle is not None:
        return tuple(angle)
    found = find_transverse_angle(spec)
    return (found.m, found.n)


class PoincareSection(BaseEstimator):
    """Iterates of the first-return map to ``m theta + n phi = level``."""

    def __init__(self, angle=None, level: float = 0.0, n_transits: int = 100, rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL):
        self.angle = angle
        self.level = level
        self.n_transits = n_transits
        self.rtol = rtol
        self.atol = atol

    def fit(self, spec: FieldSpec, y=None):
        self.spec_ = spec
        self.angle_ = _angle(spec, self.angle)
        return self

    def transform(self, X) -> np.ndarray:
        """Crossings of shape ``(n, n_transits, 2)``."""
        check_is_fitted(self, "angle_")
        table = section_orbits(self.spec_, self.angle_, self.level, _points(X), self.n_transits, self.rtol, self.atol)
        return np.stack([table.x, table.y], axis=-1)


class RotationalTransform(BaseEstimator):
    """Winding of ``theta`` per turn of ``phi`` along field lines through ``(level, x, y)``."""

    def __init__(self, n_transits: int = 100, level: float = 0.0, rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL):
        self.n_transits = n_transits
        self.level = level
        self.rtol = rtol
        self.atol = atol

    def fit(self, spec: FieldSpec, y=None):
        self.spec_ = spec
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "spec_")
        return np.array(
            [
                rotational_transform(self.spec_, (1, 0), (0, 1), (self.level, x, y), self.n_transits, self.rtol, self.atol).value
                for x, y in _points(X)
            ]
        )


class WeylGauge(BaseEstimator):
    """Weyl-gauge potentials ``P, H`` on a polar grid; ``transform`` interpolates one angle slice."""

    def __init__(self, nr: int = 64, ntheta: int = 64, nt: int = 8, rtol: float = 1e-10):
        self.nr = nr
        self.ntheta = ntheta
        self.nt = nt
        self.rtol = rtol

    def fit(self, spec: FieldSpec, y=None):
        from .core.grids import PolarGrid

        self.pair_ = weyl_potential(spec, self.nr, self.ntheta, self.nt, self.rtol)
        self.residual_ = self.pair_.residual
        self.grid_ = PolarGrid(spec.domain, self.nr, self.ntheta)
        return self

    def transform(self, X, slice_index: int = 0) -> np.ndarray:
        """``(P, H)`` at the points on slice ``t = 2 pi slice_index / nt``, shape ``(n, 2)``."""
        check_is_fitted(self, "pair_")
        X = _points(X)
        P = self.grid_.interpolant(self.pair_.P[slice_index])(X[:, 0], X[:, 1])
        H = self.grid_.interpolant(self.pair_.H[slice_index])(X[:, 0], X[:, 1])
        return np.column_stack([P, H])


class HamiltonianRepresentation(BaseEstimator):
    """Fibrewise Moser representation ``(omega_o, H, Psi)`` of a transverse field."""

    def __init__(
        self,
        angle=None,
        nr: int = 64,
        ntheta: int = 64,
        nt: int = 32,
        reference: float = 0.0,
        s_steps: int = DEFAULT_S_STEPS,
        rtol: float = DEFAULT_RTOL,
        atol: float = DEFAULT_ATOL,
    ):
        self.angle = angle
        self.nr = nr
        self.ntheta = ntheta
        self.nt = nt
        self.reference = reference
        self.s_steps = s_steps
        self.rtol = rtol
        self.atol = atol

    def fit(self, spec: FieldSpec, y=None):
        angle = _angle(spec, self.angle)
        self.rep_ = hamiltonian_representation(spec, angle, self.nr, self.ntheta, self.nt, self.reference, self.s_steps)
        self.residuals_ = dict(self.rep_.residuals)
        return self

    def transform(self, X, t: float | None = None) -> np.ndarray:
        """``H_t`` at the points (default ``t``: the reference angle)."""
        check_is_fitted(self, "rep_")
        X = _points(X)
        t = self.rep_.reference if t is None else t
        return EvolutionField(self.rep_).hamiltonian(t, X[:, 0], X[:, 1])

    def predict(self, X, n_transits: int = 1) -> np.ndarray:
        """Iterates of the represented return map, shape ``(n, n_transits, 2)``."""
        check_is_fitted(self, "rep_")
        orbits = integrate_hamilton(self.rep_, _points(X), n_transits, rtol=self.rtol, atol=self.atol)
        return np.stack([orbits.x[:, 1:], orbits.y[:, 1:]], axis=-1)
