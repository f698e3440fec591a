from __future__ import annotations

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from fieldham import HamiltonianRepresentation, PoincareSection, RotationalTransform, WeylGauge
from fieldham.core.domains import Disk
from fieldham.fields.spec import LundquistField, straight_field


def test_estimators_clone_and_report_params():
    est = PoincareSection(angle=(1, 1), n_transits=3)
    assert clone(est).get_params()["angle"] == (1, 1)
    assert est.set_params(level=0.5).level == 0.5


def test_unfitted_estimator_raises():
    with pytest.raises(NotFittedError):
        RotationalTransform().predict([[3.0, 0.0]])


def test_poincare_section_finds_angle_and_keeps_radii():
    est = PoincareSection(n_transits=4).fit(LundquistField())
    assert est.angle_ == (1, 1)
    out = est.transform([[2.8, 0.0], [3.3, 0.1]])
    assert out.shape == (2, 4, 2)
    np.testing.assert_allclose(np.hypot(out[..., 0], out[..., 1]), np.hypot([[2.8] * 4, [3.3] * 4], [[0] * 4, [0.1] * 4]), atol=1e-9)


def test_rotational_transform_predict():
    pred = RotationalTransform(n_transits=30).fit(LundquistField()).predict([[3.0, 0.0]])
    assert pred[0] == pytest.approx(float(LundquistField.rotational_transform(3.0)), abs=1e-6)


def test_weyl_gauge_transform():
    est = WeylGauge(nr=16, ntheta=16, nt=2).fit(straight_field(Disk(1.0)))
    out = est.transform([[0.2, 0.3], [-0.5, 0.1]])
    np.testing.assert_allclose(out[:, 0], 0.0, atol=1e-14)
    np.testing.assert_allclose(out[:, 1], [-0.3, -0.1], atol=1e-12)


def test_hamiltonian_representation_estimator():
    est = HamiltonianRepresentation(nr=16, ntheta=16, nt=4).fit(LundquistField())
    assert est.residuals_["decomposition"] < 1e-7
    X = np.array([[3.0, 0.0], [0.0, 2.6]])
    H = est.transform(X)
    r = np.hypot(X[:, 0], X[:, 1])
    from fieldham.core.bessel import bessel_j

    np.testing.assert_allclose(H, -bessel_j(0, r), atol=1e-10)
    orbit = est.predict(X, n_transits=2)
    assert orbit.shape == (2, 2, 2)
    np.testing.assert_allclose(np.hypot(orbit[..., 0], orbit[..., 1]), np.repeat(r[:, None], 2, axis=1), atol=1e-8)
    with pytest.raises(ValueError):
        est.transform([[1.0, 2.0, 3.0]])
