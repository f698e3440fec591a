from __future__ import annotations

import numpy as np
import pytest

from fieldham.core.bessel import bessel_j
from fieldham.core.domains import Annulus, Disk
from fieldham.errors import DegenerateTransformationError, InvalidArgumentError, PreconditionError, SingularGaugeError
from fieldham.fields.spec import FunctionField, LundquistField, PerturbedField, straight_field
from fieldham.clebsch import local_flux_coordinates, weyl_potential


def _flat_chart(b1, b2, b3, n=9):
    u = np.linspace(0.0, 1.0, n)
    shape = (n, n, n)
    dens = np.stack([np.broadcast_to(np.asarray(b, float), shape) for b in (b1, b2, b3)])
    return u, dens


def test_local_flux_coordinates_flat_chart():
    u, dens = _flat_chart(0.0, 1.0, 1.0)
    pair = local_flux_coordinates(u, u, u, dens, 0.0, 0.0)
    np.testing.assert_allclose(pair.H, 0.0, atol=1e-15)
    U1, U2, U3 = np.meshgrid(u, u, u, indexing="ij")
    np.testing.assert_allclose(pair.P, -U2 + U3, atol=1e-14)
    assert pair.residual < 1e-13


def test_local_flux_coordinates_zero_radial_component():
    u, dens = _flat_chart(0.0, 0.3, 2.0)
    assert np.all(local_flux_coordinates(u, u, u, dens, 0.5, 0.25).H == 0.0)


def test_local_flux_coordinates_degenerate():
    u, dens = _flat_chart(0.0, 1.0, 0.0)
    with pytest.raises(DegenerateTransformationError) as info:
        local_flux_coordinates(u, u, u, dens, 0.0, 0.0)
    assert len(info.value.nodes) == u.size**3


def test_local_flux_coordinates_rejects_off_node_base():
    u, dens = _flat_chart(0.0, 1.0, 1.0)
    with pytest.raises(InvalidArgumentError):
        local_flux_coordinates(u, u, u, dens, 0.01, 0.0)


def test_local_flux_coordinates_is_second_order():
    # A divergence-free density with sqrt(g) B^3 > 0 that varies along every axis.
    residuals = []
    for n in (17, 33):
        u = np.linspace(0.0, 1.0, n)
        U1, U2, U3 = np.meshgrid(u, u, u, indexing="ij")
        dens = np.stack([np.sin(U2), np.cos(U1 + U3), 2.0 + np.sin(U1)])
        residuals.append(local_flux_coordinates(u, u, u, dens, 0.0, 0.0).residual)
    assert np.log2(residuals[0] / residuals[1]) >= 1.8


def test_weyl_straight_field_on_disk():
    pair = weyl_potential(straight_field(Disk(1.0)), 32, 32, 4)
    np.testing.assert_allclose(pair.P, 0.0, atol=1e-15)
    np.testing.assert_allclose(pair.H, -pair.coords["y"], atol=1e-12)
    assert pair.residual < 1e-10


def test_weyl_lundquist_matches_bessel_quadratures():
    lq = LundquistField()
    pair = weyl_potential(lq, 32, 32, 4)
    r = pair.coords["r"]
    r0 = lq.domain.r0
    # P = -int s J0 = -(r J1(r) - r0 J1(r0)),  H = int J1 = J0(r0) - J0(r)
    np.testing.assert_allclose(pair.P, -(r * bessel_j(1, r) - r0 * bessel_j(1, r0)), atol=1e-11)
    np.testing.assert_allclose(pair.H, bessel_j(0, r0) - bessel_j(0, r), atol=1e-11)
    assert pair.residual < 1e-7


def test_weyl_residual_on_perturbation():
    # The ray quadrature is adaptive and d alpha is spectral, so the residual
    # is at roundoff once the angular modes are resolved.
    pert = PerturbedField(LundquistField())
    assert weyl_potential(pert, 24, 24, 8).residual < 1e-10


def test_weyl_preconditions():
    with pytest.raises(PreconditionError):
        weyl_potential(straight_field(Annulus(1.0, 2.0)), 16, 16, 2)
    singular = FunctionField(Disk(1.0), lambda t, x, y: (0 * x, -y / (x * x + y * y), x / (x * x + y * y)))
    with pytest.raises(SingularGaugeError):
        weyl_potential(singular, 16, 16, 2)
