from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from fieldham.core.angles import TWO_PI, unwrap, wrap_angle
from fieldham.core.bessel import bessel_j, bessel_j_derivative, bessel_zero
from fieldham.core.domains import Annulus, Disk, Location, boundary_normal, contains
from fieldham.core.grids import PolarGrid
from fieldham.core.spectral import TensorInterpolant, fourier_cumulative, harmonics, trig_cardinal_weights
from fieldham.errors import AmbiguousLiftError, InvalidArgumentError


# -- angles ------------------------------------------------------------------


def test_wrap_angle_examples():
    assert wrap_angle(TWO_PI) == 0.0
    assert wrap_angle(-np.pi / 2) == pytest.approx(3 * np.pi / 2, abs=1e-15)
    # Independent oracle: direct modular arithmetic.
    assert wrap_angle(7.0) == pytest.approx(0.7168146928204138, abs=1e-12)


def test_wrap_angle_rejects_non_finite():
    with pytest.raises(InvalidArgumentError):
        wrap_angle(np.inf)


def test_unwrap_examples():
    np.testing.assert_allclose(unwrap([0, np.pi / 2, np.pi, 3 * np.pi / 2, 0]), [0, np.pi / 2, np.pi, 3 * np.pi / 2, TWO_PI])
    np.testing.assert_array_equal(unwrap([1.5, 1.5, 1.5]), [1.5, 1.5, 1.5])
    np.testing.assert_allclose(unwrap([0.0, 5.0, 1.0]), [0.0, 5.0 - TWO_PI, 1.0], atol=1e-15)


def test_unwrap_half_turn_is_ambiguous():
    with pytest.raises(AmbiguousLiftError):
        unwrap([0.0, np.pi])


@given(st.floats(-1e6, 1e6, allow_nan=False))
def test_wrap_range_and_class(x):
    w = wrap_angle(x)
    assert 0.0 <= w < TWO_PI
    k = (x - w) / TWO_PI
    assert abs(k - round(k)) < 1e-9 * max(1.0, abs(x))


@given(st.lists(st.floats(-3.0, 3.0, allow_nan=False), min_size=1, max_size=40), st.floats(-10, 10, allow_nan=False))
def test_unwrap_of_wrapped_lift_recovers_lift(steps, start):
    lift = start + np.cumsum(steps)
    out = unwrap(wrap_angle(lift))
    # The lift is recovered up to one global multiple of 2 pi, to roundoff.
    shift = np.round((lift[0] - out[0]) / TWO_PI) * TWO_PI
    np.testing.assert_allclose(out + shift, lift, atol=1e-9)


# -- Bessel functions ---------------------------------------------------------


def test_bessel_trivial_values():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(1, 0.0) == 0.0


def test_bessel_near_first_zero():
    assert abs(bessel_j(0, 2.4048255577)) < 1e-9


def test_bessel_zeros_bracketed_and_ordered():
    z01, z11, z02 = bessel_zero(0, 1), bessel_zero(1, 1), bessel_zero(0, 2)
    assert 2 < z01 < 3 and abs(bessel_j(0, z01)) < 1e-12
    assert 3 < z11 < 4 and abs(bessel_j(1, z11)) < 1e-12
    assert z01 < z11 < z02


def test_bessel_zeros_match_independent_tables():
    for order in (0, 1):
        ref = special.jn_zeros(order, 5)
        got = [bessel_zero(order, k) for k in range(1, 6)]
        np.testing.assert_allclose(got, ref, rtol=0, atol=1e-12)


def test_bessel_matches_independent_implementation():
    x = np.linspace(-50, 50, 2001)
    for order in (0, 1):
        np.testing.assert_allclose(bessel_j(order, x), special.jv(order, x), rtol=0, atol=5e-15 * 10)


def test_bessel_rejects_bad_input():
    with pytest.raises(InvalidArgumentError):
        bessel_j(2, 1.0)
    with pytest.raises(InvalidArgumentError):
        bessel_zero(0, 0)


@given(st.floats(0.01, 45.0))
def test_bessel_recurrence_and_derivatives(x):
    j0, j1 = bessel_j(0, x), bessel_j(1, x)
    # J2 by the three-term recurrence must agree with the independent value.
    j2 = 2.0 * j1 / x - j0
    assert abs(j2 - special.jv(2, x)) < 1e-13 * max(1.0, 1.0 / x)
    assert bessel_j_derivative(0, x) == -j1
    assert abs(bessel_j_derivative(1, x) - 0.5 * (j0 - j2)) < 1e-13 * max(1.0, 1.0 / x)


# -- domains -------------------------------------------------------------------


def test_contains_examples():
    assert contains(Annulus(1, 2), 1.5, 0) == Location.INTERIOR
    assert contains(Annulus(1, 2), 2, 0) == Location.BOUNDARY
    assert contains(Disk(1), 2, 0) == Location.OUTSIDE


def test_boundary_normal_examples():
    np.testing.assert_allclose(boundary_normal(Disk(1), 1, 0), [1, 0])
    np.testing.assert_allclose(boundary_normal(Annulus(1, 2), 1, 0), [-1, 0])
    np.testing.assert_allclose(boundary_normal(Annulus(1, 2), 0, 2), [0, 1], atol=1e-15)


def test_domain_validation():
    with pytest.raises(InvalidArgumentError):
        Annulus(2, 1)
    with pytest.raises(InvalidArgumentError):
        Disk(-1)


# -- spectral grids --------------------------------------------------------------


@pytest.mark.parametrize("domain", [Annulus(1.0, 2.0), Disk(1.5)])
def test_polar_grid_integrates_and_differentiates(domain):
    g = PolarGrid(domain, 32, 40)
    f = np.exp(0.3 * g.x) * np.cos(g.y)
    fx, fy = g.gradient(f)
    np.testing.assert_allclose(fx, 0.3 * f, atol=1e-11)
    np.testing.assert_allclose(fy, -np.exp(0.3 * g.x) * np.sin(g.y), atol=1e-11)
    # Area and second moment against closed forms.
    assert g.integrate(np.ones(g.shape)) == pytest.approx(domain.area, rel=1e-13)
    r0 = 0.0 if isinstance(domain, Disk) else domain.r0
    assert g.integrate(g.x**2 + g.y**2) == pytest.approx(np.pi / 2 * (domain.r_outer**4 - r0**4), rel=1e-13)


@pytest.mark.parametrize("domain", [Annulus(1.0, 2.0), Disk(1.0)])
def test_curl_and_radial_moment(domain):
    g = PolarGrid(domain, 24, 24)
    # d(x^2 y dx + x y^2 dy) = (y^2 - x^2) dx ^ dy
    np.testing.assert_allclose(g.curl(g.x**2 * g.y, g.x * g.y**2), g.y**2 - g.x**2, atol=1e-11)
    # integral_{r_b}^{r} s^2 s ds for rho = r^2
    rb = 0.0 if isinstance(domain, Disk) else domain.r0
    np.testing.assert_allclose(g.radial_moment(g.R**2), (g.R**4 - rb**4) / 4, atol=1e-12)


@given(st.floats(0.0, TWO_PI), st.integers(3, 12))
def test_trig_cardinal_weights_reproduce_band_limited_data(t, n):
    nodes = 0.4 + TWO_PI * np.arange(n) / n
    k = (n - 1) // 2
    f = lambda s: 1.0 + np.cos(k * s) - 0.5 * np.sin(k * s)  # noqa: E731
    assert abs(trig_cardinal_weights(t, n, 0.4) @ f(nodes) - f(t)) < 1e-12


def test_harmonics_and_fourier_cumulative():
    th = np.linspace(0, 6, 7)
    c, s = harmonics(th, 5)
    np.testing.assert_allclose(c, np.cos(np.outer(th, np.arange(5))), atol=1e-14)
    np.testing.assert_allclose(s, np.sin(np.outer(th, np.arange(5))), atol=1e-14)
    grid = TWO_PI * np.arange(16) / 16
    G, mean = fourier_cumulative(2.0 + np.cos(grid))
    assert mean == pytest.approx(2.0)
    np.testing.assert_allclose(G, np.sin(grid), atol=1e-14)


def test_tensor_interpolant_trim_keeps_accuracy():
    g = PolarGrid(Annulus(1.0, 2.0), 24, 24)
    f = np.cos(g.x) + g.y
    full = g.interpolant(f)
    trimmed = g.interpolant(f, trim=1e-15)
    x, y = np.array([1.2, -1.7]), np.array([0.3, 0.4])
    np.testing.assert_allclose(trimmed(x, y), full(x, y), atol=1e-13)
    np.testing.assert_allclose(full(x, y), np.cos(x) + y, atol=1e-10)
    assert isinstance(full._interp, TensorInterpolant)
