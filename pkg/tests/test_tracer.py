from __future__ import annotations

import numpy as np
import pytest
from hypothesis import example, given
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from fieldham.core.angles import TWO_PI
from fieldham.core.bessel import bessel_j, bessel_zero
from fieldham.core.domains import Annulus, Disk
from fieldham.errors import BoundaryExitError, StagnationError
from fieldham.fields.isotopy import dehn_twist_isotopy, identity_isotopy, rigid_rotation_isotopy, suspension_field
from fieldham.fields.spec import (
    FunctionField,
    LundquistField,
    PerturbedField,
    ReversedField,
    straight_field,
    toroidal_field,
    zero_field,
)
from fieldham.tracer.integrator import integrate
from fieldham.tracer.tracing import crossings, monodromy, return_map, rotational_transform, section_orbits, trace

Z01, Z11 = bessel_zero(0, 1), bessel_zero(1, 1)


def test_integrator_matches_exponential():
    t, y, stats = integrate(lambda s, Y: -Y, 0.0, np.array([[1.0, 2.0]]), 3.0, 1e-12, 1e-14)
    assert t == 3.0
    np.testing.assert_allclose(y, [[np.exp(-3.0), 2 * np.exp(-3.0)]], rtol=1e-11)
    assert stats.steps > 0


def test_trace_straight_field():
    traj = trace(straight_field(Disk(1.0)), (0.0, 0.1, 0.2), 0.5)
    assert traj.x[-1] == pytest.approx(0.6, abs=1e-13)
    np.testing.assert_allclose(traj.y, 0.2, atol=1e-15)
    np.testing.assert_allclose(traj.x, 0.1 + traj.s, atol=1e-13)


def test_trace_zero_field_stagnates():
    with pytest.raises(StagnationError):
        trace(zero_field(Disk(1.0)), (0.0, 0.1, 0.2), 1.0)


def test_trace_reports_exit():
    traj = trace(straight_field(Disk(1.0)), (0.0, 0.5, 0.0), 2.0)
    assert traj.exited


def test_trace_agrees_with_independent_integrator():
    pert = PerturbedField(LundquistField(), epsilon=0.1)
    seed = (0.3, 3.0, 0.4)
    traj = trace(pert, seed, 5.0, rtol=1e-12, atol=1e-13)

    def rhs(s, u):
        return np.array(pert.evaluate(u[0], u[1], u[2], check=False), dtype=float)

    ref = solve_ivp(rhs, (0.0, 5.0), np.array(seed), method="DOP853", rtol=1e-13, atol=1e-14)
    assert abs(traj.s[-1] - 5.0) < 1e-12
    np.testing.assert_allclose([traj.x[-1], traj.y[-1]], ref.y[1:, -1], atol=1e-9)


def test_crossings_of_toroidal_field():
    out = crossings(toroidal_field(Disk(1.0)), (0, 1), 0.0, (0.0, 0.2, 0.1), 4)
    np.testing.assert_allclose([c.s for c in out], TWO_PI * np.arange(1, 5), atol=1e-10)
    assert all(c.point == pytest.approx((0.2, 0.1)) for c in out)


def test_return_map_of_rotation_suspension():
    spec = suspension_field(rigid_rotation_isotopy(Annulus(1.0, 2.0), 0.25))
    pts = np.array([[1.5, 0.0], [0.0, 1.2], [-1.1, -1.1]])
    sm = return_map(spec, (0, 1), 0.0, pts)
    np.testing.assert_allclose(sm.x_out, np.column_stack([-pts[:, 1], pts[:, 0]]), atol=1e-9)
    np.testing.assert_allclose(sm.tau, TWO_PI, atol=1e-9)
    np.testing.assert_allclose(sm.tau_raw, TWO_PI, atol=1e-9)


def test_monodromy_examples():
    ident = suspension_field(identity_isotopy(Annulus(1.0, 2.0)))
    pts = np.array([[1.5, 0.0], [0.0, 1.2]])
    np.testing.assert_allclose(monodromy(ident, (0, 1), 0.0, pts), pts, atol=1e-12)
    iso = dehn_twist_isotopy(Annulus(1.0, 2.0), 1)
    spec = suspension_field(iso)
    exact = np.column_stack(iso.map(TWO_PI, pts[:, 0], pts[:, 1]))
    np.testing.assert_allclose(monodromy(spec, (0, 1), 0.0, pts), exact, atol=1e-6)


def test_lundquist_monodromy_rotates_each_circle():
    r = np.array([2.6, 3.2, Z11])
    pts = np.column_stack([r, np.zeros_like(r)])
    out = monodromy(LundquistField(), (1, 1), 0.0, pts)
    rate = bessel_j(1, r) / r
    angle = TWO_PI * rate / (rate - bessel_j(0, r))
    np.testing.assert_allclose(np.hypot(out[:, 0], out[:, 1]), r, atol=1e-9)
    turned = np.mod(np.arctan2(out[:, 1], out[:, 0]), TWO_PI)
    np.testing.assert_allclose(np.minimum(np.abs(turned - np.mod(angle, TWO_PI)), TWO_PI - np.abs(turned - np.mod(angle, TWO_PI))), 0.0, atol=1e-8)
    assert np.hypot(out[-1, 0] - Z11, out[-1, 1]) < 1e-8


def test_rotational_transform_lundquist():
    lq = LundquistField()
    for r in (2.7, 3.4):
        res = rotational_transform(lq, (1, 0), (0, 1), (0.0, r, 0.0), 50)
        assert res.value == pytest.approx(float(LundquistField.rotational_transform(r)), abs=1e-6)
    res = rotational_transform(lq, (1, 0), (0, 1), (0.0, Z01, 0.0), 20)
    assert res.diverged and np.isinf(res.value)


def test_rotational_transform_of_rotation():
    spec = suspension_field(rigid_rotation_isotopy(Annulus(1.0, 2.0), 0.25))
    assert rotational_transform(spec, (1, 0), (0, 1), (0.0, 1.5, 0.0), 10).value == pytest.approx(0.25, abs=1e-10)


def test_rotational_transform_boundary_exit():
    leaky = FunctionField(Disk(1.0), lambda t, x, y: (1.0, 1.0 + 0 * x, 0 * y))
    with pytest.raises(BoundaryExitError):
        rotational_transform(leaky, (0, 1), (0, 1), (0.0, 0.0, 0.0), 5)


def test_section_orbits_shape_and_invariant_circles():
    r = np.linspace(2.5, 3.7, 4)
    table = section_orbits(LundquistField(), (1, 1), 0.0, np.column_stack([r, 0 * r]), 10)
    assert table.x.shape == (4, 10)
    np.testing.assert_allclose(np.hypot(table.x, table.y), np.repeat(r[:, None], 10, axis=1), atol=1e-9)


_PERT = PerturbedField(LundquistField(), epsilon=0.05)


@given(
    st.lists(st.tuples(st.floats(Z01 + 0.05, Z11 - 0.05), st.floats(0.0, TWO_PI)), min_size=1, max_size=3),
    st.floats(0.0, TWO_PI),
)
@example([(2.648365675899813, 5.390625)], 3.0)
def test_return_time_bounded_below_and_backward_inverts_forward(polar, level):
    # rtol 1e-10 leaves about 1e-8 of global error on long transits near the inner wall.
    pts = np.array([[r * np.cos(a), r * np.sin(a)] for r, a in polar])
    fw = return_map(_PERT, (1, 1), level, pts, rtol=1e-11, atol=1e-13)
    assert fw.delta > 0 and np.min(fw.tau_raw) > 0
    bw = return_map(ReversedField(_PERT), (-1, -1), -level, fw.x_out, rtol=1e-11, atol=1e-13)
    assert np.max(np.abs(bw.x_out - pts)) < 1e-8
