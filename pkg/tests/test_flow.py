import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccbilliards import (CartesianChartState, ChartExitError, ChartState,
                         GeometryError, SingularFieldError, chart_embed,
                         chart_extract, chart_forward, chart_inverse,
                         chart_velocity_field, closed_form_flow,
                         integrate_chart_flow, integrate_polar_flow,
                         polar_velocity_field, reparameterization_factor,
                         singularity_jacobian)
from ccbilliards.flow import export_trajectory

KS = (-1, 0, 1)
TWO_PI = 2 * math.pi


def sample_in_chart_state(rng, k):
    """Random state whose short-time flow stays off the vertex."""
    r = rng.uniform(0.2, 0.8)
    gamma = rng.uniform(0, TWO_PI)
    side = rng.integers(0, 2)
    beta = rng.uniform(0.2, math.pi - 0.2) + side * math.pi
    return ChartState(r, gamma, beta)


class TestChart:
    def test_circle_collapses_gamma(self):
        for gamma in (0.0, 0.3, 2.0):
            c = chart_forward(ChartState(0.0, gamma, 1.2), 0.9)
            assert (c.x, c.y) == (0.0, 0.0)
            assert c.z == pytest.approx(1.2)

    def test_direct_substitution(self):
        c = chart_forward(ChartState(1.0, math.pi / 2, 0.0), math.pi)
        assert c.x == pytest.approx(0.0, abs=1e-15)
        assert c.y == pytest.approx(1.0, abs=1e-15)

    def test_round_trip_thousand(self):
        rng = np.random.default_rng(2)
        for _ in range(1000):
            theta = rng.uniform(0.1, 3.0)
            s = ChartState(rng.uniform(0, 2), rng.uniform(0, 2 * theta),
                           rng.uniform(0, TWO_PI))
            back = chart_inverse(chart_forward(s, theta), theta)
            assert back.r == pytest.approx(s.r, abs=1e-12)
            assert back.gamma == pytest.approx(s.gamma, abs=1e-12)
            assert back.beta == pytest.approx(s.beta, abs=1e-12)

    def test_nonpositive_angle_rejected(self):
        with pytest.raises(GeometryError):
            chart_forward(ChartState(1, 0, 0), 0.0)

    def test_embed_matches_forward_flat(self):
        s = ChartState(0.43, 0.2, 1.0)
        a, b = chart_embed(s, 0.8, 0), chart_forward(s, 0.8)
        assert (a.x, a.y, a.z) == (b.x, b.y, b.z)

    def test_embed_extract_round_trip(self):
        rng = np.random.default_rng(4)
        for k in KS:
            for _ in range(200):
                theta = rng.uniform(0.1, 3.0)
                s = ChartState(rng.uniform(0, 1.2), rng.uniform(0, 2 * theta),
                               rng.uniform(0, TWO_PI))
                back = chart_extract(chart_embed(s, theta, k), theta, k)
                assert back.r == pytest.approx(s.r, abs=1e-12)
                assert back.gamma == pytest.approx(s.gamma, abs=1e-12)


class TestPolarField:
    def test_radial_motion(self):
        for k in KS:
            v = polar_velocity_field(ChartState(0.7, 0.1, 0.0), k)
            np.testing.assert_allclose(v, [1, 0, 0], atol=1e-15)

    def test_flat_values(self):
        v = polar_velocity_field(ChartState(2.0, 0.0, math.pi / 2), 0)
        np.testing.assert_allclose(v, [0, 0.5, -0.5], atol=1e-15)

    def test_hyperbolic_values(self):
        v = polar_velocity_field(ChartState(1.0, 0.0, math.pi / 2), -1)
        assert v[1] == pytest.approx(1 / math.sinh(1), abs=1e-12)
        assert v[2] == pytest.approx(-math.cosh(1) / math.sinh(1), abs=1e-12)

    def test_first_component_is_cos_beta(self):
        rng = np.random.default_rng(7)
        for k in KS:
            for _ in range(200):
                s = ChartState(rng.uniform(0.05, 2 if k == 1 else 5),
                               rng.uniform(0, 6), rng.uniform(0, TWO_PI))
                v = polar_velocity_field(s, k)
                assert v[0] == math.cos(s.beta)

    def test_singular_at_zero(self):
        with pytest.raises(SingularFieldError):
            polar_velocity_field(ChartState(0.0, 0.0, 1.0), 0)


class TestClosedForm:
    def test_identity_at_zero(self):
        s = ChartState(0.5, 1.0, 2.0)
        for k in KS:
            out = closed_form_flow(s, 0.0, k)
            assert (out.r, out.gamma, out.beta) == (0.5, 1.0, 2.0)

    def test_flat_example(self):
        out = closed_form_flow(ChartState(1.0, 0.0, math.pi / 2), 1.0, 0)
        assert out.r == pytest.approx(math.sqrt(2), abs=1e-15)
        assert out.gamma == pytest.approx(math.pi / 4, abs=1e-15)
        assert out.beta == pytest.approx(math.pi / 4, abs=1e-15)

    def test_equatorial_orbit(self):
        for t in (0.3, 1.0, 4.0, 9.0, 20.0):
            out = closed_form_flow(ChartState(math.pi / 2, 0.0, math.pi / 2), t, 1)
            assert out.r == pytest.approx(math.pi / 2, abs=1e-12)
            assert out.gamma == pytest.approx(t, abs=1e-9)
            assert out.beta == pytest.approx(math.pi / 2, abs=1e-12)

    def test_flat_conservation_exact(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            s = ChartState(rng.uniform(0.1, 3), rng.uniform(0, 6),
                           rng.uniform(0.1, math.pi - 0.1))
            out = closed_form_flow(s, rng.uniform(0, 4), 0)
            assert out.gamma + out.beta == pytest.approx(s.gamma + s.beta,
                                                         abs=1e-12)

    def test_group_property(self):
        # flowing t then u equals flowing t + u
        rng = np.random.default_rng(13)
        for k in KS:
            for _ in range(300):
                s = sample_in_chart_state(rng, k)
                t, u = rng.uniform(0.05, 0.6, size=2)
                a = closed_form_flow(closed_form_flow(s, t, k), u, k)
                b = closed_form_flow(s, t + u, k)
                assert a.r == pytest.approx(b.r, abs=1e-10)
                assert math.cos(a.beta) == pytest.approx(math.cos(b.beta), abs=1e-9)
                # gamma branch: compare increments mod winding
                assert a.gamma == pytest.approx(b.gamma, abs=1e-8)

    def test_backward_inverts_forward(self):
        rng = np.random.default_rng(17)
        for k in KS:
            for _ in range(300):
                s = sample_in_chart_state(rng, k)
                t = rng.uniform(0.05, 0.5)
                out = closed_form_flow(closed_form_flow(s, t, k), -t, k)
                assert out.r == pytest.approx(s.r, abs=1e-10)
                assert out.gamma == pytest.approx(s.gamma, abs=1e-9)
                assert out.beta == pytest.approx(s.beta, abs=1e-9)

    def test_chart_exit_reported(self):
        with pytest.raises(ChartExitError) as ei:
            closed_form_flow(ChartState(0.4, 0.0, 0.2), 2.0, 0, eps=0.5)
        err = ei.value
        assert 0.0 < err.exit_time < 2.0
        assert err.state.r == pytest.approx(0.5, abs=1e-6)

    def test_vertex_crossing_flips_gamma(self):
        out = closed_form_flow(ChartState(1.0, 0.3, math.pi), 1.5, 0)
        assert out.r == pytest.approx(0.5, abs=1e-15)
        assert out.beta == pytest.approx(0.0)
        assert out.gamma % TWO_PI == pytest.approx((0.3 + math.pi) % TWO_PI)


class TestOracleEquivalence:
    @pytest.mark.parametrize("k", KS)
    def test_integration_matches_closed_form(self, k):
        rng = np.random.default_rng(100 + k)
        worst = 0.0
        for _ in range(200):
            s = sample_in_chart_state(rng, k)
            t = rng.uniform(0.05, 0.6)
            a = integrate_polar_flow(s, t, k)
            b = closed_form_flow(s, t, k)
            err = max(abs(a.r - b.r), abs(a.gamma - b.gamma),
                      abs(a.beta - b.beta)) / max(1.0, abs(b.r))
            worst = max(worst, err)
        assert worst < 1e-8


class TestChartField:
    def test_on_circle_values(self):
        for theta in (0.3, 1.0, 2.5):
            for k in KS:
                for z in np.linspace(0, TWO_PI, 37):
                    v = chart_velocity_field(CartesianChartState(0, 0, z),
                                             theta, k)
                    np.testing.assert_allclose(v, [0, 0, -math.sin(z)],
                                               atol=1e-15)

    def test_two_fixed_points(self):
        for z0 in (0.0, math.pi):
            v = chart_velocity_field(CartesianChartState(0, 0, z0), 1.0, 1)
            np.testing.assert_allclose(v, [0, 0, 0], atol=1e-15)

    def test_flat_substitution(self):
        v = chart_velocity_field(CartesianChartState(0.1, 0.0, math.pi / 2),
                                 math.pi / 2, 0)
        np.testing.assert_allclose(v, [0, 0.2, -1], atol=1e-15)

    def test_sphere_domain_error(self):
        with pytest.raises(GeometryError):
            chart_velocity_field(CartesianChartState(1.0, 0.2, 0.0), 1.0, 1)

    def test_consistency_with_rescaled_polar_field(self):
        # push the polar field through the embedding differential and
        # multiply by the rescaling factor: must equal the chart field
        rng = np.random.default_rng(23)
        for k in KS:
            theta = 0.9
            pf = math.pi / theta
            for _ in range(200):
                s = ChartState(rng.uniform(0.05, 0.9), rng.uniform(0, 2 * theta),
                               rng.uniform(0, TWO_PI))
                rho = math.sin(s.r) if k == 1 else (
                    math.sinh(s.r) if k == -1 else s.r)
                x = polar_velocity_field(s, k) * rho
                a = s.gamma * pf
                rr = rho
                drr = math.cos(s.r) if k == 1 else (
                    math.cosh(s.r) if k == -1 else 1.0)
                jac = np.array([
                    [drr * math.cos(a), -rr * math.sin(a) * pf, 0.0],
                    [drr * math.sin(a), rr * math.cos(a) * pf, 0.0],
                    [0.0, 0.0, 1.0]])
                pushed = jac @ x
                c = chart_embed(s, theta, k)
                z = chart_velocity_field(c, theta, k)
                np.testing.assert_allclose(pushed, z, atol=1e-9)


class TestSingularityJacobian:
    def test_analytic_eigenvalues(self):
        for theta in (math.pi / 6, math.pi / 2, 2.0):
            for k in KS:
                _, e0 = singularity_jacobian(0.0, theta, k)
                np.testing.assert_allclose(e0, [-1, 1, 1], atol=1e-14)
                _, epi = singularity_jacobian(math.pi, theta, k)
                np.testing.assert_allclose(epi, [-1, -1, 1], atol=1e-14)

    def test_finite_difference_oracle(self):
        h = 1e-6
        for theta in (math.pi / 6, math.pi / 2, 2.0):
            for k in KS:
                for z0 in (0.0, math.pi):
                    jac, _ = singularity_jacobian(z0, theta, k)
                    fd = np.empty((3, 3))
                    base = np.array([0.0, 0.0, z0])
                    for j in range(3):
                        ep = base.copy()
                        ep[j] += h
                        em = base.copy()
                        em[j] -= h
                        fp = chart_velocity_field(
                            CartesianChartState(*ep), theta, k)
                        fm = chart_velocity_field(
                            CartesianChartState(*em), theta, k)
                        fd[:, j] = (fp - fm) / (2 * h)
                    np.testing.assert_allclose(fd, jac, atol=1e-6)


class TestRho:
    def test_zero_at_vertex(self):
        for k in KS:
            assert reparameterization_factor(0.0, k, 1.0) == 0.0

    def test_raw_inside_half(self):
        assert reparameterization_factor(0.3, 0, 1.0) == 0.3
        assert reparameterization_factor(0.3, -1, 1.0) == math.sinh(0.3)
        assert reparameterization_factor(0.3, 1, 1.0) == math.sin(0.3)

    def test_one_outside(self):
        for k in KS:
            assert reparameterization_factor(1.0, k, 1.0) == 1.0
            assert reparameterization_factor(7.3, k, 0.4) == 1.0

    def test_smooth_monotone_blend(self):
        rs = np.linspace(0.4, 1.1, 400)
        vals = [reparameterization_factor(r, 0, 1.0) for r in rs]
        assert all(np.diff(vals) > -1e-12)


class TestIntegrateChartFlow:
    def test_south_north_on_circle(self):
        traj = integrate_chart_flow(CartesianChartState(0, 0, math.pi / 2),
                                    30.0, 1.0, 0)
        assert np.all(np.abs(traj.states[:, :2]) == 0.0)
        z = traj.states[:, 2]
        assert np.all(np.diff(z) <= 1e-14)
        assert z[-1] < 1e-10

    def test_fixed_point_stationary(self):
        traj = integrate_chart_flow(CartesianChartState(0, 0, 0), 10.0, 0.7, -1)
        np.testing.assert_allclose(traj.states[-1], [0, 0, 0], atol=1e-15)

    def test_matches_closed_form_through_time_change(self):
        rng = np.random.default_rng(31)
        for k in KS:
            theta = 1.1
            for _ in range(20):
                s0 = ChartState(rng.uniform(0.2, 0.5), rng.uniform(0, 2 * theta),
                                rng.uniform(0.3, math.pi - 0.3))
                c0 = chart_embed(s0, theta, k)
                traj = integrate_chart_flow(c0, 0.5, theta, k,
                                            track_arc_time=True)
                t_geo = traj.arc_time[-1]
                ref = chart_embed(closed_form_flow(s0, t_geo, k), theta, k)
                got = traj.final()
                assert abs(got.x - ref.x) < 1e-8
                assert abs(got.y - ref.y) < 1e-8
                assert abs(got.z - ref.z) < 1e-8

    def test_exit_flagged_at_radius(self):
        traj = integrate_chart_flow(CartesianChartState(0.2, 0.0, 0.3),
                                    5.0, 1.0, 0, eps=0.5)
        assert traj.exited
        assert math.hypot(*traj.states[-1][:2]) == pytest.approx(0.5, abs=1e-9)

    def test_export_format(self, tmp_path):
        traj = integrate_chart_flow(CartesianChartState(0.1, 0.0, 1.0),
                                    0.5, 1.0, 0)
        out = tmp_path / "traj.txt"
        export_trajectory(traj, out)
        lines = out.read_text().strip().splitlines()
        assert len(lines) == len(traj.t)
        first = lines[0].split()
        assert len(first) == 4
        assert float(first[1]) == pytest.approx(0.1)


@settings(max_examples=300, deadline=None)
@given(st.floats(1e-6, 2.0), st.floats(0, 100), st.floats(0, TWO_PI),
       st.floats(0.05, 3.0))
def test_chart_round_trip_property(r, gamma, beta, theta):
    s = ChartState(r, gamma % (2 * theta), beta)
    back = chart_inverse(chart_forward(s, theta), theta)
    assert back.r == pytest.approx(s.r, rel=1e-12, abs=1e-12)
    assert back.gamma == pytest.approx(s.gamma, abs=1e-9 * max(1, theta))
