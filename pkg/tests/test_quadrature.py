"""Tests for the zonal, bizonal, product-grid and Monte Carlo rules."""

import math

import numpy as np
import pytest


# ═══════════════════════════════════════════════════════════════
# Rules and nodes
# ═══════════════════════════════════════════════════════════════

class TestQuadratureRule:
    """Validation and derived rules."""

    def test_too_few_nodes(self):
        from yamabe_nodal.errors import QuadratureError
        from yamabe_nodal.quadrature import QuadratureRule

        with pytest.raises(QuadratureError):
            QuadratureRule(resolution=4)

    def test_too_few_samples(self):
        from yamabe_nodal.errors import QuadratureError
        from yamabe_nodal.quadrature import QuadratureKind, QuadratureRule

        with pytest.raises(QuadratureError):
            QuadratureRule(kind=QuadratureKind.MONTE_CARLO, resolution=100)

    def test_concentrated_and_refined(self):
        from yamabe_nodal.quadrature import QuadratureRule

        rule = QuadratureRule(resolution=16)
        graded = rule.concentrated(0.01)
        assert graded.grading_width == pytest.approx(0.05)
        assert rule.grading_width == 0.0
        finer = rule.refined()
        assert finer.resolution == 32
        assert finer.angular == 32

    @pytest.mark.parametrize("n", range(3, 8))
    def test_zonal_calibration(self, n, zonal_rule):
        assert zonal_rule.calibrate(n) < 1e-12

    @pytest.mark.parametrize("n", [3, 4, 6])
    def test_product_grid_calibration(self, n, grid_rule):
        assert grid_rule.calibrate(n) < 1e-10

    def test_calibration_failure_raises(self):
        """A coarse rule cannot meet a tolerance below machine precision."""
        from yamabe_nodal.errors import QuadratureError
        from yamabe_nodal.quadrature import QuadratureRule

        bad = QuadratureRule(resolution=8, reported_tolerance=1e-300)
        with pytest.raises(QuadratureError) as info:
            bad.calibrate(7)
        assert info.value.context["n"] == 7


class TestGradedEdges:

    def test_no_grading(self):
        from yamabe_nodal.quadrature import graded_edges

        assert graded_edges(0.0, 1.0, (0.0,), 0.0) == [0.0, 1.0]

    def test_grading_around_focus(self):
        from yamabe_nodal.quadrature import graded_edges

        edges = graded_edges(0.0, math.pi, (1.0,), 0.01)
        assert edges[0] == 0.0
        assert edges[-1] == math.pi
        assert edges == sorted(edges)
        assert 1.0 in edges
        assert pytest.approx(1.01) in edges
        widths = np.diff(edges)
        assert widths.min() == pytest.approx(0.01)

    def test_empty_range(self):
        from yamabe_nodal.errors import QuadratureError
        from yamabe_nodal.quadrature import graded_edges

        with pytest.raises(QuadratureError):
            graded_edges(1.0, 1.0, (), 0.1)


# ═══════════════════════════════════════════════════════════════
# Zonal and bizonal integration
# ═══════════════════════════════════════════════════════════════

class TestZonal:

    @pytest.mark.parametrize("n", [3, 5])
    def test_second_moment(self, n, zonal_rule):
        """∫ x₀² dV = ω_n/(n+1)."""
        from yamabe_nodal.quadrature import integrate_zonal
        from yamabe_nodal.sphere_geometry import sphere_volume

        value = integrate_zonal(n, lambda r: np.cos(r) ** 2, zonal_rule)
        assert value == pytest.approx(sphere_volume(n) / (n + 1), rel=1e-12)

    def test_ball_and_complement_add_up(self, zonal_rule):
        from yamabe_nodal.quadrature import ball_restricted_zonal, integrate_zonal
        from yamabe_nodal.sphere_geometry import sphere_volume

        def f(r):
            return np.exp(-r)

        inside = ball_restricted_zonal(4, 0.7, f, zonal_rule)
        outside = ball_restricted_zonal(4, 0.7, f, zonal_rule, complement=True)
        whole = ball_restricted_zonal(4, math.pi, lambda r: np.ones_like(r), zonal_rule)
        assert inside > 0 and outside > 0
        assert whole == pytest.approx(sphere_volume(4))
        assert inside + outside == pytest.approx(integrate_zonal(4, f, zonal_rule), rel=1e-12)

    def test_complement_of_whole_sphere_is_empty(self, zonal_rule):
        from yamabe_nodal.quadrature import ball_restricted_zonal

        assert ball_restricted_zonal(3, math.pi, np.cos, zonal_rule, complement=True) == 0.0

    def test_bad_radius(self, zonal_rule):
        from yamabe_nodal.errors import DimensionError
        from yamabe_nodal.quadrature import ball_restricted_zonal

        with pytest.raises(DimensionError):
            ball_restricted_zonal(3, 0.0, np.cos, zonal_rule)

    def test_non_finite_integrand(self, zonal_rule):
        from yamabe_nodal.errors import QuadratureError
        from yamabe_nodal.quadrature import integrate_zonal

        with pytest.raises(QuadratureError) as info:
            integrate_zonal(3, lambda r: np.full_like(r, np.nan), zonal_rule)
        assert "node" in info.value.context

    def test_monte_carlo_rule_rejected(self, mc_rule):
        from yamabe_nodal.errors import QuadratureError
        from yamabe_nodal.quadrature import integrate_zonal

        with pytest.raises(QuadratureError):
            integrate_zonal(3, np.cos, mc_rule)


class TestBizonal:

    @pytest.mark.parametrize("theta", [0.3, math.pi / 2, 2.5])
    def test_volume(self, theta, zonal_rule):
        from yamabe_nodal.quadrature import integrate_bizonal
        from yamabe_nodal.sphere_geometry import sphere_volume

        value = integrate_bizonal(4, theta, lambda r, psi: np.ones_like(r), zonal_rule)
        assert value == pytest.approx(sphere_volume(4), rel=1e-12)

    def test_second_center_moment(self, zonal_rule):
        """cos d(x, q) integrates like x₀², whatever the angle θ."""
        from yamabe_nodal.quadrature import bizonal_gap, integrate_bizonal
        from yamabe_nodal.sphere_geometry import sphere_volume

        theta = 1.1

        def f(r, psi):
            return (1.0 - bizonal_gap(r, psi, theta)) ** 2

        value = integrate_bizonal(3, theta, f, zonal_rule)
        assert value == pytest.approx(sphere_volume(3) / 4, rel=1e-10)

    def test_gap_at_center(self):
        from yamabe_nodal.quadrature import bizonal_gap

        theta = 0.8
        gap = bizonal_gap(np.array([theta]), np.array([0.0]), theta)
        assert gap[0] == pytest.approx(0.0, abs=1e-15)
        far = bizonal_gap(np.array([0.0]), np.array([1.0]), theta)
        assert far[0] == pytest.approx(1 - math.cos(theta))


# ═══════════════════════════════════════════════════════════════
# Product grid
# ═══════════════════════════════════════════════════════════════

class TestProductGrid:

    @pytest.mark.parametrize("n,m", [(3, 9), (5, 6), (7, 2)])
    def test_moment_about_another_center(self, n, m, grid_rule):
        from yamabe_nodal.quadrature import integrate_product_grid
        from yamabe_nodal.sphere_geometry import SpherePoint, sphere_volume
        from yamabe_nodal.symmetry_group import ansatz_orbit

        centers = ansatz_orbit(n, m).centers()
        c = centers[1]
        value = integrate_product_grid(
            n, lambda pts: (pts @ c) ** 2, grid_rule, SpherePoint(centers[0]), centers)
        assert value == pytest.approx(sphere_volume(n) / (n + 1), rel=1e-10)

    def test_frame_dimensions(self):
        from yamabe_nodal.quadrature import polar_frame
        from yamabe_nodal.sphere_geometry import SpherePoint
        from yamabe_nodal.symmetry_group import ansatz_orbit

        centers = ansatz_orbit(5, 6).centers()
        frame = polar_frame(SpherePoint(centers[0]), centers)
        assert frame.a == 3
        assert frame.b == 2
        assert frame.zeta is not None

    def test_span_too_large(self):
        from yamabe_nodal.errors import QuadratureError
        from yamabe_nodal.quadrature import polar_frame, tangent_directions
        from yamabe_nodal.sphere_geometry import SpherePoint

        frame = polar_frame(SpherePoint.basis(6, 0), np.eye(7)[:6])
        with pytest.raises(QuadratureError):
            tangent_directions(frame, 8)


# ═══════════════════════════════════════════════════════════════
# Monte Carlo
# ═══════════════════════════════════════════════════════════════

class TestMonteCarlo:

    def test_samples_on_sphere(self):
        from yamabe_nodal.quadrature import sample_sphere

        pts = sample_sphere(4, 1000, seed=1)
        assert np.allclose(np.linalg.norm(pts, axis=1), 1.0)

    def test_constant_is_exact(self, mc_rule):
        from yamabe_nodal.quadrature import integrate_mc_batch
        from yamabe_nodal.sphere_geometry import sphere_volume

        value, err = integrate_mc_batch(3, lambda pts: np.ones(len(pts)), mc_rule)
        assert value == pytest.approx(sphere_volume(3))
        assert err == 0.0

    def test_second_moment_within_error(self, mc_rule):
        from yamabe_nodal.quadrature import integrate_mc_batch
        from yamabe_nodal.sphere_geometry import sphere_volume

        value, err = integrate_mc_batch(3, lambda pts: pts[:, 0] ** 2, mc_rule)
        assert abs(value - sphere_volume(3) / 4) < 5 * err

    def test_seed_reproducible(self):
        from yamabe_nodal.quadrature import QuadratureKind, QuadratureRule, integrate_mc

        rule = QuadratureRule(kind=QuadratureKind.MONTE_CARLO, resolution=10_000, seed=11)
        first = integrate_mc(3, lambda p: float(p.coords[1] ** 2), rule)
        second = integrate_mc(3, lambda p: float(p.coords[1] ** 2), rule)
        assert first == second

    def test_grid_rule_rejected(self, zonal_rule):
        from yamabe_nodal.errors import QuadratureError
        from yamabe_nodal.quadrature import integrate_mc_batch

        with pytest.raises(QuadratureError):
            integrate_mc_batch(3, lambda pts: np.ones(len(pts)), zonal_rule)
