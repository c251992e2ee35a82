"""Tests for the bubbles u_β and the signed superposition w_β."""

import math

import numpy as np
import pytest


@pytest.fixture
def bubble():
    from yamabe_nodal.bubble_ansatz import Bubble
    from yamabe_nodal.sphere_geometry import SpherePoint

    return Bubble(4, SpherePoint.basis(4, 0), 1.2)


class TestBubble:
    """Values, derivatives and parameter validation."""

    def test_peak_and_trough(self, bubble):
        from yamabe_nodal.bubble_ansatz import bubble_value
        from yamabe_nodal.sphere_geometry import SpherePoint

        center = bubble.center
        assert bubble_value(bubble, center) == pytest.approx(bubble.peak)
        assert bubble_value(bubble, SpherePoint(-center.coords)) == pytest.approx(bubble.trough)
        assert bubble.peak * bubble.trough == pytest.approx(1.0)

    def test_peak_formula(self):
        from yamabe_nodal.bubble_ansatz import Bubble
        from yamabe_nodal.sphere_geometry import SpherePoint

        b = Bubble(3, SpherePoint.basis(3, 0), 1.01)
        assert b.peak == pytest.approx((2.01 / 0.01) ** 0.25)

    @pytest.mark.parametrize("beta", [1.0, 0.5, 1.0 + 1e-10, float("nan")])
    def test_degenerate_beta(self, beta):
        from yamabe_nodal.bubble_ansatz import Bubble
        from yamabe_nodal.errors import DegenerateBubbleError
        from yamabe_nodal.sphere_geometry import SpherePoint

        with pytest.raises(DegenerateBubbleError):
            Bubble(3, SpherePoint.basis(3, 0), beta)

    def test_center_dimension_checked(self):
        from yamabe_nodal.bubble_ansatz import Bubble
        from yamabe_nodal.errors import DimensionError
        from yamabe_nodal.sphere_geometry import SpherePoint

        with pytest.raises(DimensionError):
            Bubble(4, SpherePoint.basis(3, 0), 1.5)

    def test_radial_derivative_matches_difference_quotient(self, bubble):
        from yamabe_nodal.bubble_ansatz import bubble_radial_derivative, radial_profile

        h = 1e-6
        for r in (0.1, 0.8, 2.0):
            numeric = (radial_profile(4, 1.2, r + h) - radial_profile(4, 1.2, r - h)) / (2 * h)
            assert bubble_radial_derivative(bubble, r) == pytest.approx(float(numeric), rel=1e-6)
        assert bubble_radial_derivative(bubble, 0.0) == 0.0

    def test_radial_derivative_range(self, bubble):
        from yamabe_nodal.bubble_ansatz import bubble_radial_derivative
        from yamabe_nodal.errors import DimensionError

        with pytest.raises(DimensionError):
            bubble_radial_derivative(bubble, 4.0)

    def test_gradient_is_tangent(self, bubble):
        rng = np.random.default_rng(1)
        pts = rng.standard_normal((50, 5))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        grads = bubble.gradients(pts)
        assert np.allclose(np.einsum("ij,ij->i", grads, pts), 0.0, atol=1e-12)

    def test_gradient_norm_is_radial_derivative(self, bubble):
        from yamabe_nodal.bubble_ansatz import bubble_radial_derivative

        r = 0.9
        q = np.array([[math.cos(r), 0.0, math.sin(r), 0.0, 0.0]])
        grad = bubble.gradients(q)[0]
        assert np.linalg.norm(grad) == pytest.approx(abs(bubble_radial_derivative(bubble, r)))


class TestSolutionIdentity:
    """∫u^{2*} = ω_n and ‖u‖² = a_n ω_n for every β."""

    @pytest.mark.parametrize("n", [3, 4, 5])
    @pytest.mark.parametrize("beta", [1.5, 3.0, 10.0])
    def test_identity_holds(self, n, beta, zonal_rule):
        from yamabe_nodal.bubble_ansatz import Bubble, solution_identity_check
        from yamabe_nodal.sphere_geometry import SpherePoint

        report = solution_identity_check(Bubble(n, SpherePoint.basis(n, 0), beta), zonal_rule)
        assert report.ok, (report.mass_rel_error, report.norm_rel_error)

    def test_identity_near_concentration(self, zonal_rule):
        from yamabe_nodal.bubble_ansatz import Bubble, solution_identity_check
        from yamabe_nodal.sphere_geometry import SpherePoint

        report = solution_identity_check(Bubble(3, SpherePoint.basis(3, 0), 1.01), zonal_rule,
                                         tolerance=1e-4)
        assert report.ok

    def test_tampered_volume_is_caught(self, monkeypatch, zonal_rule):
        """A wrong ω_n in the constants must make the identity fail."""
        import dataclasses

        from yamabe_nodal.bubble_ansatz import Bubble, solution_identity_check
        from yamabe_nodal.sphere_geometry import SphereConstants, SpherePoint

        original = SphereConstants.for_dimension

        def tampered(n):
            const = original(n)
            return dataclasses.replace(const, omega_n=const.omega_n * 1.01)

        monkeypatch.setattr(SphereConstants, "for_dimension", staticmethod(tampered))
        report = solution_identity_check(Bubble(3, SpherePoint.basis(3, 0), 1.5), zonal_rule)
        assert not report.ok


class TestNodalAnsatz:

    def test_sign_at_centers(self):
        """w_β is positive at p_j and negative at q_j, with equal size."""
        from yamabe_nodal.bubble_ansatz import NodalAnsatz, ansatz_value
        from yamabe_nodal.symmetry_group import ansatz_orbit

        orb = ansatz_orbit(3, 6)
        w = NodalAnsatz(n=3, beta=1.05, orbit=orb)
        at_p = ansatz_value(w, orb.plus_points[0])
        at_q = ansatz_value(w, orb.minus_points[0])
        assert at_p > 0
        assert at_q == pytest.approx(-at_p)

    def test_values_are_signed_sum(self):
        from yamabe_nodal.bubble_ansatz import NodalAnsatz
        from yamabe_nodal.symmetry_group import ansatz_orbit

        w = NodalAnsatz(n=4, beta=1.3, orbit=ansatz_orbit(4, 3))
        rng = np.random.default_rng(2)
        pts = rng.standard_normal((10, 5))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        total = sum(s * b.values(pts) for s, b in zip(w.signs, w.bubbles))
        assert np.allclose(w.values(pts), total)

    def test_gradient_is_signed_sum(self):
        from yamabe_nodal.bubble_ansatz import NodalAnsatz
        from yamabe_nodal.symmetry_group import ansatz_orbit

        w = NodalAnsatz(n=3, beta=1.3, orbit=ansatz_orbit(3, 4))
        rng = np.random.default_rng(4)
        pts = rng.standard_normal((10, 4))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        total = sum(s * b.gradients(pts) for s, b in zip(w.signs, w.bubbles))
        assert np.allclose(w.gradients(pts), total)

    def test_fixed_orbit_rejected(self):
        from yamabe_nodal.bubble_ansatz import NodalAnsatz
        from yamabe_nodal.errors import DimensionError
        from yamabe_nodal.sphere_geometry import SpherePoint
        from yamabe_nodal.symmetry_group import SignedOrbit

        p = SpherePoint.basis(4, 4)
        with pytest.raises(DimensionError):
            NodalAnsatz(n=4, beta=1.5, orbit=SignedOrbit(base=p, plus_points=(p,)))

    def test_gaps_keep_precision_next_to_a_center(self):
        """At distance 1e-9 from p_0 the gap is ½h², not the rounded 1 − cos h = 0."""
        from yamabe_nodal.bubble_ansatz import NodalAnsatz
        from yamabe_nodal.symmetry_group import ansatz_orbit

        orb = ansatz_orbit(3, 4)
        w = NodalAnsatz(n=3, beta=1.001, orbit=orb)
        h = 1e-9
        q = math.cos(h) * orb.plus_points[0].coords + math.sin(h) * orb.minus_points[0].coords
        gaps = w.gaps(q[None, :])
        assert gaps[0, 0] == pytest.approx(0.5 * h * h, rel=1e-6)
        assert np.allclose(w.values(q[None, :]), sum(
            s * b.values(q[None, :]) for s, b in zip(w.signs, w.bubbles)))
