"""Tests for points, distances, volumes and the stereographic chart."""

import math

import numpy as np
import pytest


# ═══════════════════════════════════════════════════════════════
# Points and constants
# ═══════════════════════════════════════════════════════════════

class TestSpherePoint:
    """Construction and validation of points."""

    def test_coordinates_are_normalized(self):
        """Any nonzero vector is scaled onto the unit sphere."""
        from yamabe_nodal.sphere_geometry import SpherePoint

        p = SpherePoint(np.array([3.0, 4.0, 0.0, 0.0]))
        assert np.linalg.norm(p.coords) == pytest.approx(1.0)
        assert p.n == 3

    def test_low_dimension_rejected(self):
        """S² and below are out of range."""
        from yamabe_nodal.errors import DimensionError
        from yamabe_nodal.sphere_geometry import SpherePoint

        with pytest.raises(DimensionError):
            SpherePoint(np.array([1.0, 0.0, 0.0]))

    def test_zero_vector_rejected(self):
        from yamabe_nodal.errors import DimensionError
        from yamabe_nodal.sphere_geometry import SpherePoint

        with pytest.raises(DimensionError):
            SpherePoint(np.zeros(5))

    def test_from_complex_layout(self):
        """(z₁, z₂, x) flattens to (Re z₁, Im z₁, Re z₂, Im z₂, x)."""
        from yamabe_nodal.sphere_geometry import SpherePoint

        p = SpherePoint.from_complex(1j, 0j, [0.0])
        assert p.coords.tolist() == [0.0, 1.0, 0.0, 0.0, 0.0]

    def test_coords_are_read_only(self):
        from yamabe_nodal.sphere_geometry import SpherePoint

        p = SpherePoint.basis(3, 0)
        with pytest.raises(ValueError):
            p.coords[0] = 2.0


class TestConstants:
    """Dimension constants and sphere volumes."""

    def test_low_dimensional_volumes(self):
        from yamabe_nodal.sphere_geometry import sphere_volume

        assert sphere_volume(1) == pytest.approx(2 * math.pi)
        assert sphere_volume(2) == pytest.approx(4 * math.pi)
        assert sphere_volume(3) == pytest.approx(2 * math.pi**2)

    @pytest.mark.parametrize("k", range(1, 12))
    def test_closed_form_matches_slicing_recursion(self, k):
        """Gamma-function volume agrees with the Wallis recursion."""
        from yamabe_nodal.sphere_geometry import sphere_volume, sphere_volume_recursive

        assert sphere_volume(k) == pytest.approx(sphere_volume_recursive(k), rel=1e-12)

    def test_zero_sphere_measure(self):
        from yamabe_nodal.sphere_geometry import sphere_measure

        assert sphere_measure(0) == 2.0

    def test_constants_for_n3(self):
        from yamabe_nodal.sphere_geometry import SphereConstants

        c = SphereConstants.for_dimension(3)
        assert c.a_n == pytest.approx(0.75)
        assert c.two_star == pytest.approx(6.0)
        assert c.c_n == pytest.approx(0.25 * 2 * math.pi**2)
        assert c.omega_nm1 == pytest.approx(4 * math.pi)

    def test_constants_need_n_at_least_3(self):
        from yamabe_nodal.errors import DimensionError
        from yamabe_nodal.sphere_geometry import SphereConstants

        with pytest.raises(DimensionError):
            SphereConstants.for_dimension(2)


# ═══════════════════════════════════════════════════════════════
# Distances
# ═══════════════════════════════════════════════════════════════

class TestDistances:
    """Chord, gap and geodesic distance."""

    def test_orthogonal_points(self):
        from yamabe_nodal.sphere_geometry import (
            SpherePoint,
            chordal_gap,
            geodesic_distance,
        )

        p, q = SpherePoint.basis(4, 0), SpherePoint.basis(4, 2)
        assert geodesic_distance(p, q) == pytest.approx(math.pi / 2)
        assert chordal_gap(p, q) == pytest.approx(1.0)

    def test_antipodal_and_identical(self):
        from yamabe_nodal.sphere_geometry import SpherePoint, geodesic_distance

        p = SpherePoint.basis(3, 1)
        assert geodesic_distance(p, SpherePoint(-p.coords)) == pytest.approx(math.pi)
        assert geodesic_distance(p, p) == 0.0

    def test_small_angle_precision(self):
        """Nearby points keep full relative precision."""
        from yamabe_nodal.sphere_geometry import SpherePoint, geodesic_distance

        angle = 1e-9
        p = SpherePoint.basis(3, 0)
        q = SpherePoint(np.array([math.cos(angle), math.sin(angle), 0.0, 0.0]))
        assert geodesic_distance(p, q) == pytest.approx(angle, rel=1e-6)

    def test_gap_is_one_minus_cosine(self):
        from yamabe_nodal.sphere_geometry import SpherePoint, chordal_gap

        angle = 0.7
        p = SpherePoint.basis(3, 0)
        q = SpherePoint(np.array([math.cos(angle), 0.0, math.sin(angle), 0.0]))
        assert chordal_gap(p, q) == pytest.approx(1 - math.cos(angle))

    def test_dimension_mismatch(self):
        from yamabe_nodal.errors import DimensionError
        from yamabe_nodal.sphere_geometry import SpherePoint, chord_length

        with pytest.raises(DimensionError):
            chord_length(SpherePoint.basis(3, 0), SpherePoint.basis(4, 0))


# ═══════════════════════════════════════════════════════════════
# Stereographic chart
# ═══════════════════════════════════════════════════════════════

class TestStereographic:
    """Projection from a pole and its inverse."""

    def test_round_trip(self):
        from yamabe_nodal.sphere_geometry import (
            SpherePoint,
            stereographic_forward,
            stereographic_inverse,
        )

        pole = SpherePoint.basis(4, 0)
        rng = np.random.default_rng(3)
        for v in rng.standard_normal((20, 5)):
            q = SpherePoint(v)
            back = stereographic_inverse(pole, stereographic_forward(pole, q))
            assert back.is_close(q, tol=1e-9)

    def test_radius_is_cot_half_distance(self):
        from yamabe_nodal.sphere_geometry import (
            SpherePoint,
            geodesic_distance,
            stereographic_forward,
        )

        pole = SpherePoint.basis(3, 0)
        q = SpherePoint(np.array([0.2, 0.5, -0.3, 0.6]))
        r = geodesic_distance(pole, q)
        x = stereographic_forward(pole, q)
        assert np.linalg.norm(x) == pytest.approx(1.0 / math.tan(r / 2))

    def test_antipode_maps_to_origin(self):
        from yamabe_nodal.sphere_geometry import SpherePoint, stereographic_forward

        pole = SpherePoint.basis(3, 2)
        x = stereographic_forward(pole, SpherePoint(-pole.coords))
        assert np.allclose(x, 0.0)

    def test_pole_is_singular(self):
        from yamabe_nodal.errors import SingularityError
        from yamabe_nodal.sphere_geometry import SpherePoint, stereographic_forward

        pole = SpherePoint.basis(3, 0)
        with pytest.raises(SingularityError):
            stereographic_forward(pole, pole)

    def test_conformal_factor_and_volume_element(self):
        """At the origin the pullback metric is 4ḡ, so the density is 2ⁿ."""
        from yamabe_nodal.sphere_geometry import chart_volume_element, conformal_factor

        assert conformal_factor(np.zeros(3)) == pytest.approx(4.0)
        assert chart_volume_element(np.zeros(3)) == pytest.approx(8.0)
        assert chart_volume_element(np.zeros(5)) == pytest.approx(
            conformal_factor(np.zeros(5)) ** 2.5)

    def test_inverse_rejects_wrong_length(self):
        from yamabe_nodal.errors import DimensionError
        from yamabe_nodal.sphere_geometry import SpherePoint, stereographic_inverse

        with pytest.raises(DimensionError):
            stereographic_inverse(SpherePoint.basis(3, 0), np.zeros(4))
