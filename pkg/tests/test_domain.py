import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import corner_euler as ce

QUARTER = math.pi / 2


class TestContains:
    def test_disk_interior_point(self):
        assert ce.contains(ce.unit_disk(), 0.3 + 0.4j)

    def test_sector_negative_angle_outside(self):
        assert not ce.contains(ce.sector(QUARTER), 0.5 - 0.1j)

    def test_half_disk_near_top(self):
        assert ce.contains(ce.half_disk(), 0.0 + 0.999j)

    def test_boundary_excluded(self):
        assert not ce.contains(ce.unit_disk(), 1.0 + 0.0j)
        assert not ce.contains(ce.half_disk(), 0.5 + 0.0j)
        assert not ce.contains(ce.sector(QUARTER), 0.0 + 0.0j)

    @given(st.complex_numbers(max_magnitude=2.0, allow_nan=False,
                              allow_infinity=False))
    def test_vectorized_matches_scalar(self, x):
        for dom in (ce.unit_disk(), ce.half_disk(), ce.sector(QUARTER),
                    ce.sector(math.pi / 3)):
            assert ce.contains(dom, x) == bool(
                ce.contains_many(dom, np.array([x]))[0])


class TestSampleInterior:
    def test_disk_count_and_membership(self):
        pts = ce.sample_interior(ce.unit_disk(), 100, 7)
        assert len(pts) == 100
        assert np.all(np.abs(pts) < 1.0)

    def test_sector_angles(self):
        dom = ce.sector(math.pi / 4)
        pts = ce.sample_interior(dom, 50, 7)
        assert len(pts) == 50
        ang = np.angle(pts)
        assert np.all((ang > 0.0) & (ang < math.pi / 4))

    def test_deterministic_in_seed(self):
        a = ce.sample_interior(ce.half_disk(), 64, 3)
        b = ce.sample_interior(ce.half_disk(), 64, 3)
        np.testing.assert_array_equal(a, b)

    def test_rejects_nonpositive_n(self):
        with pytest.raises(ValueError):
            ce.sample_interior(ce.unit_disk(), 0, 1)


class TestNearestCorner:
    def test_sector_vertex(self):
        corner, d = ce.nearest_corner(ce.sector(QUARTER), 0.1 + 0.05j)
        assert corner.vertex == 0.0
        assert d == pytest.approx(math.sqrt(0.01 + 0.0025), rel=1e-12)

    def test_half_disk_right_corner(self):
        corner, d = ce.nearest_corner(ce.half_disk(), 0.9 + 0.1j)
        assert corner.vertex == 1.0
        assert d == pytest.approx(math.sqrt(0.01 + 0.01), rel=1e-12)

    def test_tie_prefers_first_listed(self):
        # equidistant from (1,0) and (-1,0)
        corner, _ = ce.nearest_corner(ce.half_disk(), 0.0 + 0.5j)
        assert corner.vertex == 1.0

    def test_disk_has_no_corners(self):
        with pytest.raises(ValueError):
            ce.nearest_corner(ce.unit_disk(), 0.0j)


class TestCornerInvariants:
    @given(st.floats(min_value=1e-6, max_value=QUARTER))
    def test_alpha_identity(self, theta):
        c = ce.Corner(vertex=0.0j, theta=theta, disk_image=1.0 + 0.0j)
        assert c.alpha == 1.0 - theta / math.pi
        assert 0.5 <= c.alpha < 1.0

    def test_obtuse_angle_rejected(self):
        with pytest.raises(ValueError):
            ce.Corner(vertex=0.0j, theta=2.0, disk_image=1.0 + 0.0j)

    def test_disk_image_on_circle(self):
        with pytest.raises(ValueError):
            ce.Corner(vertex=0.0j, theta=1.0, disk_image=0.5 + 0.0j)

    def test_delta_upper_bound_enforced(self):
        with pytest.raises(ValueError):
            ce.half_disk(delta=1.0)

    def test_sector_angle_range(self):
        with pytest.raises(ValueError):
            ce.sector(2.0)


def test_bounding_box_contains_samples():
    for dom in (ce.unit_disk(), ce.half_disk(), ce.sector(math.pi / 3)):
        xmin, xmax, ymin, ymax = ce.bounding_box(dom)
        pts = ce.sample_interior(dom, 200, 0)
        assert np.all((pts.real >= xmin) & (pts.real <= xmax))
        assert np.all((pts.imag >= ymin) & (pts.imag <= ymax))
