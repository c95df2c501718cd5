import math

import numpy as np
import pytest

import corner_euler as ce
from corner_euler.conformal import _PowerStage

QUARTER = math.pi / 2


class TestForward:
    def test_identity_map(self, disk_map):
        ev = disk_map.forward(0.3 + 0.4j)
        assert ev.value == 0.3 + 0.4j
        assert ev.first_derivative == 1.0
        assert ev.second_derivative == 0.0

    def test_power_stage_doubles_argument(self):
        z = 0.3 * np.exp(1j * math.pi / 8)
        v, d1, d2 = _PowerStage(2.0).evaluate(z)
        expected = 0.09 * np.exp(1j * math.pi / 4)
        assert abs(v - expected) < 1e-14
        assert abs(d1 - 2.0 * z) < 1e-14

    def test_vertex_maps_to_boundary(self, sector_map):
        ev = sector_map.forward(0.0 + 0.0j)
        assert abs(abs(ev.value) - 1.0) < 1e-10

    def test_corner_derivatives_signaled(self, sector_map):
        ev = sector_map.forward(0.0 + 0.0j)
        assert ev.first_derivative == 0.0
        assert not np.isfinite(ev.second_derivative)

    def test_all_corner_images(self, sector_map):
        for c in sector_map.domain.corners:
            ev = sector_map.forward(c.vertex)
            assert ev.value == c.disk_image

    def test_interior_stays_interior(self, sector_map, half_disk_map):
        for cmap in (sector_map, half_disk_map):
            x = ce.sample_interior(cmap.domain, 500, 11)
            y = cmap.forward(x).value
            assert np.all(np.abs(y) < 1.0)

    def test_jacobian_structure(self, sector_map):
        ev = sector_map.forward(0.4 + 0.2j)
        J = ev.jacobian()
        c = ev.first_derivative
        assert J[0, 0] == pytest.approx(c.real)
        assert J[1, 0] == pytest.approx(c.imag)
        assert J[0, 1] == pytest.approx(-c.imag)


class TestInverse:
    def test_identity(self, disk_map):
        assert disk_map.inverse(0.2 - 0.7j) == 0.2 - 0.7j

    def test_roundtrip_sector(self, sector_map):
        x = ce.sample_interior(sector_map.domain, 1000, 5)
        y = sector_map.forward(x).value
        back = sector_map.inverse(y)
        assert np.max(np.abs(back - x)) < 1e-10

    def test_roundtrip_half_disk(self, half_disk_map):
        x = ce.sample_interior(half_disk_map.domain, 1000, 5)
        back = half_disk_map.inverse(half_disk_map.forward(x).value)
        assert np.max(np.abs(back - x)) < 1e-10

    def test_vertex_image_maps_back(self, sector_map):
        vertex_image = sector_map.domain.corners[0].disk_image
        assert abs(sector_map.inverse(vertex_image)) < 1e-8

    def test_outside_disk_rejected(self, sector_map):
        with pytest.raises(ValueError):
            sector_map.inverse(1.5 + 0.0j)

    def test_near_vertex_image_accurate(self, sector_map):
        # closed-form inversion must stay accurate where T' blows up
        for r in (1e-3, 1e-5, 1e-7):
            y = (1.0 - r) * sector_map.domain.corners[0].disk_image
            x = sector_map.inverse(y)
            ev = sector_map.forward(x)
            assert abs(ev.value - y) < 1e-11


class TestJacobianFactors:
    def test_identity_factors(self, disk_map):
        y = np.array([0.1 + 0.2j, -0.5j, 0.7 + 0.0j])
        np.testing.assert_allclose(disk_map.pushforward_factor(y), 1.0)
        np.testing.assert_allclose(disk_map.det_jacobian_inverse(y), 1.0)

    def test_reciprocal_consistency(self, sector_map):
        rng = np.random.default_rng(2)
        y = 0.8 * np.sqrt(rng.random(200)) * np.exp(
            2j * math.pi * rng.random(200))
        g = sector_map.pushforward_factor(y)
        det_inv = sector_map.det_jacobian_inverse(y)
        assert np.max(np.abs(g * det_inv - 1.0)) < 1e-10

    def test_chain_rule_consistency(self, sector_map):
        y = np.array([0.3 + 0.1j, -0.2 + 0.4j])
        d1 = sector_map.forward(sector_map.inverse(y)).first_derivative
        det_inv = sector_map.det_jacobian_inverse(y)
        assert np.max(np.abs(det_inv * np.abs(d1) ** 2 - 1.0)) < 1e-10

    def test_pushforward_zero_at_corner_image(self, sector_map):
        for c in sector_map.domain.corners:
            assert sector_map.pushforward_factor(c.disk_image) == 0.0

    def test_det_inverse_slope_near_vertex_image(self, sector_map):
        # det DT^{-1} ~ r^{2(theta/pi - 1)} = r^{-1} for theta = pi/2
        r = np.logspace(-2, -5, 10)
        y = (1.0 - r) * sector_map.domain.corners[0].disk_image
        vals = sector_map.det_jacobian_inverse(y)
        slope = np.polyfit(np.log(r), np.log(vals), 1)[0]
        assert slope == pytest.approx(-1.0, abs=0.05)

    def test_pushforward_slope_near_vertex_image(self, sector_map):
        # g(y) ~ r^{2 alpha} = r for the pi/2 vertex
        r = np.logspace(-2, -5, 10)
        y = (1.0 - r) * sector_map.domain.corners[0].disk_image
        vals = sector_map.pushforward_factor(y)
        slope = np.polyfit(np.log(r), np.log(vals), 1)[0]
        assert slope == pytest.approx(1.0, abs=0.05)


def test_map_for_domain_rejects_unknown():
    dom = ce.unit_disk()
    object.__setattr__(dom, "kind", "pentagon")
    with pytest.raises(ValueError):
        ce.map_for_domain(dom)
