import math

import numpy as np
import pytest

import corner_euler as ce


class TestPatchMeshing:
    def test_central_patch_circulation(self, disk_map):
        patch = ce.PatchSpec(kind="circle", center=0.0j, value=1.0, radius=0.2)
        vort = ce.from_physical_patch(disk_map, patch, 64)
        assert ce.total_circulation(vort) == pytest.approx(
            math.pi * 0.04, rel=0.02)

    def test_zero_value_zero_weights(self, disk_map):
        patch = ce.PatchSpec(kind="circle", center=0.0j, value=0.0, radius=0.2)
        vort = ce.from_physical_patch(disk_map, patch, 32)
        assert np.all(vort.weights == 0.0)

    def test_resolution_doubling_consistency(self, disk_map):
        patch = ce.PatchSpec(kind="circle", center=0.1 + 0.1j, value=2.0,
                             radius=0.25)
        c1 = ce.total_circulation(ce.from_physical_patch(disk_map, patch, 32))
        c2 = ce.total_circulation(ce.from_physical_patch(disk_map, patch, 64))
        assert abs(c2 - c1) / abs(c2) < 4.0 / 32

    def test_sector_patch_matches_physical_circulation(self, sector_map,
                                                       sector_patch):
        # change of variables: sum of weights = omega0 * physical patch area
        exact = math.pi * 0.18 ** 2
        assert ce.total_circulation(sector_patch) == pytest.approx(
            exact, rel=0.02)

    def test_circle_patch_must_fit_domain(self, sector_map):
        patch = ce.PatchSpec(kind="circle", center=0.1 + 0.1j, value=1.0,
                             radius=0.5)
        with pytest.raises(ValueError):
            ce.from_physical_patch(sector_map, patch, 16)

    def test_rect_patch_clipped_to_domain(self, sector_map):
        patch = ce.PatchSpec(kind="rect", center=0.3 + 0.3j, value=1.0,
                             half_widths=(0.4, 0.4))
        vort = ce.from_physical_patch(sector_map, patch, 24)
        x = sector_map.inverse(vort.particles)
        assert np.all(ce.contains_many(sector_map.domain, x))

    def test_resolution_floor(self, disk_map):
        patch = ce.PatchSpec(kind="circle", center=0.0j, value=1.0, radius=0.2)
        with pytest.raises(ValueError):
            ce.from_physical_patch(disk_map, patch, 4)

    def test_additivity_of_disjoint_patches(self, disk_map):
        p1 = ce.PatchSpec(kind="circle", center=0.4 + 0.0j, value=1.0,
                          radius=0.15)
        p2 = ce.PatchSpec(kind="circle", center=-0.4 + 0.0j, value=-2.0,
                          radius=0.15)
        c1 = ce.total_circulation(ce.from_physical_patch(disk_map, p1, 32))
        c2 = ce.total_circulation(ce.from_physical_patch(disk_map, p2, 32))
        both = c1 + c2
        assert both == pytest.approx(
            math.pi * 0.15 ** 2 * (1.0 - 2.0), rel=0.05)

    def test_blob_scale_tracks_cell_size(self, disk_map):
        patch = ce.PatchSpec(kind="circle", center=0.0j, value=1.0, radius=0.2)
        vort = ce.from_physical_patch(disk_map, patch, 32)
        assert vort.sigma == pytest.approx(0.5 / 32)


class TestSingleVortex:
    def test_unit_vortex_at_origin(self):
        vort = ce.single_vortex(0.0j, 1.0)
        assert len(vort.particles) == 1
        assert vort.particles[0] == 0.0
        assert vort.weights[0] == 1.0

    def test_negative_circulation(self):
        vort = ce.single_vortex(0.5 + 0.0j, -2.0)
        assert vort.weights[0] == -2.0
        assert ce.total_circulation(vort) == -2.0

    def test_position_inside_disk(self):
        with pytest.raises(ValueError):
            ce.single_vortex(1.0 + 0.0j, 1.0)

    def test_sup_norm_is_sentinel(self):
        assert math.isnan(ce.single_vortex(0.0j, 1.0).sup_norm_physical)


class TestWeightImmutability:
    def test_weights_read_only(self, sector_patch):
        with pytest.raises(ValueError):
            sector_patch.weights[0] = 5.0

    def test_circulation_preserved_by_advection(self, sector_map,
                                                sector_patch):
        cfg = ce.FlowConfig(dt=5e-3, t_end=0.02)
        before = ce.total_circulation(sector_patch)
        _, final = ce.advect(sector_map, sector_patch, [], cfg)
        assert ce.total_circulation(final) == before
        np.testing.assert_array_equal(final.weights, sector_patch.weights)
