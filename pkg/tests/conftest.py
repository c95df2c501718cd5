import math

import numpy as np
import pytest

import corner_euler as ce

QUARTER = math.pi / 2


@pytest.fixture(scope="session")
def disk_map():
    return ce.map_for_domain(ce.unit_disk())


@pytest.fixture(scope="session")
def half_disk_map():
    return ce.map_for_domain(ce.half_disk())


@pytest.fixture(scope="session")
def sector_map():
    return ce.map_for_domain(ce.sector(QUARTER))


@pytest.fixture(scope="session")
def sector_patch(sector_map):
    """Small constant patch in the quarter sector, ~280 particles."""
    patch = ce.PatchSpec(kind="circle", center=0.45 + 0.45j, value=1.0,
                         radius=0.18)
    return ce.from_physical_patch(sector_map, patch, 24)


@pytest.fixture(scope="session")
def central_patch(disk_map):
    """Radial patch at the disk center on the identity map."""
    patch = ce.PatchSpec(kind="circle", center=0.0 + 0.0j, value=1.0,
                         radius=0.3)
    return ce.from_physical_patch(disk_map, patch, 48)


def random_disk_points(rng, n, rmax=1.0):
    r = rmax * np.sqrt(rng.random(n))
    return r * np.exp(2j * math.pi * rng.random(n))
