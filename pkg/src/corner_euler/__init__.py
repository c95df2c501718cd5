"""Incompressible 2D Euler flow in corner domains via the unit-disk picture.

The library maps a simply connected planar domain with acute corners
conformally onto the unit disk, evaluates the disk Biot-Savart law with
image points in closed form, and integrates Lagrangian trajectories in
disk coordinates. A set of estimate checks certifies numerically the
bounds the construction relies on (kernel bounds, conformal exponents,
velocity bounds, log-Lipschitz regularity, uniqueness and boundary
non-attainment envelopes, W^{1,p} norm growth).
"""

from .biot_savart import (
    image_point,
    induced_velocity,
    kernel_difference,
    kernel_disk,
    velocity_disk,
    velocity_physical,
)
from .conformal import ConformalMap, MapEval, map_for_domain
from .domain import (
    Corner,
    DomainSpec,
    bounding_box,
    contains,
    contains_many,
    half_disk,
    nearest_corner,
    sample_interior,
    sector,
    unit_disk,
)
from .estimates import (
    FitReport,
    boundary_attainment_experiment,
    check_k3_integrals,
    check_kernel_bounds,
    check_map_exponents,
    check_velocity_bounds,
    check_w1p_growth,
    gronwall_experiment,
    interior_direction,
)
from .flow import (
    FlowConfig,
    StepSizeUnderflow,
    Trajectory,
    advect,
    boundary_margin,
    loglip_modulus,
    measure_check,
)
from .vorticity import (
    DiskVorticity,
    PatchSpec,
    from_physical_patch,
    single_vortex,
    total_circulation,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Corner", "DomainSpec", "unit_disk", "half_disk", "sector",
    "contains", "contains_many", "bounding_box", "sample_interior",
    "nearest_corner",
    "MapEval", "ConformalMap", "map_for_domain",
    "image_point", "kernel_disk", "kernel_difference", "induced_velocity",
    "velocity_disk", "velocity_physical",
    "PatchSpec", "DiskVorticity", "from_physical_patch", "single_vortex",
    "total_circulation",
    "FlowConfig", "Trajectory", "StepSizeUnderflow", "advect",
    "boundary_margin", "loglip_modulus", "measure_check",
    "FitReport", "check_kernel_bounds", "check_k3_integrals",
    "check_map_exponents", "check_velocity_bounds", "check_w1p_growth",
    "gronwall_experiment", "boundary_attainment_experiment",
    "interior_direction",
]
