"""Discrete vorticity carried on disk-coordinate particles.

A patch of constant physical vorticity is meshed by a uniform cell grid in
disk coordinates over the image of the patch; each cell center carries the
circulation of its physical preimage, omega0 * detDT^{-1}(z_c) * h^2. Total
circulation is therefore the physical circulation of the patch up to the
Riemann-sum error, and weights never change during advection -- only
positions do.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .conformal import ConformalMap
from .domain import contains, contains_many

__all__ = [
    "PatchSpec",
    "DiskVorticity",
    "from_physical_patch",
    "single_vortex",
    "total_circulation",
]

POINT_DATA = float("nan")  # sentinel sup norm for point-vortex fixtures


@dataclass(frozen=True)
class PatchSpec:
    """Constant-value vorticity patch in physical coordinates.

    kind 'circle': center, radius. kind 'rect': center, half-widths (hx, hy).
    The patch is intersected with the domain when meshed.
    """

    kind: str
    center: complex
    value: float
    radius: float = 0.0
    half_widths: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.kind not in ("circle", "rect"):
            raise ValueError(f"unknown patch kind {self.kind!r}")

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.complex128)
        if self.kind == "circle":
            return np.abs(x - self.center) <= self.radius
        hx, hy = self.half_widths
        return (np.abs(x.real - self.center.real) <= hx) & \
               (np.abs(x.imag - self.center.imag) <= hy)

    def boundary(self, n: int) -> np.ndarray:
        """n points tracing the patch boundary counterclockwise."""
        if self.kind == "circle":
            t = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
            return self.center + self.radius * np.exp(1j * t)
        hx, hy = self.half_widths
        t = np.linspace(0.0, 4.0, n, endpoint=False)
        seg = np.floor(t).astype(int)
        f = t - seg
        pts = np.empty(n, dtype=np.complex128)
        pts[seg == 0] = self.center + complex(-hx, -hy) + 2 * hx * f[seg == 0]
        pts[seg == 1] = self.center + complex(hx, -hy) + 2j * hy * f[seg == 1]
        pts[seg == 2] = self.center + complex(hx, hy) - 2 * hx * f[seg == 2]
        pts[seg == 3] = self.center + complex(-hx, hy) - 2j * hy * f[seg == 3]
        return pts


@dataclass
class DiskVorticity:
    """Particle positions in the disk, immutable circulation weights, metadata."""

    particles: np.ndarray
    weights: np.ndarray
    sup_norm_physical: float
    sigma: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.particles = np.asarray(self.particles, dtype=np.complex128)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.weights.setflags(write=False)
        if np.any(np.abs(self.particles) >= 1.0):
            raise ValueError("vorticity particles must lie strictly inside the disk")

    def with_positions(self, particles: np.ndarray) -> "DiskVorticity":
        return replace(self, particles=np.asarray(particles, dtype=np.complex128))


def from_physical_patch(cmap: ConformalMap, patch: PatchSpec,
                        resolution: int) -> DiskVorticity:
    """Mesh the disk image of a physical patch at `resolution` cells/unit length."""
    if resolution < 8:
        raise ValueError("resolution must be >= 8")
    domain = cmap.domain

    boundary = patch.boundary(2048)
    inside = contains_many(domain, boundary)
    if patch.kind == "circle" and not inside.all():
        # Patches must sit inside the domain; rect patches may be clipped.
        raise ValueError("circle patch is not contained in the domain")
    if not contains(domain, patch.center):
        raise ValueError("patch center is not inside the domain")

    disk_boundary = cmap.forward(boundary[inside]).value
    h = 1.0 / resolution
    pad = 2 * h
    xmin = max(disk_boundary.real.min() - pad, -1.0)
    xmax = min(disk_boundary.real.max() + pad, 1.0)
    ymin = max(disk_boundary.imag.min() - pad, -1.0)
    ymax = min(disk_boundary.imag.max() + pad, 1.0)

    nx = max(int(math.ceil((xmax - xmin) / h)), 1)
    ny = max(int(math.ceil((ymax - ymin) / h)), 1)
    gx = xmin + (np.arange(nx) + 0.5) * h
    gy = ymin + (np.arange(ny) + 0.5) * h
    zc = (gx[:, None] + 1j * gy[None, :]).ravel()
    zc = zc[np.abs(zc) < 1.0 - 1e-12]

    xc = cmap.inverse(zc)
    keep = patch.contains(xc) & contains_many(domain, xc)
    zc = zc[keep]
    if zc.size == 0:
        raise ValueError("patch mesh is empty; raise the resolution")

    det_inv = cmap.det_jacobian_inverse(zc)
    weights = patch.value * det_inv * h * h

    spacing = h
    sigma = 0.5 * spacing
    return DiskVorticity(
        particles=zc,
        weights=weights,
        sup_norm_physical=abs(patch.value),
        sigma=sigma,
        meta={"patch": patch, "resolution": resolution, "cell_size": h},
    )


def single_vortex(position: complex, circulation: float) -> DiskVorticity:
    """One point vortex in the disk; a desk-scale test fixture, not patch data."""
    position = complex(position)
    if abs(position) >= 1.0:
        raise ValueError("vortex position must be strictly inside the disk")
    return DiskVorticity(
        particles=np.array([position], dtype=np.complex128),
        weights=np.array([float(circulation)]),
        sup_norm_physical=POINT_DATA,
        sigma=0.0,
        meta={"fixture": "single_vortex"},
    )


def total_circulation(vort: DiskVorticity) -> float:
    return float(np.sum(vort.weights))
