"""Model domains with acute corners: membership tests and interior sampling.

Three closed-form domains are supported:

* ``unit_disk`` -- the unit disk itself (no corners),
* ``half_disk`` -- the open upper half of the unit disk, with right-angle
  corners at (-1, 0) and (1, 0),
* ``sector(theta0)`` -- the circular sector {r e^{i phi} : 0 < r < 1,
  0 < phi < theta0} with vertex angle theta0 <= pi/2 at the origin and two
  right-angle corners where the straight edges meet the unit-circle arc.

All geometry here is analytic (radius/angle tests); the conformal map is
never consulted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Corner",
    "DomainSpec",
    "unit_disk",
    "half_disk",
    "sector",
    "contains",
    "sample_interior",
    "nearest_corner",
]


@dataclass(frozen=True)
class Corner:
    """A boundary corner: vertex, interior angle and its image on the circle."""

    vertex: complex
    theta: float
    disk_image: complex
    alpha: float = field(init=False)

    def __post_init__(self):
        if not 0.0 < self.theta <= math.pi / 2 + 1e-15:
            raise ValueError(f"corner angle must lie in (0, pi/2], got {self.theta}")
        if abs(abs(self.disk_image) - 1.0) > 1e-12:
            raise ValueError("corner disk image must lie on the unit circle")
        object.__setattr__(self, "alpha", 1.0 - self.theta / math.pi)


@dataclass(frozen=True)
class DomainSpec:
    """Descriptor of one model domain.

    ``delta`` is the corner-neighborhood radius used by the derivative
    estimates; it must stay below one third of the smallest pairwise
    distance between corner vertices and between their disk images.
    """

    kind: str
    theta0: float | None = None
    corners: tuple[Corner, ...] = ()
    delta: float = 0.0

    def __post_init__(self):
        if self.kind not in ("unit_disk", "half_disk", "sector"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.kind == "sector":
            if self.theta0 is None or not 0.0 < self.theta0 <= math.pi / 2 + 1e-15:
                raise ValueError("sector vertex angle theta0 must lie in (0, pi/2]")
        if self.corners:
            dmin = _min_pairwise_distance(self.corners)
            if not 0.0 < self.delta < dmin / 3.0:
                raise ValueError(
                    f"delta must lie in (0, {dmin / 3.0:.6g}) for this corner layout"
                )


def _min_pairwise_distance(corners: tuple[Corner, ...]) -> float:
    dmin = math.inf
    n = len(corners)
    for i in range(n):
        for j in range(i + 1, n):
            dmin = min(dmin, abs(corners[i].vertex - corners[j].vertex))
            dmin = min(dmin, abs(corners[i].disk_image - corners[j].disk_image))
    return dmin


def unit_disk() -> DomainSpec:
    return DomainSpec(kind="unit_disk")


def half_disk(delta: float | None = None) -> DomainSpec:
    # Disk images come from the closed-form map (Joukowski then Mobius):
    # 1 -> i and -1 -> -i.
    corners = (
        Corner(vertex=1.0 + 0.0j, theta=math.pi / 2, disk_image=1j),
        Corner(vertex=-1.0 + 0.0j, theta=math.pi / 2, disk_image=-1j),
    )
    if delta is None:
        delta = 0.2 * _min_pairwise_distance(corners)
    return DomainSpec(kind="half_disk", corners=corners, delta=delta)


def sector(theta0: float, delta: float | None = None) -> DomainSpec:
    """Circular sector with vertex at the origin and one edge on the real axis."""
    corners = (
        Corner(vertex=0.0j, theta=theta0, disk_image=1.0 + 0.0j),
        Corner(vertex=1.0 + 0.0j, theta=math.pi / 2, disk_image=1j),
        Corner(vertex=complex(math.cos(theta0), math.sin(theta0)),
               theta=math.pi / 2, disk_image=-1j),
    )
    if delta is None:
        delta = 0.2 * _min_pairwise_distance(corners)
    return DomainSpec(kind="sector", theta0=theta0, corners=corners, delta=delta)


def contains(domain: DomainSpec, x: complex) -> bool:
    """True iff ``x`` is strictly interior to the domain."""
    x = complex(x)
    r = abs(x)
    if domain.kind == "unit_disk":
        return r < 1.0
    if domain.kind == "half_disk":
        return r < 1.0 and x.imag > 0.0
    # sector
    if r <= 0.0 or r >= 1.0:
        return False
    phi = math.atan2(x.imag, x.real)
    return 0.0 < phi < domain.theta0


def contains_many(domain: DomainSpec, x: np.ndarray) -> np.ndarray:
    """Vectorized membership test for an array of complex points."""
    r = np.abs(x)
    if domain.kind == "unit_disk":
        return r < 1.0
    if domain.kind == "half_disk":
        return (r < 1.0) & (x.imag > 0.0)
    phi = np.angle(x)
    return (r > 0.0) & (r < 1.0) & (phi > 0.0) & (phi < domain.theta0)


def bounding_box(domain: DomainSpec) -> tuple[float, float, float, float]:
    """(xmin, xmax, ymin, ymax) of a box containing the domain."""
    if domain.kind == "unit_disk":
        return -1.0, 1.0, -1.0, 1.0
    if domain.kind == "half_disk":
        return -1.0, 1.0, 0.0, 1.0
    t0 = domain.theta0
    xmax = 1.0
    xmin = min(0.0, math.cos(t0))
    ymax = math.sin(t0) if t0 < math.pi / 2 else 1.0
    return xmin, xmax, 0.0, ymax


def sample_interior(domain: DomainSpec, n: int, seed: int) -> np.ndarray:
    """``n`` interior points, deterministic in ``seed``, by box rejection."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    xmin, xmax, ymin, ymax = bounding_box(domain)
    out = np.empty(n, dtype=np.complex128)
    filled = 0
    drawn = 0
    while filled < n:
        batch = max(2 * (n - filled), 256)
        pts = (xmin + (xmax - xmin) * rng.random(batch)
               + 1j * (ymin + (ymax - ymin) * rng.random(batch)))
        keep = pts[contains_many(domain, pts)]
        take = min(len(keep), n - filled)
        out[filled:filled + take] = keep[:take]
        filled += take
        drawn += batch
        if drawn > 100 * n + 10000 and filled < 0.01 * drawn:
            raise RuntimeError("interior sampling acceptance rate below 1%")
    return out


def nearest_corner(domain: DomainSpec, x: complex) -> tuple[Corner, float]:
    """Corner minimizing the distance to ``x``; ties favor the earlier corner."""
    if not domain.corners:
        raise ValueError(f"domain kind {domain.kind!r} has no corners")
    x = complex(x)
    best = None
    best_d = math.inf
    for c in domain.corners:
        d = abs(x - c.vertex)
        if d < best_d:
            best, best_d = c, d
    return best, best_d
