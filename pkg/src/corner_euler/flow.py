"""Lagrangian integration in disk coordinates under the pushed field.

Trajectories are integrated for the disk positions Y(t) only; the physical
positions X(t) = T^{-1}(Y(t)) are derived outputs. The pushed field is
log-Lipschitz, so the disk ODE is well posed even though the physical field
is not Lipschitz near corners. Classical RK4 with reject-and-halve whenever
a stage or step would leave the closed disk; the adaptive mode rescales the
step from a step-doubling error estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .biot_savart import induced_velocity
from .conformal import ConformalMap
from .vorticity import DiskVorticity, total_circulation

__all__ = [
    "FlowConfig",
    "Trajectory",
    "advect",
    "boundary_margin",
    "loglip_modulus",
    "measure_check",
]


@dataclass(frozen=True)
class FlowConfig:
    dt: float = 1e-3
    t_end: float = 1.0
    stepper: str = "rk4"          # "rk4" | "adaptive"
    tolerance: float = 1e-8      # local error target, adaptive mode
    record_every: int = 100       # output stride in base steps

    def __post_init__(self):
        if self.dt <= 0 or self.t_end <= 0 or self.tolerance <= 0:
            raise ValueError("dt, t_end and tolerance must be positive")
        if self.stepper not in ("rk4", "adaptive"):
            raise ValueError(f"unknown stepper {self.stepper!r}")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")


@dataclass
class Trajectory:
    """Recorded time series: disk positions and derived physical positions.

    positions has shape (n_times, n_entities); kinds marks each entity as
    'particle' or 'tracer'.
    """

    times: np.ndarray
    disk_positions: np.ndarray
    physical_positions: np.ndarray
    kinds: list = field(default_factory=list)


class StepSizeUnderflow(RuntimeError):
    pass


def loglip_modulus(r):
    """h(r) = r (1 + |ln r|), with h(0) = 0 by continuity."""
    r = np.asarray(r, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(r > 0.0, r * (1.0 + np.abs(np.log(np.where(r > 0, r, 1.0)))), 0.0)
    if out.ndim == 0:
        return float(out)
    return out


def _rhs(cmap: ConformalMap, positions: np.ndarray, weights: np.ndarray,
         sigma: float, n_particles: int) -> np.ndarray:
    """Pushed-field velocity at every tracked position.

    The first n_particles entries are the vorticity carriers; the kernel sum
    drops each particle's own free-space term (see biot_savart).
    """
    ks = induced_velocity(positions, positions[:n_particles], weights, sigma=sigma)
    g = cmap.pushforward_factor(positions)
    return g * ks


def _rk4_stage(cmap, y, w, sigma, npart, h):
    k1 = _rhs(cmap, y, w, sigma, npart)
    k2 = _rhs(cmap, y + 0.5 * h * k1, w, sigma, npart)
    k3 = _rhs(cmap, y + 0.5 * h * k2, w, sigma, npart)
    k4 = _rhs(cmap, y + h * k3, w, sigma, npart)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _step_with_rejection(cmap, y, w, sigma, npart, h_base, min_dt=1e-12):
    """Advance one base step; overshoots past the boundary halve the substep."""
    remaining = h_base
    h = h_base
    while remaining > 1e-15 * h_base:
        h = min(h, remaining)
        try:
            y_new = _rk4_stage(cmap, y, w, sigma, npart, h)
        except ValueError:
            # an intermediate stage left the closed disk
            y_new = None
        if y_new is None:
            r = np.full(len(y), 2.0)
        else:
            r = np.abs(y_new)
        if np.all(r < 1.0):
            y = y_new
            remaining -= h
            h = min(2.0 * h, h_base)
        else:
            h *= 0.5
            if h < min_dt:
                bad = int(np.argmax(r))
                raise StepSizeUnderflow(
                    f"step size underflow near the boundary for entity {bad} "
                    f"at |Y| = {r[bad]:.6f}")
    return y


def _adaptive_step(cmap, y, w, sigma, npart, h, tol, min_dt=1e-12):
    """One accepted step of size <= h via step doubling; returns (y, h_used, h_next)."""
    while True:
        try:
            full = _rk4_stage(cmap, y, w, sigma, npart, h)
            half = _rk4_stage(cmap, y, w, sigma, npart, 0.5 * h)
            half = _rk4_stage(cmap, half, w, sigma, npart, 0.5 * h)
            err = float(np.max(np.abs(full - half)))
            inside = np.all(np.abs(half) < 1.0)
        except ValueError:
            err = math.inf
            inside = False
        if err <= tol and inside:
            scale = 2.0 if err == 0.0 else min(2.0, 0.9 * (tol / err) ** 0.2)
            return half, h, h * scale
        h *= 0.5 if not inside else max(0.3, 0.9 * (tol / err) ** 0.2)
        if h < min_dt:
            raise StepSizeUnderflow("adaptive step size underflow")


def advect(cmap: ConformalMap, vort: DiskVorticity, tracers,
           cfg: FlowConfig) -> tuple[Trajectory, DiskVorticity]:
    """Advance particles and passive tracers self-consistently to t_end."""
    tracers = np.asarray(tracers, dtype=np.complex128).ravel()
    if np.any(np.abs(tracers) >= 1.0):
        raise ValueError("tracers must start strictly inside the disk")
    npart = len(vort.particles)
    y = np.concatenate([vort.particles, tracers])
    w = vort.weights
    sigma = vort.sigma

    n_steps = int(round(cfg.t_end / cfg.dt))
    times = [0.0]
    records = [y.copy()]

    if cfg.stepper == "rk4":
        t = 0.0
        for k in range(n_steps):
            y = _step_with_rejection(cmap, y, w, sigma, npart, cfg.dt)
            t = (k + 1) * cfg.dt
            if (k + 1) % cfg.record_every == 0 or k == n_steps - 1:
                times.append(t)
                records.append(y.copy())
    else:
        t = 0.0
        h = cfg.dt
        record_interval = cfg.record_every * cfg.dt
        next_record = record_interval
        while t < cfg.t_end - 1e-15:
            h = min(h, cfg.t_end - t)
            y, used, h = _adaptive_step(cmap, y, w, sigma, npart, h, cfg.tolerance)
            t += used
            if t >= next_record - 1e-12 or t >= cfg.t_end - 1e-15:
                times.append(t)
                records.append(y.copy())
                next_record += record_interval

    times = np.asarray(times)
    disk_positions = np.asarray(records)
    physical_positions = np.empty_like(disk_positions)
    for i in range(len(times)):
        physical_positions[i] = cmap.inverse(disk_positions[i])

    kinds = ["particle"] * npart + ["tracer"] * len(tracers)
    traj = Trajectory(times=times, disk_positions=disk_positions,
                      physical_positions=physical_positions, kinds=kinds)
    final = vort.with_positions(y[:npart])
    assert total_circulation(final) == total_circulation(vort)
    return traj, final


def boundary_margin(traj: Trajectory) -> float:
    """Smallest recorded distance 1 - |Y(t)| to the disk boundary."""
    if traj.times.size == 0:
        raise ValueError("empty trajectory")
    return float(np.min(1.0 - np.abs(traj.disk_positions)))


def _polygon_area(pts: np.ndarray) -> float:
    """Shoelace area of the closed polygon through complex points."""
    x, ynext = pts, np.roll(pts, -1)
    return 0.5 * abs(float(np.sum(x.real * ynext.imag - ynext.real * x.imag)))


def measure_check(cmap: ConformalMap, vort: DiskVorticity, region,
                  n_mc: int, cfg: FlowConfig, n_boundary: int = 2048,
                  seed: int = 0) -> float:
    """Relative physical-area drift of an advected material region.

    The region boundary (a physical patch descriptor) is advected in disk
    coordinates alongside the vorticity particles, mapped back through the
    inverse map, and the enclosed physical area at t = 0 and t_end is
    estimated by Monte Carlo point-in-polygon sampling with n_mc points.
    """
    if n_mc < 1000:
        raise ValueError("n_mc must be >= 1000 for a meaningful estimate")
    from matplotlib.path import Path

    boundary_phys = region.boundary(n_boundary)
    boundary_disk = cmap.forward(boundary_phys).value
    if np.any(np.abs(boundary_disk) >= 1.0):
        raise ValueError("region must map strictly inside the disk")

    traj, _ = advect(cmap, vort, boundary_disk, cfg)

    def mc_area(poly: np.ndarray) -> float:
        # fresh generator per call: identical polygons give identical areas
        rng = np.random.default_rng(seed)
        xmin, xmax = poly.real.min(), poly.real.max()
        ymin, ymax = poly.imag.min(), poly.imag.max()
        xs = xmin + (xmax - xmin) * rng.random(n_mc)
        ys = ymin + (ymax - ymin) * rng.random(n_mc)
        path = Path(np.column_stack([poly.real, poly.imag]), closed=True)
        hits = path.contains_points(np.column_stack([xs, ys]))
        return (xmax - xmin) * (ymax - ymin) * float(np.mean(hits))

    npart = len(vort.particles)
    a0 = mc_area(traj.physical_positions[0, npart:])
    a1 = mc_area(traj.physical_positions[-1, npart:])
    return abs(a1 - a0) / a0
