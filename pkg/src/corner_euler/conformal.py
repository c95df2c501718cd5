"""Closed-form Riemann maps onto the unit disk for the model domains.

Each map is a composition of elementary holomorphic stages:

* power map ``z -> z**p`` opening a corner of angle ``theta`` to angle
  ``p * theta`` (used with ``p = pi/theta0`` to flatten the sector vertex),
* Joukowski-type stage ``z -> -(z + 1/z)/2`` taking the upper half disk to
  the upper half plane,
* Mobius stage ``w -> (w - i)/(w + i)`` taking the upper half plane to the
  unit disk.

Values, first and second derivatives are composed analytically through the
chain rule; no finite differences anywhere. Every stage has a closed-form
inverse with the principal branch, so the full inverse is closed-form plus
a short Newton polish against roundoff accumulated through the stages.

All evaluation functions accept scalars or numpy complex arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import Corner, DomainSpec

__all__ = ["MapEval", "ConformalMap", "map_for_domain"]

_CORNER_SNAP = 1e-13      # distance below which a point is treated as a corner
_NEWTON_TOL = 1e-12
_NEWTON_MAX_ITER = 5


@dataclass(frozen=True)
class MapEval:
    """Value and complex derivatives of the map at one point (or array)."""

    value: complex | np.ndarray
    first_derivative: complex | np.ndarray
    second_derivative: complex | np.ndarray

    def jacobian(self) -> np.ndarray:
        """The 2x2 real Jacobian a+bi -> [[a, -b], [b, a]] of the value's derivative."""
        c = self.first_derivative
        return np.array([[np.real(c), -np.imag(c)], [np.imag(c), np.real(c)]])


class _PowerStage:
    """z -> z**p on a sector avoiding the principal branch cut."""

    def __init__(self, p: float):
        self.p = p

    def evaluate(self, z):
        p = self.p
        v = np.power(z, p)
        d1 = p * np.power(z, p - 1.0)
        d2 = p * (p - 1.0) * np.power(z, p - 2.0)
        return v, d1, d2

    def invert(self, w):
        return np.power(w, 1.0 / self.p)


class _JoukowskiStage:
    """z -> -(z + 1/z)/2, upper half disk to upper half plane."""

    def evaluate(self, z):
        inv = 1.0 / z
        v = -0.5 * (z + inv)
        d1 = -0.5 * (1.0 - inv * inv)
        d2 = -inv * inv * inv
        return v, d1, d2

    def invert(self, w):
        # Roots of z^2 + 2wz + 1 = 0 multiply to 1. Build the larger-modulus
        # root without cancellation, then take its reciprocal: this stays
        # accurate even for |w| huge (points close to a vertex image).
        s = np.sqrt(w * w - 1.0)
        sgn = np.where(np.real(np.conj(w) * s) >= 0.0, 1.0, -1.0)
        z_far = -(w + sgn * s)
        z = 1.0 / z_far
        # On the arc both roots have modulus one; keep the upper-half one.
        on_arc = np.abs(np.abs(z) - 1.0) < 1e-12
        z = np.where(on_arc & (z.imag < 0.0), np.conj(z), z)
        return z


class _MobiusStage:
    """w -> (w - i)/(w + i), upper half plane to the unit disk."""

    def evaluate(self, w):
        den = w + 1j
        v = (w - 1j) / den
        d1 = 2j / (den * den)
        d2 = -4j / (den * den * den)
        return v, d1, d2

    def invert(self, y):
        return 1j * (1.0 + y) / (1.0 - y)


def _compose(stages, z):
    """Value, first and second derivative of the stage composition at z."""
    v = z
    d1 = np.ones_like(np.asarray(z, dtype=np.complex128))
    d2 = np.zeros_like(d1)
    for stage in stages:
        sv, sd1, sd2 = stage.evaluate(v)
        # (g o f)'' = g''(f) f'^2 + g'(f) f''
        d2 = sd2 * d1 * d1 + sd1 * d2
        d1 = sd1 * d1
        v = sv
    return v, d1, d2


class ConformalMap:
    """Riemann map of one model domain onto the unit disk."""

    def __init__(self, domain: DomainSpec, stages):
        self.domain = domain
        self.stages = list(stages)

    # -- forward -------------------------------------------------------------

    def forward(self, x) -> MapEval:
        """Map a point (or array) of the closed domain into the closed disk.

        At an exact corner vertex the value is the corner's disk image; the
        derivatives there are signaled: first derivative 0 (the map flattens
        the corner, exponent pi/theta - 1 > 0) and second derivative NaN
        unless it has a finite limit.
        """
        x = np.asarray(x, dtype=np.complex128)
        scalar = x.ndim == 0
        xv = np.atleast_1d(x)

        corner_mask = np.zeros(xv.shape, dtype=bool)
        corner_vals = np.zeros(xv.shape, dtype=np.complex128)
        for c in self.domain.corners:
            hit = np.abs(xv - c.vertex) < _CORNER_SNAP
            corner_mask |= hit
            corner_vals[hit] = c.disk_image

        safe = np.where(corner_mask, 0.5 + 0.25j, xv)  # placeholder away from cuts
        if self.stages:
            v, d1, d2 = _compose(self.stages, safe)
        else:
            v = safe.copy()
            d1 = np.ones_like(safe)
            d2 = np.zeros_like(safe)

        if corner_mask.any():
            v = np.where(corner_mask, corner_vals, v)
            d1 = np.where(corner_mask, 0.0 + 0.0j, d1)
            d2 = np.where(corner_mask, complex(np.nan, np.nan), d2)

        if scalar:
            return MapEval(complex(v[0]), complex(d1[0]), complex(d2[0]))
        return MapEval(v, d1, d2)

    # -- inverse -------------------------------------------------------------

    def inverse(self, y):
        """Preimage in the closed domain of a point (or array) of the closed disk."""
        y = np.asarray(y, dtype=np.complex128)
        scalar = y.ndim == 0
        yv = np.atleast_1d(y).copy()

        if np.any(np.abs(yv) > 1.0 + 1e-9):
            raise ValueError("inverse: point outside the closed unit disk")

        corner_mask = np.zeros(yv.shape, dtype=bool)
        corner_vals = np.zeros(yv.shape, dtype=np.complex128)
        for c in self.domain.corners:
            hit = np.abs(yv - c.disk_image) < 1e-12
            corner_mask |= hit
            corner_vals[hit] = c.vertex

        x = np.where(corner_mask, 0.5 + 0.25j, yv)
        for stage in reversed(self.stages):
            x = stage.invert(x)

        # Newton polish: closed-form inversion is exact in real arithmetic
        # but accumulates roundoff through the stages.
        if self.stages:
            target = np.where(corner_mask, 0.0, yv)
            for _ in range(_NEWTON_MAX_ITER):
                ev = _compose(self.stages, x)
                res = ev[0] - np.where(corner_mask, ev[0], yv)
                if np.all(np.abs(res) <= _NEWTON_TOL):
                    break
                d1 = ev[1]
                ok = np.isfinite(d1) & (np.abs(d1) > 1e-30) & np.isfinite(res)
                step = np.where(ok, res / np.where(ok, d1, 1.0), 0.0)
                x = x - step
            del target

        x = np.where(corner_mask, corner_vals, x)
        if scalar:
            return complex(x[0])
        return x

    # -- Jacobian factors ----------------------------------------------------

    def derivative_at_disk_point(self, y):
        """T'(T^{-1}(y)) for disk points y (vectorized)."""
        x = self.inverse(y)
        return self.forward(x).first_derivative

    def pushforward_factor(self, y):
        """|T'(T^{-1}(y))|^2 = det DT at the preimage; 0 at corner images."""
        d1 = self.derivative_at_disk_point(y)
        out = np.where(np.isfinite(d1), d1, 0.0)
        out = np.abs(out) ** 2
        if np.ndim(out) == 0:
            return float(out)
        return out

    def det_jacobian_inverse(self, z):
        """|(T^{-1})'(z)|^2 = 1/|T'(T^{-1}(z))|^2; diverges at corner images."""
        d1 = self.derivative_at_disk_point(z)
        return 1.0 / np.abs(d1) ** 2


def map_for_domain(domain: DomainSpec) -> ConformalMap:
    """Build the closed-form map for a model domain descriptor."""
    if domain.kind == "unit_disk":
        return ConformalMap(domain, [])
    if domain.kind == "half_disk":
        return ConformalMap(domain, [_JoukowskiStage(), _MobiusStage()])
    if domain.kind == "sector":
        p = math.pi / domain.theta0
        return ConformalMap(
            domain, [_PowerStage(p), _JoukowskiStage(), _MobiusStage()])
    raise ValueError(f"unknown domain kind {domain.kind!r}")
