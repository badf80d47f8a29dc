"""Minimal traveling wave U and the damped profiles phi_gamma.

U solves U'' + 2U' + U(1-U) = 0 with U(-inf)=1, U(+inf)=0, normalized so the
1/2-crossing sits at z = 0.  phi_gamma solves phi'' + 2phi' + phi - gamma phi^2
= 0 from phi(0) = 1/(2 gamma), phi'(0) = 0.  Both tails behave like B z e^{-z};
B is extracted from a fixed ratio window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DomainError, NumericsError, TailFitError

# Growing eigenvalue of the linearization at the invaded state u = 1:
# root of mu^2 + 2 mu - 1 = 0.
MU_UNSTABLE = math.sqrt(2.0) - 1.0
# Quadratic coefficient of the unstable manifold u = 1 - d e^{mu z} + C2 d^2 e^{2 mu z}.
_C2 = -1.0 / (7.0 - 4.0 * math.sqrt(2.0))
# Amplitude 1 - U at the left end of the first integration pass.
_START_AMPLITUDE = 1e-8

TAIL_WINDOW = 10.0
TAIL_SPREAD_TOL = 0.02


@dataclass
class WaveProfile:
    """Sampled monotone profile with its exponential-tail constant."""

    z0: float
    dz: float
    values: np.ndarray = field(repr=False)
    B: float = 0.0
    kind: str = "minimal_wave"
    gamma: float | None = None
    dvalues: np.ndarray | None = field(default=None, repr=False)

    def grid(self) -> np.ndarray:
        return self.z0 + self.dz * np.arange(self.values.size)

    @property
    def z_max(self) -> float:
        return self.z0 + self.dz * (self.values.size - 1)

    def __call__(self, z):
        """Cubic Hermite evaluation (exact nodes, ~dz^4 error between them);
        constant extension outside the sampled range."""
        z = np.asarray(z, dtype=float)
        scalar = z.ndim == 0
        z = np.atleast_1d(z)
        out = np.empty_like(z)
        lo = z <= self.z0
        hi = z >= self.z_max
        out[lo] = self.values[0]
        out[hi] = self.values[-1]
        mid = ~(lo | hi)
        if np.any(mid):
            if self.dvalues is None:
                out[mid] = np.interp(z[mid], self.grid(), self.values)
            else:
                s = (z[mid] - self.z0) / self.dz
                i = np.minimum(s.astype(int), self.values.size - 2)
                t = s - i
                h = self.dz
                y0, y1 = self.values[i], self.values[i + 1]
                d0, d1 = self.dvalues[i], self.dvalues[i + 1]
                h00 = (1 + 2 * t) * (1 - t) ** 2
                h10 = t * (1 - t) ** 2
                h01 = t * t * (3 - 2 * t)
                h11 = t * t * (t - 1)
                out[mid] = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
        return float(out[0]) if scalar else out

    def derivative(self, z):
        if self.dvalues is None:
            raise NumericsError("profile carries no derivative samples")
        z = np.asarray(z, dtype=float)
        scalar = z.ndim == 0
        z = np.atleast_1d(z)
        zc = np.clip(z, self.z0, self.z_max)
        out = np.interp(zc, self.grid(), self.dvalues)
        return float(out[0]) if scalar else out

    def to_csv(self, path) -> None:
        from .io import write_csv

        zs = self.grid()
        write_csv(path, ("z", "value"), zip(zs, self.values))


def _rk4_wave(u0: float, up0: float, n: int, h: float, gamma: float) -> tuple[np.ndarray, np.ndarray]:
    """Integrate u'' + 2u' + u - gamma u^2 = 0 with classical RK4."""
    vals = np.empty(n + 1)
    dvals = np.empty(n + 1)
    u, up = u0, up0
    vals[0], dvals[0] = u, up
    for i in range(n):
        k1u = up
        k1p = -2.0 * up - u + gamma * u * u
        u2 = u + 0.5 * h * k1u
        p2 = up + 0.5 * h * k1p
        k2u = p2
        k2p = -2.0 * p2 - u2 + gamma * u2 * u2
        u3 = u + 0.5 * h * k2u
        p3 = up + 0.5 * h * k2p
        k3u = p3
        k3p = -2.0 * p3 - u3 + gamma * u3 * u3
        u4 = u + h * k3u
        p4 = up + h * k3p
        k4u = p4
        k4p = -2.0 * p4 - u4 + gamma * u4 * u4
        u += h * (k1u + 2.0 * k2u + 2.0 * k3u + k4u) / 6.0
        up += h * (k1p + 2.0 * k2p + 2.0 * k3p + k4p) / 6.0
        vals[i + 1], dvals[i + 1] = u, up
    return vals, dvals


def _tail_ratio_stats(z: np.ndarray, values: np.ndarray, z_hi: float) -> tuple[float, float]:
    mask = (z >= z_hi - TAIL_WINDOW) & (z <= z_hi)
    if mask.sum() < 10:
        raise DomainError("tail window not covered by the profile")
    with np.errstate(over="raise"):
        ratio = values[mask] * np.exp(z[mask]) / z[mask]
    mean = float(ratio.mean())
    spread = float((ratio.max() - ratio.min()) / abs(mean))
    return mean, spread


def wave_B_constant(profile: WaveProfile) -> float:
    """Tail constant B with U(z) ~ B z e^{-z}: mean of U e^z / z over the last
    TAIL_WINDOW units; rejects windows where the ratio still drifts."""
    if profile.z_max < 40.0:
        raise DomainError("profile must extend to z_max >= 40 for tail extraction")
    mean, spread = _tail_ratio_stats(profile.grid(), profile.values, profile.z_max)
    if spread > TAIL_SPREAD_TOL:
        raise TailFitError(
            f"tail ratio spread {spread:.3%} exceeds {TAIL_SPREAD_TOL:.0%}; "
            "profile too short for a converged B"
        )
    if not mean > 0.0:
        raise TailFitError("tail constant came out nonpositive")
    return mean


@lru_cache(maxsize=16)
def minimal_wave(z_min: float = -30.0, z_max: float = 55.0, dz: float = 1e-3) -> WaveProfile:
    """Minimal-speed wave, translated so U(0) = 1/2.

    Integrates forward from the unstable manifold of u = 1 (no shooting
    parameter: the orbit is unique up to translation), then re-launches with a
    rescaled start amplitude until the 1/2-crossing lands on z = 0.
    """
    if z_min > -20.0 or z_max < 40.0 or dz > 1e-3:
        raise DomainError("need z_min <= -20, z_max >= 40, dz <= 1e-3")
    n = int(round((z_max - z_min) / dz))
    z = z_min + dz * np.arange(n + 1)
    delta = _START_AMPLITUDE
    crossing = math.inf
    vals = dvals = None
    for _ in range(6):
        u0 = 1.0 - delta + _C2 * delta * delta
        up0 = -MU_UNSTABLE * delta + 2.0 * MU_UNSTABLE * _C2 * delta * delta
        vals, dvals = _rk4_wave(u0, up0, n, dz, 1.0)
        if vals.min() <= 0.0 or vals.max() >= 1.0:
            raise NumericsError("wave trajectory left (0, 1); refine dz or move z_min left")
        above = np.nonzero(vals >= 0.5)[0]
        if above.size == 0 or above[-1] == n:
            raise NumericsError("1/2-crossing not bracketed on the grid")
        i = above[-1]
        crossing = z[i] + dz * (0.5 - vals[i]) / (vals[i + 1] - vals[i])
        if abs(crossing) < 1e-12:
            break
        delta *= math.exp(MU_UNSTABLE * crossing)
    if abs(crossing) > 1e-9:
        raise NumericsError(f"crossing recentering stalled at {crossing:.3e}")
    profile = WaveProfile(z0=z_min, dz=dz, values=vals, kind="minimal_wave", dvalues=dvals)
    profile.B = wave_B_constant(profile)
    return profile


@lru_cache(maxsize=32)
def phi_gamma(gamma: float, z_max: float = 55.0, dz: float = 1e-3) -> WaveProfile:
    """Damped companion profile: phi(0) = 1/(2 gamma), phi'(0) = 0.

    Guarantees checked numerically: phi' < 0 on (0, z_max] and phi'/phi >= -1.
    """
    if not gamma > 1.0:
        raise DomainError("phi_gamma requires gamma > 1")
    if z_max < 40.0:
        raise DomainError("need z_max >= 40 for tail extraction")
    n = int(round(z_max / dz))
    vals, dvals = _rk4_wave(0.5 / gamma, 0.0, n, dz, gamma)
    if vals.min() <= 0.0:
        raise NumericsError("phi left (0, 1/gamma); refine dz")
    if np.any(dvals[1:] >= 0.0):
        raise NumericsError("phi' failed to stay negative on (0, z_max]")
    logslope = dvals[1:] / vals[1:]
    if np.any(logslope < -1.0 - 1e-12):
        raise NumericsError("phi'/phi dropped below -1: integration error")
    profile = WaveProfile(
        z0=0.0, dz=dz, values=vals, kind="phi_gamma", gamma=gamma, dvalues=dvals
    )
    profile.B = wave_B_constant(profile)
    return profile


def ode_residual(profile: WaveProfile) -> float:
    """Max | u'' + 2u' + u - gamma u^2 | over interior nodes, with 4th-order
    centered stencils so the discretization error sits well below 1e-8."""
    u = profile.values
    h = profile.dz
    g = 1.0 if profile.gamma is None else profile.gamma
    d1 = (-u[4:] + 8.0 * u[3:-1] - 8.0 * u[1:-3] + u[:-4]) / (12.0 * h)
    d2 = (-u[4:] + 16.0 * u[3:-1] - 30.0 * u[2:-2] + 16.0 * u[1:-3] - u[:-4]) / (12.0 * h * h)
    mid = u[2:-2]
    res = d2 + 2.0 * d1 + mid - g * mid * mid
    return float(np.abs(res).max())
