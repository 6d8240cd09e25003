"""Control layer: ideal-transfer reference trajectory, pulse shapes, and the
rank-one control Hamiltonian that pins the dynamics onto that trajectory.

The control Hamiltonian is H_c(t) = c(t) |psi1(t)><psi1(t)| where |psi1(t)>
is the state an excitation would follow under the perfect-transfer couplings,
and c(t) is a zero-area pulse train.  A pulse train decouples effectively when

    rectangular:  I * tau = 2 pi m   (m = 1, 2, ...)
    sine:         J0(I * tau / pi) = 0
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import math

import numpy as np
from scipy.special import j0, jn_zeros

from .operators import basis_state, build_xy_hamiltonian, pst_couplings

PULSE_SHAPES = ("rectangular", "sine", "none")

#: |J0(I tau / pi)| below this counts as sitting on a Bessel zero.  Loose
#: enough to accept a zero quoted to 4 significant figures, tight enough to
#: reject everything else.
BESSEL_ZERO_TOL = 1e-3

#: Tolerance on I tau / (2 pi) being an integer for rectangular pulses.
RECT_MULTIPLE_TOL = 1e-6


@dataclass(frozen=True)
class PulseSpec:
    """Zero-area pulse train: shape, intensity I >= 0, half-period tau > 0."""

    shape: str
    intensity: float = 0.0
    half_period: float = 0.0

    def __post_init__(self):
        if self.shape not in PULSE_SHAPES:
            raise ValueError(f"unknown pulse shape {self.shape!r}; expected one of {PULSE_SHAPES}")
        if self.intensity < 0:
            raise ValueError(f"pulse intensity must be >= 0, got {self.intensity}")
        if self.shape != "none" and self.half_period <= 0:
            raise ValueError(f"pulse half-period must be > 0, got {self.half_period}")


@dataclass(frozen=True)
class ReferenceTrajectory:
    """|psi1(t)> sampled on a fixed time grid; states have unit norm."""

    times: np.ndarray
    states: np.ndarray  # shape (len(times), dim)

    @property
    def dim(self) -> int:
        return self.states.shape[1]


class PulseEffectiveness(NamedTuple):
    effective: bool
    residual: float


def pulse_value(spec: PulseSpec, t: float) -> float:
    """Control amplitude c(t); t >= 0.

    Rectangular trains start positive: +I on [n tau, (n+1) tau) for even n,
    -I for odd n.  Sine trains are I sin(pi t / tau), starting at 0 rising.
    At half-period boundaries the rectangular value belongs to the interval
    that starts there.
    """
    if t < 0:
        raise ValueError(f"pulse time must be >= 0, got {t}")
    if spec.shape == "none" or spec.intensity == 0.0:
        return 0.0
    if spec.shape == "rectangular":
        # Small bias keeps boundary samples on the interval they open.
        n = math.floor(t / spec.half_period + 1e-9)
        return spec.intensity if n % 2 == 0 else -spec.intensity
    return spec.intensity * math.sin(math.pi * t / spec.half_period)


def check_effective(spec: PulseSpec) -> PulseEffectiveness:
    """Decide whether the pulse train satisfies its decoupling condition.

    Returns the verdict together with the residual: distance of
    I tau / (2 pi) from the nearest positive integer for rectangular pulses,
    |J0(I tau / pi)| for sine pulses.
    """
    if spec.shape == "none":
        raise ValueError("effectiveness is undefined for shape 'none'")
    area = spec.intensity * spec.half_period
    if spec.shape == "rectangular":
        x = area / (2 * math.pi)
        m = round(x)
        residual = abs(x - m)
        return PulseEffectiveness(m >= 1 and residual < RECT_MULTIPLE_TOL, residual)
    residual = abs(float(j0(area / math.pi)))
    return PulseEffectiveness(residual < BESSEL_ZERO_TOL, residual)


def effective_intensities(shape: str, half_period: float, count: int) -> np.ndarray:
    """First ``count`` intensities satisfying the decoupling condition, ascending."""
    if half_period <= 0:
        raise ValueError(f"half-period must be > 0, got {half_period}")
    if shape == "rectangular":
        return 2 * math.pi * np.arange(1, count + 1) / half_period
    if shape == "sine":
        return jn_zeros(0, count) * math.pi / half_period
    raise ValueError(f"no effective family for pulse shape {shape!r}")


def pst_trajectory(n_sites: int, time_grid: np.ndarray) -> ReferenceTrajectory:
    """Evolve |1 0 ... 0> under the perfect-transfer chain on the given grid.

    One eigendecomposition of the perfect-transfer Hamiltonian is reused for
    every grid time, so the stored states carry no integration drift.  The
    grid must start at 0 and increase strictly.
    """
    times = np.asarray(time_grid, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("time grid must be a non-empty 1-D array")
    if times[0] != 0.0:
        raise ValueError(f"time grid must start at 0, got {times[0]}")
    if times.size > 1 and not np.all(np.diff(times) > 0):
        raise ValueError("time grid must be strictly increasing")

    h_pst = build_xy_hamiltonian(pst_couplings(n_sites))
    evals, evecs = np.linalg.eigh(h_pst)
    psi0 = basis_state({1}, n_sites)
    amps = evecs.conj().T @ psi0
    phases = np.exp(-1j * np.outer(times, evals))
    states = (phases * amps) @ evecs.T
    states[0] = psi0
    return ReferenceTrajectory(times=times, states=states)


def leo_hamiltonian(c: float, psi1: np.ndarray) -> np.ndarray:
    """Rank-one control Hamiltonian c |psi1><psi1|; psi1 must be unit norm."""
    return c * np.outer(psi1, psi1.conj())
