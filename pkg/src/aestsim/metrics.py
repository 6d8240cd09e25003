"""Scalar figures of merit: transfer fidelity, control cost, and the
quantum-speed-limit time extracted from an integrated trajectory.

The speed-limit time is the Mandelstam-Tamm-type lower bound

    tau_qsl = sin^2(bures_angle(rho_0, rho_t)) / Lambda_t,

where Lambda_t is the time average of the Hilbert-Schmidt norm of drho/dt
over the actual driving window [0, t].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: Round-off slack allowed on state expectations before declaring the density
#: matrix invalid.  Wide enough for integrator noise on nearly pure states,
#: narrow enough not to mask genuine positivity failures.
EXPECTATION_SLACK = 1e-9


class InvalidDensityError(ValueError):
    """State expectation fell outside [0, 1] by more than round-off slack."""


class InconsistentTrajectoryError(RuntimeError):
    """Trajectory moved a finite Bures angle with vanishing average speed."""


def _clamped_expectation(rho: np.ndarray, psi: np.ndarray) -> float:
    """<psi| rho |psi> clamped to [0, 1]; raises beyond round-off slack."""
    value = float(np.real(np.vdot(psi, rho @ psi)))
    if value < -EXPECTATION_SLACK or value > 1.0 + EXPECTATION_SLACK:
        raise InvalidDensityError(
            f"state expectation {value!r} outside [0, 1] beyond slack {EXPECTATION_SLACK}"
        )
    return min(max(value, 0.0), 1.0)


def fidelity(rho: np.ndarray, target: np.ndarray) -> float:
    """Transfer fidelity sqrt(<target| rho |target>) against a pure target."""
    return math.sqrt(_clamped_expectation(rho, target))


def hs_norm(a: np.ndarray) -> float:
    """Hilbert-Schmidt norm sqrt(tr(A^dag A)) = Frobenius norm."""
    return float(np.linalg.norm(a))


def operator_norm(a: np.ndarray) -> float:
    """Largest singular value; alternative norm for speed-limit comparisons."""
    return float(np.linalg.norm(a, 2))


def instantaneous_cost(c: float, psi1: np.ndarray, basis_dim: int) -> float:
    """Instantaneous control cost |c| sqrt(sum_n |<n|psi1>|^2).

    The sum runs over the full computational basis, so for a normalised
    reference state this equals |c|, the Hilbert-Schmidt norm of the rank-one
    control Hamiltonian.
    """
    if len(psi1) != basis_dim:
        raise ValueError(f"state has dim {len(psi1)}, expected {basis_dim}")
    return abs(c) * math.sqrt(float(np.sum(np.abs(psi1) ** 2)))


@dataclass(frozen=True)
class CostReport:
    """Instantaneous cost samples and their time integral over the run."""

    instantaneous: np.ndarray
    total: float


def total_cost(traj) -> CostReport:
    """Integrated control cost of a trajectory (trapezoid over its grid).

    For rectangular pulses the samples are constant and the integral is
    exactly intensity * total_time.
    """
    inst = np.abs(traj.control_value)
    return CostReport(instantaneous=inst, total=float(np.trapezoid(inst, traj.times)))


def bures_angle(psi0: np.ndarray, rho_t: np.ndarray) -> float:
    """Geometric angle arccos(sqrt(<psi0| rho_t |psi0>)) in [0, pi/2]."""
    return math.acos(math.sqrt(_clamped_expectation(rho_t, psi0)))


@dataclass(frozen=True)
class QsltReport:
    bures_angle: float
    lambda_t: float
    tau_qsl: float


def qslt(traj, psi0: np.ndarray) -> QsltReport:
    """Quantum-speed-limit time of a trajectory relative to its start state.

    The driving time is the trajectory's full span.  A frozen trajectory
    (no angle, no speed) yields tau_qsl = 0; a finite angle with vanishing
    average speed is inconsistent and raises.
    """
    t = float(traj.times[-1])
    lam = float(np.trapezoid(traj.rho_dot_norm, traj.times)) / t
    angle = bures_angle(psi0, traj.rho[-1])
    if lam < 1e-12:
        if angle < 1e-9:
            return QsltReport(bures_angle=angle, lambda_t=lam, tau_qsl=0.0)
        raise InconsistentTrajectoryError(
            f"Bures angle {angle:.3e} with average speed {lam:.3e}"
        )
    return QsltReport(bures_angle=angle, lambda_t=lam, tau_qsl=math.sin(angle) ** 2 / lam)
