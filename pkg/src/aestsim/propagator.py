"""Joint fixed-step integration of the system density matrix and the bath
memory operators, with the memoryless (Lindblad) limit as an alternate
evolution.

The density matrix obeys the closed master equation

    drho/dt = -i [H(t), rho]
              + sum_j { [L_j, rho Oz_j^dag] - [L_j^dag, Oz_j rho]
                      + [L_j^dag, rho Ow_j^dag] - [L_j, Ow_j rho] }

with H(t) the chain Hamiltonian plus the pulsed control term, and the
(Oz_j, Ow_j) pair of every bath driven by the ODEs in :mod:`aestsim.bath`.
Density matrix and memory operators share one classical RK4 step so that the
master equation always sees memory operators at the same stage times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp

from .bath import BathParams, OBarSet, obar_rhs
from .control import PulseSpec, pst_trajectory, pulse_value
from .metrics import fidelity, hs_norm, operator_norm
from .operators import ChainSpec, basis_state, build_xy_hamiltonian, pauli_site

TOTAL_TIME_DEFAULT = math.pi / 4

LINDBLAD_KINDS = {"sigma_minus": "minus", "sigma_x": "x", "sigma_z": "z"}
COUPLING_MODES = ("per_site", "collective")
EVOLUTION_MODES = ("non_markovian", "lindblad_limit", "closed")
NORM_KINDS = ("hs", "operator")

#: Fail-fast guards against stepping outside the weak-coupling validity
#: regime; drift is reported, never silently renormalised away.
TRACE_DRIFT_TOL = 1e-6
HERMITICITY_DRIFT_TOL = 1e-8

#: Density matrices are decimated to at most this many stored samples per
#: run; scalar series are kept at every step.
MAX_STORED_STATES = 2048


class NumericalInstabilityError(RuntimeError):
    """Integration left the trusted regime (trace or Hermiticity drift)."""

    def __init__(self, message: str, step: int, time: float):
        super().__init__(message)
        self.step = step
        self.time = time


@dataclass(frozen=True)
class SimConfig:
    """Complete description of one simulation run."""

    chain: ChainSpec
    bath: BathParams
    lindblad_kind: str = "sigma_minus"
    coupling: str = "per_site"
    pulse: PulseSpec = PulseSpec("none")
    total_time: float = TOTAL_TIME_DEFAULT
    steps_per_half_period: int = 64
    evolution: str = "non_markovian"
    rho_dot_norm_kind: str = "hs"

    def __post_init__(self):
        if self.lindblad_kind not in LINDBLAD_KINDS:
            raise ValueError(
                f"unknown lindblad_kind {self.lindblad_kind!r}; expected one of {sorted(LINDBLAD_KINDS)}"
            )
        if self.coupling not in COUPLING_MODES:
            raise ValueError(f"unknown coupling {self.coupling!r}; expected one of {COUPLING_MODES}")
        if self.evolution not in EVOLUTION_MODES:
            raise ValueError(f"unknown evolution {self.evolution!r}; expected one of {EVOLUTION_MODES}")
        if self.rho_dot_norm_kind not in NORM_KINDS:
            raise ValueError(f"unknown norm kind {self.rho_dot_norm_kind!r}; expected one of {NORM_KINDS}")
        if self.total_time <= 0:
            raise ValueError(f"total_time must be > 0, got {self.total_time}")
        if self.steps_per_half_period < 1:
            raise ValueError(f"steps_per_half_period must be >= 1, got {self.steps_per_half_period}")


@dataclass
class Trajectory:
    """Stored output of one run.

    Scalar series (``fidelity``, ``control_value``, ``rho_dot_norm``) are kept
    at every accepted step; density matrices are decimated to at most
    ``MAX_STORED_STATES`` samples (``rho_times`` lists which).
    """

    config: SimConfig
    times: np.ndarray
    fidelity: np.ndarray
    control_value: np.ndarray
    rho_dot_norm: np.ndarray
    rho_times: np.ndarray
    rho: np.ndarray
    obars_final: OBarSet

    @property
    def total_time(self) -> float:
        return float(self.times[-1])

    @property
    def final_fidelity(self) -> float:
        return float(self.fidelity[-1])

    def min_eigenvalue(self) -> float:
        """Smallest eigenvalue over all stored density matrices.

        The weak-coupling master equation is not guaranteed completely
        positive, so this is monitoring output, not a clipped quantity.
        """
        return min(float(np.linalg.eigvalsh(r)[0]) for r in self.rho)


def plan_time_grid(config: SimConfig) -> tuple[float, int]:
    """Step size and step count for a run.

    Rectangular pulses use h = half_period / steps_per_half_period, so every
    discontinuity lands exactly on the grid; total_time must then be an
    integer number of steps.  Sine pulses are smooth, so the step count is
    rounded to divide total_time exactly while keeping h as close as possible
    to half_period / steps_per_half_period.  Without a pulse the grid has
    2 * steps_per_half_period steps per quarter-pi of evolution (128 at the
    default), so the same knob refines every mode.
    """
    t_tot = config.total_time
    if config.pulse.shape == "none":
        n_steps = 2 * config.steps_per_half_period * math.ceil(4.0 * t_tot / math.pi - 1e-12)
        return t_tot / n_steps, n_steps
    h = config.pulse.half_period / config.steps_per_half_period
    if config.pulse.shape == "sine":
        n_steps = max(1, round(t_tot / h))
        return t_tot / n_steps, n_steps
    n_steps = round(t_tot / h)
    if n_steps < 1 or abs(n_steps * h - t_tot) > 1e-9 * max(1.0, t_tot):
        raise ValueError(
            f"total_time {t_tot} is not an integer multiple of the step "
            f"half_period/steps_per_half_period = {h}"
        )
    return h, n_steps


def build_lindblad_ops(config: SimConfig) -> list:
    """Per-bath coupling operators (sparse).

    ``per_site`` couples bath j to spin j through the selected operator;
    ``collective`` replicates the summed operator for every bath.
    """
    n = config.chain.n_sites
    kind = LINDBLAD_KINDS[config.lindblad_kind]
    site_ops = [sp.csr_array(pauli_site(kind, j, n)) for j in range(1, n + 1)]
    if config.coupling == "collective":
        total = site_ops[0]
        for op in site_ops[1:]:
            total = total + op
        return [total] * n
    return site_ops


def master_rhs(rho: np.ndarray, obars: OBarSet, lindblad_ops, h_sys: np.ndarray) -> np.ndarray:
    """Right-hand side of the closed master equation; traceless, Hermitian.

    ``h_sys`` is the full instantaneous Hamiltonian (control included);
    ``lindblad_ops`` may be dense arrays or scipy sparse matrices.
    """
    dim = rho.shape[0]
    if rho.shape != (dim, dim) or h_sys.shape != (dim, dim) or obars.dim != dim:
        raise ValueError(
            f"dimension mismatch: rho {rho.shape}, H {h_sys.shape}, memory operators dim {obars.dim}"
        )
    n_b = obars.n_baths
    if len(lindblad_ops) != n_b:
        raise ValueError(f"got {len(lindblad_ops)} coupling operators for {n_b} baths")

    drho = -1j * (h_sys @ rho - rho @ h_sys)
    if n_b == 0:
        return drho
    stack = obars.data
    rho_odag = np.matmul(rho, stack.conj().transpose(0, 2, 1))
    o_rho = (stack.reshape(2 * n_b * dim, dim) @ rho).reshape(2 * n_b, dim, dim)
    for j, op in enumerate(lindblad_ops):
        op_dag = op.conj().T
        x = rho_odag[j]  # rho Oz^dag
        drho += op @ x - x @ op
        y = o_rho[j]  # Oz rho
        drho -= op_dag @ y - y @ op_dag
        xw = rho_odag[n_b + j]  # rho Ow^dag
        drho += op_dag @ xw - xw @ op_dag
        yw = o_rho[n_b + j]  # Ow rho
        drho -= op @ yw - yw @ op
    return drho


def lindblad_rhs(rho: np.ndarray, lindblad_ops, p: BathParams, h_sys: np.ndarray) -> np.ndarray:
    """Memoryless limit: symmetric emission/absorption channels at rate Gamma*T/2."""
    dim = rho.shape[0]
    if rho.shape != (dim, dim) or h_sys.shape != (dim, dim):
        raise ValueError(f"dimension mismatch: rho {rho.shape}, H {h_sys.shape}")
    for op in lindblad_ops:
        if op.shape != (dim, dim):
            raise ValueError(f"coupling operator shape {op.shape} does not match dim {dim}")
    drho = -1j * (h_sys @ rho - rho @ h_sys)
    rate = 0.5 * p.Gamma * p.temperature
    if rate == 0.0:
        return drho
    for op in lindblad_ops:
        op_dag = op.conj().T
        m_down = op_dag @ op
        m_up = op @ op_dag
        drho += rate * (
            2.0 * (op @ rho @ op_dag) - m_down @ rho - rho @ m_down
            + 2.0 * (op_dag @ rho @ op) - m_up @ rho - rho @ m_up
        )
    return drho


def _check_state(rho: np.ndarray, step: int, t: float) -> None:
    trace_drift = abs(np.trace(rho) - 1.0)
    if trace_drift > TRACE_DRIFT_TOL:
        raise NumericalInstabilityError(
            f"trace drifted by {trace_drift:.3e} at step {step} (t = {t:.6g})", step, t
        )
    herm_drift = np.linalg.norm(rho - rho.conj().T)
    if herm_drift > HERMITICITY_DRIFT_TOL:
        raise NumericalInstabilityError(
            f"Hermiticity drifted by {herm_drift:.3e} at step {step} (t = {t:.6g})", step, t
        )


def evolve(config: SimConfig) -> Trajectory:
    """Integrate a run from |1 0 ... 0><1 0 ... 0| over [0, total_time].

    Classical fixed-step RK4 over the joint state (rho, all memory
    operators).  The control Hamiltonian at interior stage times uses the
    exactly propagated reference state, not an interpolation; rectangular
    pulse values are taken from the half-period containing the step, so the
    integrator never straddles a discontinuity.

    ``evolution='lindblad_limit'`` integrates the memoryless equation,
    ``'closed'`` drops the bath entirely.
    """
    h, n_steps = plan_time_grid(config)
    chain = config.chain
    n = chain.n_sites
    dim = chain.dim
    h_chain = build_xy_hamiltonian(chain)
    target = basis_state({n}, n)
    rho0 = np.outer(basis_state({1}, n), basis_state({1}, n).conj())

    controlled = config.pulse.shape != "none" and config.pulse.intensity > 0.0
    if controlled:
        ref_states = pst_trajectory(n, (h / 2) * np.arange(2 * n_steps + 1)).states
        rectangular = config.pulse.shape == "rectangular"

        def h_at(k: int, stage: int) -> np.ndarray:
            # stage 0, 1, 2 -> t_k, t_k + h/2, t_k + h; rectangular pulses are
            # constant across the step (value of the half-period containing it).
            t_c = (k + 0.5) * h if rectangular else (k + 0.5 * stage) * h
            c = pulse_value(config.pulse, t_c)
            psi = ref_states[2 * k + stage]
            return h_chain + c * np.outer(psi, psi.conj())

    else:

        def h_at(k: int, stage: int) -> np.ndarray:
            return h_chain

    if config.evolution == "closed" or config.bath.Gamma == 0.0:
        mode = "unitary"
    elif config.evolution == "lindblad_limit":
        mode = "lindblad"
    else:
        mode = "joint"

    if mode == "joint":
        l_ops = build_lindblad_ops(config)
        bath_p = config.bath
        y = np.zeros((2 * n + 1, dim, dim), dtype=complex)
        y[0] = rho0

        def rhs(h_sys: np.ndarray, state: np.ndarray) -> np.ndarray:
            obars = OBarSet.from_packed(state[1:], n)
            dy = np.empty_like(state)
            dy[0] = master_rhs(state[0], obars, l_ops, h_sys)
            dy[1:] = obar_rhs(h_sys, l_ops, obars, bath_p).data
            return dy

    elif mode == "lindblad":
        l_ops = build_lindblad_ops(config)
        y = rho0[None, :, :].copy()

        def rhs(h_sys: np.ndarray, state: np.ndarray) -> np.ndarray:
            return lindblad_rhs(state[0], l_ops, config.bath, h_sys)[None]

    else:
        y = rho0[None, :, :].copy()

        def rhs(h_sys: np.ndarray, state: np.ndarray) -> np.ndarray:
            rho = state[0]
            return (-1j * (h_sys @ rho - rho @ h_sys))[None]

    times = h * np.arange(n_steps + 1)
    fid = np.empty(n_steps + 1)
    ctrl = np.zeros(n_steps + 1)
    rho_dot = np.empty(n_steps + 1)
    norm_fn = hs_norm if config.rho_dot_norm_kind == "hs" else operator_norm
    stride = max(1, math.ceil((n_steps + 1) / MAX_STORED_STATES))
    kept_rho: list[np.ndarray] = []
    kept_t: list[float] = []

    def record(k: int, state: np.ndarray, drho: np.ndarray) -> None:
        rho = state[0]
        fid[k] = fidelity(rho, target)
        if config.pulse.shape != "none":
            ctrl[k] = pulse_value(config.pulse, times[k])
        rho_dot[k] = norm_fn(drho)
        if k % stride == 0 or k == n_steps:
            kept_rho.append(rho.copy())
            kept_t.append(times[k])

    half, sixth = h / 2.0, h / 6.0
    for k in range(n_steps):
        h0 = h_at(k, 0)
        h1 = h_at(k, 1)
        h2 = h_at(k, 2)
        k1 = rhs(h0, y)
        record(k, y, k1[0])
        k2 = rhs(h1, y + half * k1)
        k3 = rhs(h1, y + half * k2)
        k4 = rhs(h2, y + h * k3)
        y = y + sixth * (k1 + 2.0 * (k2 + k3) + k4)
        _check_state(y[0], k + 1, times[k + 1])
    record(n_steps, y, rhs(h_at(n_steps, 0), y)[0])

    obars_final = OBarSet.from_packed(y[1:].copy(), n) if mode == "joint" else OBarSet.zeros(n, dim)
    return Trajectory(
        config=config,
        times=times,
        fidelity=fid,
        control_value=ctrl,
        rho_dot_norm=rho_dot,
        rho_times=np.asarray(kept_t),
        rho=np.asarray(kept_rho),
        obars_final=obars_final,
    )
