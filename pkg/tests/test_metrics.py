"""Fidelity, norms, control cost, Bures angle, speed-limit time."""

import math

import numpy as np
import pytest

from aestsim.bath import BathParams
from aestsim.control import PulseSpec, leo_hamiltonian, pst_trajectory
from aestsim.metrics import (
    InconsistentTrajectoryError,
    InvalidDensityError,
    bures_angle,
    fidelity,
    hs_norm,
    instantaneous_cost,
    operator_norm,
    qslt,
    total_cost,
)
from aestsim.operators import basis_state, uniform_couplings
from aestsim.propagator import SimConfig, evolve


def _random_state(rng, dim):
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)


def test_fidelity_pure_match():
    psi = _random_state(np.random.default_rng(0), 8)
    assert abs(fidelity(np.outer(psi, psi.conj()), psi) - 1.0) < 1e-12


def test_fidelity_maximally_mixed():
    for n in (1, 3):
        dim = 2**n
        rho = np.eye(dim) / dim
        target = basis_state({1}, n)
        assert abs(fidelity(rho, target) - math.sqrt(1 / dim)) < 1e-14


def test_fidelity_orthogonal():
    rho = np.outer(basis_state({1}, 2), basis_state({1}, 2).conj())
    assert fidelity(rho, basis_state({2}, 2)) == 0.0


def test_fidelity_rejects_invalid_density():
    psi = basis_state({1}, 1)
    with pytest.raises(InvalidDensityError):
        fidelity(1.5 * np.outer(psi, psi.conj()), psi)
    with pytest.raises(InvalidDensityError):
        fidelity(-1e-6 * np.outer(psi, psi.conj()), psi)


def test_fidelity_clamps_roundoff():
    psi = basis_state({1}, 1)
    rho = (1.0 + 5e-10) * np.outer(psi, psi.conj())
    assert fidelity(rho, psi) == 1.0


def test_hs_norm():
    assert abs(hs_norm(np.eye(5)) - math.sqrt(5)) < 1e-15
    assert hs_norm(np.zeros((3, 3))) == 0.0
    psi = _random_state(np.random.default_rng(1), 6)
    for c in (2.0, -3.7, 1j * 4.0):
        assert abs(hs_norm(c * np.outer(psi, psi.conj())) - abs(c)) < 1e-12


def test_operator_norm():
    a = np.diag([3.0, -7.0, 1.0])
    assert abs(operator_norm(a) - 7.0) < 1e-12
    assert operator_norm(a) <= hs_norm(a)


def test_instantaneous_cost():
    psi = _random_state(np.random.default_rng(2), 4)
    assert instantaneous_cost(0.0, psi, 4) == 0.0
    assert abs(instantaneous_cost(32.0, psi, 4) - 32.0) < 1e-12
    with pytest.raises(ValueError):
        instantaneous_cost(1.0, psi, 8)


def test_cost_definitions_agree():
    # |c| * sqrt(sum_n |<n|psi>|^2) equals the HS norm of the rank-one term.
    rng = np.random.default_rng(3)
    for _ in range(20):
        psi = _random_state(rng, 8)
        c = float(rng.normal(scale=50.0))
        assert abs(instantaneous_cost(c, psi, 8) - hs_norm(leo_hamiltonian(c, psi))) < 1e-10


def _cheap_run(pulse, n_sites=3, bath=None, **kwargs):
    return evolve(
        SimConfig(
            chain=uniform_couplings(n_sites),
            bath=bath or BathParams(0.0, 1.0, 0.0),
            pulse=pulse,
            evolution="closed",
            **kwargs,
        )
    )


def test_total_cost_no_pulse():
    traj = _cheap_run(PulseSpec("none"))
    report = total_cost(traj)
    assert report.total == 0.0
    assert np.all(report.instantaneous == 0.0)


def test_total_cost_rectangular_closed_form():
    traj = _cheap_run(PulseSpec("rectangular", 32.0, math.pi / 16))
    report = total_cost(traj)
    assert np.all(np.abs(report.instantaneous - 32.0) < 1e-12)
    assert abs(report.total - 32.0 * math.pi / 4) < 1e-9 * 32.0


def test_total_cost_sine_closed_form():
    # integral of I |sin(pi t / tau)| over k half-periods = I * (2 tau / pi) * k
    intensity, tau = 76.96, math.pi / 32
    traj = _cheap_run(PulseSpec("sine", intensity, tau))
    k = round(traj.total_time / tau)
    exact = intensity * (2 * tau / math.pi) * k
    report = total_cost(traj)
    assert abs(report.total - exact) / exact < 1e-3  # trapezoid at 64 samples per half-period


def test_bures_angle_limits():
    psi = _random_state(np.random.default_rng(4), 4)
    assert bures_angle(psi, np.outer(psi, psi.conj())) < 1e-7
    other = basis_state({2}, 2)
    rho = np.outer(other, other.conj())
    psi0 = basis_state({1}, 2)
    assert abs(bures_angle(psi0, rho) - math.pi / 2) < 1e-12


def test_bures_angle_maximally_mixed_qubit():
    psi0 = basis_state({1}, 1)
    assert abs(bures_angle(psi0, np.eye(2) / 2) - math.pi / 4) < 1e-14


def test_bures_angle_monotone_in_expectation():
    psi0 = basis_state({1}, 1)
    angles = []
    for p in (1.0, 0.8, 0.5, 0.2, 0.0):
        rho = np.diag([1 - p, p]).astype(complex)  # <psi0|rho|psi0> = p
        angles.append(bures_angle(psi0, rho))
    assert all(a < b for a, b in zip(angles, angles[1:]))


def test_qslt_frozen_trajectory_is_zero():
    class Frozen:
        times = np.linspace(0.0, 1.0, 11)
        rho_dot_norm = np.zeros(11)
        rho = np.array([np.diag([0.0, 1.0]).astype(complex)] * 2)

    report = qslt(Frozen(), basis_state({1}, 1))
    assert report.tau_qsl == 0.0 and report.lambda_t == 0.0


def test_qslt_inconsistent_trajectory():
    class Moved:
        times = np.linspace(0.0, 1.0, 11)
        rho_dot_norm = np.zeros(11)
        rho = np.array([np.diag([1.0, 0.0]).astype(complex)] * 2)  # orthogonal to start

    with pytest.raises(InconsistentTrajectoryError):
        qslt(Moved(), basis_state({1}, 1))


def test_qslt_bound_on_actual_run():
    bath = BathParams(0.05, 1.0, 30.0)
    traj = evolve(
        SimConfig(
            chain=uniform_couplings(3),
            bath=bath,
            pulse=PulseSpec("rectangular", 32.0, math.pi / 16),
        )
    )
    report = qslt(traj, basis_state({1}, 3))
    assert 0.0 < report.tau_qsl <= traj.total_time + 1e-9
    assert 0.0 <= report.bures_angle <= math.pi / 2


def test_expectation_bounded_by_trace():
    rng = np.random.default_rng(6)
    for _ in range(10):
        a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        rho = a @ a.conj().T
        rho /= np.trace(rho).real
        psi = _random_state(rng, 8)
        assert np.vdot(psi, rho @ psi).real <= 1.0 + 1e-12
