"""Reference trajectory, pulse trains, effectiveness conditions, control term."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from aestsim.control import (
    PulseSpec,
    check_effective,
    effective_intensities,
    leo_hamiltonian,
    pst_trajectory,
    pulse_value,
)
from aestsim.operators import basis_state, excitation_number, state_index


def test_pst_trajectory_starts_at_initial_state():
    ref = pst_trajectory(4, np.array([0.0, 0.1, 0.2]))
    np.testing.assert_array_equal(ref.states[0], basis_state({1}, 4))


def test_pst_transfer_seven_sites():
    ref = pst_trajectory(7, np.array([0.0, math.pi / 4]))
    target = basis_state({7}, 7)
    overlap = abs(np.vdot(target, ref.states[1]))
    assert abs(overlap - 1.0) < 1e-8


def test_two_site_rabi_amplitude():
    # Closed form for the 2x2 single-excitation block: |<01|psi(t)>| = |sin(2t)|.
    t = math.pi / 8
    ref = pst_trajectory(2, np.array([0.0, t]))
    amp = abs(ref.states[1][state_index({2}, 2)])
    assert abs(amp - abs(math.sin(2 * t))) < 1e-12


def test_reference_unit_norm_and_single_excitation():
    grid = np.linspace(0.0, math.pi / 4, 65)
    ref = pst_trajectory(5, grid)
    n_exc = excitation_number(5)
    for psi in ref.states:
        assert abs(np.linalg.norm(psi) - 1.0) < 1e-10
        assert abs(np.vdot(psi, n_exc @ psi).real - 1.0) < 1e-10


def test_pst_trajectory_grid_validation():
    with pytest.raises(ValueError):
        pst_trajectory(3, np.array([0.1, 0.2]))
    with pytest.raises(ValueError):
        pst_trajectory(3, np.array([0.0, 0.2, 0.1]))


def test_rectangular_pulse_values():
    spec = PulseSpec("rectangular", 32.0, math.pi / 16)
    assert pulse_value(spec, 0.1) == 32.0  # 0.1 < tau ~ 0.196
    assert pulse_value(spec, 0.25) == -32.0  # tau < 0.25 < 2 tau
    assert pulse_value(spec, 0.0) == 32.0
    # boundary belongs to the interval it opens
    assert pulse_value(spec, spec.half_period) == -32.0
    assert pulse_value(spec, 2 * spec.half_period) == 32.0


def test_sine_pulse_value():
    spec = PulseSpec("sine", 76.96, math.pi / 32)
    assert abs(pulse_value(spec, spec.half_period / 2) - 76.96) < 1e-12


def test_none_pulse_and_negative_time():
    assert pulse_value(PulseSpec("none"), 1.0) == 0.0
    with pytest.raises(ValueError):
        pulse_value(PulseSpec("rectangular", 1.0, 1.0), -0.1)


def test_pulse_spec_validation():
    with pytest.raises(ValueError):
        PulseSpec("rectangular", 1.0, 0.0)
    with pytest.raises(ValueError):
        PulseSpec("rectangular", -1.0, 1.0)
    with pytest.raises(ValueError):
        PulseSpec("triangle", 1.0, 1.0)


def test_check_effective_rectangular():
    ok = check_effective(PulseSpec("rectangular", 32.0, math.pi / 16))
    assert ok.effective and ok.residual < 1e-12  # I tau = 2 pi exactly
    bad = check_effective(PulseSpec("rectangular", 33.0, math.pi / 16))
    assert not bad.effective and bad.residual > 1e-3


def test_check_effective_sine():
    # I tau / pi = 2.405, the first Bessel-function zero quoted to 4 figures.
    ok = check_effective(PulseSpec("sine", 76.96, math.pi / 32))
    assert ok.effective and ok.residual < 1e-3
    bad = check_effective(PulseSpec("sine", 60.0, math.pi / 32))
    assert not bad.effective


def test_check_effective_rejects_none():
    with pytest.raises(ValueError):
        check_effective(PulseSpec("none"))


def test_effective_intensities():
    tau = math.pi / 16
    np.testing.assert_allclose(
        effective_intensities("rectangular", tau, 3), [32.0, 64.0, 96.0], rtol=1e-14
    )
    sine = effective_intensities("sine", math.pi / 32, 2)
    assert abs(sine[0] - 76.96) < 0.1  # first zero 2.4048... times 32 = 76.9544
    for intensity in sine:
        assert check_effective(PulseSpec("sine", float(intensity), math.pi / 32)).residual < 1e-12


def test_leo_hamiltonian_zero_control():
    psi = basis_state({1}, 2)
    np.testing.assert_array_equal(leo_hamiltonian(0.0, psi), np.zeros((4, 4)))


def test_leo_hamiltonian_basis_projector():
    psi = basis_state({1}, 2)
    h = leo_hamiltonian(1.0, psi)
    expected = np.zeros((4, 4), dtype=complex)
    expected[2, 2] = 1.0
    np.testing.assert_array_equal(h, expected)


def test_leo_hamiltonian_superposition():
    psi = (basis_state({2}, 2) + basis_state({1}, 2)) / math.sqrt(2)
    h = leo_hamiltonian(5.0, psi)
    expected = np.zeros((4, 4), dtype=complex)
    expected[np.ix_([1, 2], [1, 2])] = 2.5
    np.testing.assert_allclose(h, expected, atol=1e-15)
    assert abs(np.trace(h) - 5.0) < 1e-12
    np.testing.assert_allclose(h, h.conj().T, atol=0)


def test_leo_projector_scaling():
    rng = np.random.default_rng(3)
    for c in (1.0, -4.2, 17.0):
        psi = rng.normal(size=8) + 1j * rng.normal(size=8)
        psi /= np.linalg.norm(psi)
        h = leo_hamiltonian(c, psi)
        np.testing.assert_allclose(h @ h, c * h, atol=1e-10)


def test_rectangular_zero_area():
    spec = PulseSpec("rectangular", 32.0, math.pi / 16)
    tau = spec.half_period
    for k in (1, 2, 5):
        # piecewise-constant: midpoint value times tau is the exact integral
        area = sum(pulse_value(spec, (n + 0.5) * tau) * tau for n in range(2 * k))
        assert area == 0.0


def test_sine_zero_area():
    spec = PulseSpec("sine", 76.96, math.pi / 32)
    for k in (1, 3):
        area, _ = quad(lambda t: pulse_value(spec, t), 0.0, 2 * k * spec.half_period)
        assert abs(area) < 1e-10
