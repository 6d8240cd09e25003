"""Bath correlation functions and the memory-operator equations of motion."""

import math

import numpy as np
import pytest

from aestsim.bath import (
    BathParams,
    OBarSet,
    WeakCouplingWarning,
    correlation_alpha_w,
    correlation_alpha_z,
    obar_rhs,
)
from aestsim.operators import pauli_site

SM = pauli_site("minus", 1, 1)
SP = pauli_site("plus", 1, 1)


def test_params_validation():
    with pytest.raises(ValueError):
        BathParams(0.2, 1.0, 10.0)
    with pytest.raises(ValueError):
        BathParams(-0.01, 1.0, 10.0)
    with pytest.raises(ValueError):
        BathParams(0.02, 0.0, 10.0)
    with pytest.raises(ValueError):
        BathParams(0.02, 1.0, -1.0)
    with pytest.warns(WeakCouplingWarning):
        BathParams(0.06, 1.0, 10.0)


def test_alpha_z_at_zero_lag_matches_drive_coefficient():
    p = BathParams(0.04, 2.0, 50.0)
    expected = p.Gamma * p.temperature * p.gamma / 2 - 1j * p.Gamma * p.gamma**2 / 2
    assert correlation_alpha_z(p, 0.0) == expected


def test_alpha_z_decoupled_bath():
    p = BathParams(0.0, 3.0, 20.0)
    assert correlation_alpha_z(p, 0.7) == 0.0


def test_alpha_z_frozen_value():
    # Gamma=0.04, gamma=2, T=50, dt=1: (0.04*50*1*e^-2) - i*(0.04*2*e^-2)
    p = BathParams(0.04, 2.0, 50.0)
    value = correlation_alpha_z(p, 1.0)
    assert abs(value.real - 0.2706705664732254) < 1e-16
    assert abs(value.imag - (-0.010826822658929016)) < 1e-17


def test_alpha_w_at_zero_lag():
    p = BathParams(0.04, 2.0, 50.0)
    assert correlation_alpha_w(p, 0.0) == p.Gamma * p.temperature * p.gamma / 2


def test_alpha_w_zero_temperature():
    p = BathParams(0.05, 2.0, 0.0)
    assert correlation_alpha_w(p, 0.3) == 0.0


def test_alpha_w_exponential_decay_ratio():
    p = BathParams(0.03, 1.7, 12.0)
    for dt in (0.1, 0.5, 2.0):
        ratio = correlation_alpha_w(p, dt) / correlation_alpha_w(p, 0.0)
        assert abs(ratio - math.exp(-p.gamma * dt)) < 1e-14


def test_alpha_z_real_part_equals_alpha_w():
    p = BathParams(0.02, 0.8, 33.0)
    for dt in (0.0, 0.4, 1.3, 6.0):
        assert correlation_alpha_z(p, dt).real == correlation_alpha_w(p, dt)


def test_negative_lag_rejected():
    p = BathParams(0.02, 1.0, 1.0)
    with pytest.raises(ValueError):
        correlation_alpha_z(p, -0.1)
    with pytest.raises(ValueError):
        correlation_alpha_w(p, -0.1)


def test_obar_set_views():
    obars = OBarSet(np.zeros((2, 4, 4)), np.ones((2, 4, 4)))
    assert obars.n_baths == 2 and obars.dim == 4
    np.testing.assert_array_equal(obars.o_z, np.zeros((2, 4, 4)))
    np.testing.assert_array_equal(obars.o_w, np.ones((2, 4, 4)))
    with pytest.raises(ValueError):
        OBarSet(np.zeros((2, 4, 4)), np.zeros((1, 4, 4)))


def test_drive_from_zero_initial_condition():
    p = BathParams(0.04, 2.0, 50.0)
    obars = OBarSet.zeros(1, 2)
    d = obar_rhs(np.zeros((2, 2)), [SM], obars, p)
    az0 = correlation_alpha_z(p, 0.0)
    aw0 = correlation_alpha_w(p, 0.0)
    np.testing.assert_allclose(d.o_z[0], az0 * SM, atol=1e-16)
    np.testing.assert_allclose(d.o_w[0], aw0 * SP, atol=1e-16)


def test_decoupled_bath_stays_zero():
    p = BathParams(0.0, 2.0, 50.0)
    obars = OBarSet.zeros(1, 2)
    d = obar_rhs(np.zeros((2, 2)), [SM], obars, p)
    np.testing.assert_array_equal(d.data, np.zeros_like(d.data))


def _rk4_obar_step(h_sys, ops, obars, p, h):
    def f(data):
        return obar_rhs(h_sys, ops, OBarSet.from_packed(data, obars.n_baths), p).data

    y = obars.data
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return OBarSet.from_packed(y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4), obars.n_baths)


def test_single_step_first_order_taylor():
    # One small step from zero: Oz(h) = h * alpha_z(0) * sigma^- + O(h^2).
    p = BathParams(0.04, 2.0, 50.0)
    h = 1e-3
    stepped = _rk4_obar_step(np.zeros((2, 2)), [SM], OBarSet.zeros(1, 2), p, h)
    az0 = correlation_alpha_z(p, 0.0)
    err = np.max(np.abs(stepped.o_z[0] - h * az0 * SM))
    assert err < abs(az0) * p.gamma * h**2  # second-order remainder bound


def test_linearized_agreement_for_small_operators():
    # With entrywise norm < 1e-6 the quadratic commutator feedback is
    # negligible: drive - gamma*O + [-iH, O] matches within 1e-10 relative.
    rng = np.random.default_rng(5)
    p = BathParams(0.04, 2.0, 50.0)
    h_sys = np.diag([0.0, 1.0]).astype(complex)
    small = 1e-6 * (rng.normal(size=(2, 2, 2)) + 1j * rng.normal(size=(2, 2, 2)))
    obars = OBarSet(small[:1], small[1:])
    full = obar_rhs(h_sys, [SM], obars, p)

    az0 = correlation_alpha_z(p, 0.0)
    aw0 = correlation_alpha_w(p, 0.0)
    lin_z = az0 * SM - p.gamma * obars.o_z[0] + (-1j) * (h_sys @ obars.o_z[0] - obars.o_z[0] @ h_sys)
    lin_w = aw0 * SP - p.gamma * obars.o_w[0] + (-1j) * (h_sys @ obars.o_w[0] - obars.o_w[0] @ h_sys)
    scale = max(np.max(np.abs(full.o_z[0])), np.max(np.abs(full.o_w[0])))
    assert np.max(np.abs(full.o_z[0] - lin_z)) / scale < 1e-10
    assert np.max(np.abs(full.o_w[0] - lin_w)) / scale < 1e-10


def test_stationary_point_of_full_nonlinear_system():
    # H = 0, time-independent coupling: long integration lands on a fixed
    # point where the full nonlinear right-hand side vanishes.  Needs
    # Gamma*T well below gamma, otherwise the fixed point loses stability.
    p = BathParams(0.02, 2.0, 10.0)
    obars = OBarSet.zeros(1, 2)
    h_sys = np.zeros((2, 2), dtype=complex)
    h = 1e-3
    for _ in range(30000):  # t = 30, i.e. gamma * t = 60
        obars = _rk4_obar_step(h_sys, [SM], obars, p, h)
    residual = obar_rhs(h_sys, [SM], obars, p)
    assert np.max(np.abs(residual.data)) < 1e-8


def test_dimension_mismatch_errors():
    p = BathParams(0.02, 1.0, 10.0)
    obars = OBarSet.zeros(2, 2)
    with pytest.raises(ValueError):
        obar_rhs(np.zeros((2, 2)), [SM], obars, p)  # 1 op for 2 baths
    with pytest.raises(ValueError):
        obar_rhs(np.zeros((4, 4)), [SM, SM], obars, p)  # H dim mismatch
    with pytest.raises(ValueError):
        obar_rhs(np.zeros((2, 2)), [np.zeros((4, 4))] * 2, obars, p)  # op dim
