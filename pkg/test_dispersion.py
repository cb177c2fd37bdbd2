#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
测试色散模型：波数、光栅失谐与参数校验
"""

import math

import numpy as np
import pytest

from dispersion import (DispersionModel, Polarization, detuning, kappa_from_index_modulation,
                        phase_matched_grating, wavenumber)
from sim_errors import DomainError

C = 3.0e8


@pytest.fixture
def ktp():
    return DispersionModel.ktp_default(800e-9, speed_of_light=C)


def test_reference_wavenumbers(ktp):
    """参考频率处 k = n0·ω0/c"""
    w0 = ktp.omega0
    assert w0 == pytest.approx(2 * math.pi * C / 800e-9, rel=1e-15)
    assert wavenumber(ktp, Polarization.SIGNAL, w0) == pytest.approx(1.6047 * w0 / C, rel=1e-14)
    assert wavenumber(ktp, "idler", w0) == pytest.approx(1.6605 * w0 / C, rel=1e-14)
    assert wavenumber(ktp, "pump", 2 * w0) == pytest.approx(1.6326 * 2 * w0 / C, rel=1e-14)


def test_linear_in_frequency(ktp):
    w0 = ktp.omega0
    h = 1.0e12
    for pol, kprime in (("signal", 5.4212e-9), ("idler", 5.6149e-9)):
        k_minus, k_mid, k_plus = (wavenumber(ktp, pol, w) for w in (w0 - h, w0, w0 + h))
        assert k_plus - k_mid == pytest.approx(kprime * h, rel=1e-8)
        assert abs(k_plus - 2 * k_mid + k_minus) < 1e-8 * k_mid


def test_array_input_keeps_shape(ktp):
    omega = np.linspace(2.355e15, 2.357e15, 7).reshape(7, 1)
    k = wavenumber(ktp, "signal", omega)
    assert isinstance(k, np.ndarray)
    assert k.shape == (7, 1)
    assert isinstance(wavenumber(ktp, "signal", 2.356e15), float)


@pytest.mark.parametrize("omega", [0.0, -1.0e15, np.array([2.3e15, 0.0])])
def test_nonpositive_frequency_rejected(ktp, omega):
    with pytest.raises(DomainError):
        wavenumber(ktp, "signal", omega)


def test_detuning_vanishes_at_phase_matched_grating(ktp):
    for pol in (Polarization.SIGNAL, Polarization.IDLER):
        K = phase_matched_grating(ktp, pol)
        assert detuning(ktp, pol, ktp.omega0, K) == 0.0


def test_detuning_slope(ktp):
    """Δ(ω0 + δ) = −2k′δ"""
    K = phase_matched_grating(ktp, "signal")
    delta = detuning(ktp, "signal", ktp.omega0 + 1.0e11, K)
    assert delta == pytest.approx(-2 * 5.4212e-9 * 1.0e11, rel=1e-6)


def test_bragg_condition_from_wavelength(ktp):
    """K = 4πn_S/λ 时参考频率处失谐为零"""
    K = 4 * math.pi * 1.6047 / 800e-9
    assert abs(detuning(ktp, "signal", ktp.omega0, K)) <= 1e-8 * K


def test_nonpositive_grating_rejected(ktp):
    with pytest.raises(DomainError):
        detuning(ktp, "signal", ktp.omega0, 0.0)


def test_vacuum_model_is_free_space():
    model = DispersionModel.vacuum(800e-9, speed_of_light=C)
    omega = np.array([2.3550e15, 2.3562e15, 2.3575e15])
    np.testing.assert_allclose(wavenumber(model, "signal", omega), omega / C, rtol=1e-14)
    np.testing.assert_allclose(model.vacuum_wavenumber(omega), omega / C, rtol=0)


def test_wavelength_conversions(ktp):
    assert ktp.wavelength_from_omega(ktp.omega0) == pytest.approx(800e-9, rel=1e-15)
    assert ktp.omega_from_wavelength(400e-9) == pytest.approx(2 * ktp.omega0, rel=1e-15)


def test_constants_table_override():
    model = DispersionModel.ktp_default(800e-9, C, {"signal": {"n0": 1.7}})
    assert model.signal.n0 == 1.7
    assert model.idler.n0 == 1.6605


@pytest.mark.parametrize("table", [
    {"signal": {"n0": 1.0}},
    {"idler": {"n0": 0.9}},
    {"pump": {"kprime": -1.0e-9}},
])
def test_invalid_model_rejected(table):
    with pytest.raises(DomainError):
        DispersionModel.ktp_default(800e-9, C, table)


def test_pump_reference_must_be_doubled(ktp):
    from dataclasses import replace
    from dispersion import DispersionLaw

    with pytest.raises(DomainError):
        replace(ktp, pump=DispersionLaw(1.6326, 5.6949e-9, ktp.omega0))


def test_polarization_parse():
    assert Polarization.parse("Signal") is Polarization.SIGNAL
    assert Polarization.parse(Polarization.IDLER) is Polarization.IDLER
    assert Polarization.SIGNAL.is_extraordinary
    assert not Polarization.IDLER.is_extraordinary
    with pytest.raises(DomainError):
        Polarization.parse("te")


def test_kappa_from_index_modulation():
    assert kappa_from_index_modulation(1e-4, 2.0e7) == pytest.approx(1.0e3)
    assert kappa_from_index_modulation(0.0, 2.0e7) == 0.0
    with pytest.raises(DomainError):
        kappa_from_index_modulation(-1e-4, 2.0e7)
