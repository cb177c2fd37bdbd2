#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
测试Schmidt分解：SVD与约化密度矩阵一致性、纠缠度量、时域波包与本征值表趋势
"""

import math

import numpy as np
import pytest

from jsa import FrequencyGrid, JsaMatrix
from scenario_config import load_scenario
from schmidt import (SchmidtSpectrum, default_time_grid, density_eigenvalues, metrics,
                     metrics_from_lambdas, mode_band_weight, reconstruct, reduced_density,
                     schmidt_decompose, temporal_mode)
from sim_errors import DomainError
from simulation_runner import analyze, compute_jsa, signal_stop_band


def _random_jsa(n, seed=0, spacing=1.0):
    rng = np.random.default_rng(seed)
    grid = FrequencyGrid(10.0, 10.0 + spacing * (n - 1), n)
    values = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return JsaMatrix(grid, grid, values)


def test_rank_one_matrix_is_pure():
    grid = FrequencyGrid(1.0, 2.0, 40)
    x = grid.values
    values = np.outer(np.exp(-(x - 1.4) ** 2 * 30), np.exp(-(x - 1.6) ** 2 * 20) * (1 + 0.5j))
    spectrum = schmidt_decompose(JsaMatrix(grid, grid, values))
    assert spectrum.n_modes == 1
    assert spectrum.lambdas[0] == pytest.approx(1.0, abs=1e-12)
    m = metrics(spectrum)
    assert m.entropy_S == pytest.approx(0.0, abs=1e-10)
    assert m.cooperativity_K == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("n", [8, 32, 64])
def test_svd_matches_density_eigenvalues(n):
    jsa = _random_jsa(n, seed=n, spacing=0.37)
    spectrum = schmidt_decompose(jsa, truncation=0.0)
    for side in ("signal", "idler"):
        eig = density_eigenvalues(reduced_density(jsa, side))
        np.testing.assert_allclose(spectrum.lambdas, eig, atol=1e-10)
    assert abs(spectrum.lambdas.sum() - 1.0) <= 1e-12
    assert np.all(np.diff(spectrum.lambdas) <= 0)


def test_reduced_density_is_unit_trace_hermitian():
    jsa = _random_jsa(16, seed=5)
    for side in ("signal", "idler"):
        rho = reduced_density(jsa, side)
        np.testing.assert_allclose(rho, rho.conj().T, atol=0)
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-13)
    with pytest.raises(DomainError):
        reduced_density(jsa, "pump")


def test_modes_are_orthonormal():
    jsa = _random_jsa(24, seed=11, spacing=0.25)
    spectrum = schmidt_decompose(jsa, truncation=0.0)
    dw = jsa.grid_s.spacing
    gram_s = spectrum.psi.conj() @ spectrum.psi.T * dw
    gram_i = spectrum.phi.conj() @ spectrum.phi.T * dw
    np.testing.assert_allclose(gram_s, np.eye(24), atol=1e-10)
    np.testing.assert_allclose(gram_i, np.eye(24), atol=1e-10)


def test_reconstruction():
    jsa = _random_jsa(32, seed=2)
    spectrum = schmidt_decompose(jsa, truncation=0.0)
    target = jsa.values / jsa.continuum_norm()
    assert np.linalg.norm(reconstruct(spectrum) - target) < 1e-10


def test_phase_convention():
    spectrum = schmidt_decompose(_random_jsa(20, seed=4), truncation=0.0)
    for psi in spectrum.psi:
        top = psi[np.argmax(np.abs(psi))]
        assert top.imag == 0.0
        assert top.real > 0


def test_global_phase_invariance():
    jsa = _random_jsa(30, seed=9)
    base = schmidt_decompose(jsa, truncation=0.0)
    flipped = schmidt_decompose(jsa.scaled(-1.0), truncation=0.0)
    np.testing.assert_array_equal(base.lambdas, flipped.lambdas)
    assert metrics(base) == metrics(flipped)

    rotated = schmidt_decompose(jsa.scaled(np.exp(0.7j)), truncation=0.0)
    np.testing.assert_allclose(rotated.lambdas, base.lambdas, atol=1e-12)
    np.testing.assert_allclose(np.abs(rotated.psi), np.abs(base.psi), atol=1e-9)


def test_zero_matrix_rejected():
    grid = FrequencyGrid(1.0, 2.0, 5)
    with pytest.raises(DomainError):
        schmidt_decompose(JsaMatrix(grid, grid, np.zeros((5, 5))))


def test_truncation_records_discarded_weight():
    grid = FrequencyGrid(1.0, 2.0, 3)
    values = np.diag([1.0, 1e-5, 0.0])
    spectrum = schmidt_decompose(JsaMatrix(grid, grid, values), truncation=1e-8)
    assert spectrum.n_modes == 1
    assert spectrum.discarded_weight == pytest.approx(1e-10 / (1 + 1e-10), rel=1e-9)
    with pytest.raises(DomainError):
        spectrum.mode(1)


def test_metrics_reference_values():
    pure = metrics_from_lambdas([1.0])
    assert (pure.entropy_S, pure.purity_p, pure.cooperativity_K) == (0.0, 1.0, 1.0)
    half = metrics_from_lambdas([0.5, 0.5])
    assert half.entropy_S == pytest.approx(1.0, abs=1e-15)
    assert half.cooperativity_K == pytest.approx(2.0, abs=1e-15)

    row = metrics_from_lambdas([0.951, 0.0196, 0.0196, 0.0044, 0.0044])
    assert row.purity_p == pytest.approx(0.905208, abs=1e-6)
    assert row.cooperativity_K == pytest.approx(1.10472, abs=1e-5)
    assert row.entropy_S == pytest.approx(0.3602, abs=1e-3)
    assert set(row.to_dict()) == {"entropy_S", "purity_p", "cooperativity_K"}


def test_purity_times_cooperativity():
    rng = np.random.default_rng(21)
    for _ in range(20):
        lam = rng.random(rng.integers(1, 30))
        lam /= lam.sum()
        m = metrics_from_lambdas(lam)
        assert abs(m.purity_p * m.cooperativity_K - 1.0) <= 4.5e-16
        assert (m.entropy_S == 0.0) == (m.cooperativity_K == 1.0)


def _single_mode_spectrum(grid, psi):
    return SchmidtSpectrum(lambdas=np.array([1.0]), psi=psi[None, :], phi=psi[None, :],
                           grid_s=grid, grid_i=grid)


def test_temporal_mode_of_spike():
    """单点频谱：|v(t)| 为常数，相位线性"""
    grid = FrequencyGrid(10.0, 20.0, 101)
    psi = np.zeros(101, dtype=complex)
    psi[40] = 1.0
    spectrum = _single_mode_spectrum(grid, psi)
    t, v = temporal_mode(spectrum, 0, normalize=False)
    expected_abs = grid.spacing / math.sqrt(2 * math.pi)
    np.testing.assert_allclose(np.abs(v), expected_abs, rtol=1e-12)
    dt = t[1] - t[0]
    step = np.exp(-1j * grid.values[40] * dt)
    np.testing.assert_allclose(v[1:] / v[:-1], step, atol=1e-9)


def test_temporal_mode_of_lorentzian():
    """洛伦兹谱 1/(γ − i(ω − ω_c)) 对应 t > 0 的指数衰减 e^{−γt}"""
    gamma = 1.0
    center = 500.0
    n = 8001
    grid = FrequencyGrid(center - 400 * gamma, center + 400 * gamma, n)
    assert grid.spacing == pytest.approx(gamma / 10)
    psi = 1.0 / (gamma - 1j * (grid.values - center))
    spectrum = _single_mode_spectrum(grid, psi)
    t = np.linspace(0.5 / gamma, 3.5 / gamma, 31)
    _, v = temporal_mode(spectrum, 0, time_grid=t, normalize=False)
    ratio = np.abs(v) / np.abs(v[0])
    expected = np.exp(-gamma * (t - t[0]))
    mask = t <= 3.0 / gamma
    np.testing.assert_allclose(ratio[mask], expected[mask], rtol=0.05)


def test_temporal_parseval():
    grid = FrequencyGrid(100.0, 163.0, 64)
    rng = np.random.default_rng(8)
    psi = rng.normal(size=64) + 1j * rng.normal(size=64)
    spectrum = _single_mode_spectrum(grid, psi)
    t, v = temporal_mode(spectrum, 0, normalize=False)
    assert t.size == 64
    assert t[1] - t[0] == pytest.approx(2 * math.pi / (64 * grid.spacing))
    time_energy = np.sum(np.abs(v) ** 2) * (t[1] - t[0])
    freq_energy = np.sum(np.abs(psi) ** 2) * grid.spacing
    assert time_energy == pytest.approx(freq_energy, rel=1e-10)

    _, normed = temporal_mode(spectrum, 0)
    assert np.sum(np.abs(normed) ** 2) * (t[1] - t[0]) == pytest.approx(1.0, rel=1e-12)


def test_default_time_grid_centred():
    grid = FrequencyGrid(1.0, 2.0, 11)
    t = default_time_grid(grid)
    assert t.size == 11
    assert t[5] == 0.0


def test_temporal_mode_index_checked():
    spectrum = schmidt_decompose(_random_jsa(6, seed=1), truncation=0.0)
    with pytest.raises(DomainError):
        temporal_mode(spectrum, 6)
    with pytest.raises(DomainError):
        temporal_mode(spectrum, -1)


def test_mode_band_weight():
    grid = FrequencyGrid(1.0, 2.0, 4)
    psi = np.array([1.0, 1.0, 0.0, 0.0], dtype=complex)
    spectrum = _single_mode_spectrum(grid, psi)
    assert mode_band_weight(spectrum, 0, [True, False, False, False]) == pytest.approx(0.5)
    assert mode_band_weight(spectrum, 0, [False, False, True, True]) == 0.0
    with pytest.raises(DomainError):
        mode_band_weight(spectrum, 0, [True, False])


def _lambdas(rho_squared, n_points):
    config = load_scenario(overrides=[f"mirror.rho_squared={rho_squared}",
                                      f"grid.n_points={n_points}"])
    return analyze(config, compute_jsa(config))


def test_higher_mirror_reflectivity_purifies():
    """ρ² 增大时 λ₁ 增大、K 减小"""
    low = _lambdas(0.95, 297)
    high = _lambdas(0.99, 297)
    assert low.lambdas[0] > 0.9
    assert high.lambdas[0] > low.lambdas[0]
    assert metrics(high).cooperativity_K < metrics(low).cooperativity_K
    assert metrics(low).cooperativity_K > 1.0


@pytest.mark.slow
@pytest.mark.parametrize("rho_squared,lambda_1,tol", [(0.95, 0.951, 0.03), (0.99, 0.998, 0.005)])
def test_eigenvalue_table(rho_squared, lambda_1, tol):
    spectrum = _lambdas(rho_squared, 1191)
    lam = spectrum.lambdas
    assert lam[0] == pytest.approx(lambda_1, abs=tol)
    if rho_squared == 0.95:
        assert lam[1] == pytest.approx(lam[2], rel=0.1)
        assert lam[3] == pytest.approx(lam[4], rel=0.1)


@pytest.mark.slow
def test_grid_refinement_converges():
    coarse = _lambdas(0.95, 595).lambdas[0]
    fine = _lambdas(0.95, 1191).lambdas[0]
    assert abs(coarse - fine) < 0.01


@pytest.mark.slow
def test_mode_weights_relative_to_stop_band():
    config = load_scenario(overrides=["grid.n_points=1191"])
    spectrum = analyze(config, compute_jsa(config))
    mask = signal_stop_band(config, spectrum)
    assert mode_band_weight(spectrum, 0, mask) > 0.9
    for j in (1, 2, 3):
        assert mode_band_weight(spectrum, j, mask) < 0.5
