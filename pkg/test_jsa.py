#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
测试联合谱幅度：体晶体极限、解析/求积一致性、确定性与联合谱形状
"""

import math

import numpy as np
import pytest

from cavity import CavityAssembly, MirrorParams
from dbr import DbrParams
from dispersion import DispersionModel, Polarization, phase_matched_grating
from jsa import (FrequencyGrid, JsaMatrix, PumpSpectrum, QuadratureSettings, _exp_integral,
                 _power_exp_integral, build_jsa, bulk_phase_matching, filter_band,
                 frequency_prefactor, phase_matching_integral, phase_matching_integral_analytic)
from quadrature import composite_rule, integrate_converged, panels_for_oscillation
from scenario_config import load_scenario
from sim_errors import DomainError, QuadratureError

C = 3.0e8
L = 4e-3
GAP = 0.1999e-3


def _pair(kappa=0.0, rho_squared=0.0, model=None, normalization="unit", length=L, gap=GAP):
    model = model or DispersionModel.ktp_default(800e-9, speed_of_light=C)
    mirror = MirrorParams.from_reflectivity(rho_squared)
    return tuple(
        CavityAssembly(DbrParams(kappa, length, phase_matched_grating(model, pol)), mirror, gap,
                       model, pol, normalization)
        for pol in (Polarization.SIGNAL, Polarization.IDLER))


@pytest.fixture(scope="module")
def default_config():
    return load_scenario()


def test_frequency_grid():
    grid = FrequencyGrid(2.3552e15, 2.3572e15, 297)
    assert grid.values[0] == 2.3552e15
    assert grid.values[-1] == 2.3572e15
    assert grid.spacing == pytest.approx(2e12 / 296)
    assert grid.with_points(11).n_points == 11
    assert FrequencyGrid.from_dict(grid.to_dict()) == grid
    for args in ((1.0, 2.0, 1), (2.0, 1.0, 5), (0.0, 1.0, 5), (1.0, 2.0, 2.5)):
        with pytest.raises(DomainError):
            FrequencyGrid(*args)


def test_pump_envelope():
    pump = PumpSpectrum(sigma=3e11, omega_center=4.7e15, amplitude=2.0)
    assert pump.envelope(4.7e15) == 2.0
    assert pump.envelope(4.7e15 + 3e11) == pytest.approx(2.0 / math.e, rel=1e-14)
    wide = PumpSpectrum(sigma=3e12, omega_center=4.7e15)
    assert wide.envelope(4.7e15 + 3e12) == pytest.approx(1.0 / math.e, rel=1e-14)
    for kwargs in ({"sigma": 0.0, "omega_center": 1.0}, {"sigma": 1.0, "omega_center": 1.0,
                                                          "amplitude": -1.0}):
        with pytest.raises(DomainError):
            PumpSpectrum(**kwargs)


def test_exp_integral_small_and_zero_rate():
    assert _exp_integral(np.array([0j]), L)[0] == L
    b = np.array([1e-9 + 0j, 1e-4 / L + 0j, 2e-3 / L + 0j])
    exact = np.expm1(b * L) / b
    np.testing.assert_allclose(_exp_integral(b, L), exact, rtol=1e-14)


def test_bulk_limit_matches_sinc():
    sig, idl = _pair()
    model = sig.dispersion
    rng = np.random.default_rng(3)
    for ws, wi in rng.uniform(2.3552e15, 2.3572e15, size=(16, 2)):
        got = phase_matching_integral_analytic(sig, idl, model, ws, wi)
        expected = complex(bulk_phase_matching(model, ws, wi, L, GAP))
        assert abs(got - expected) <= 1e-10 * L


def test_vacuum_phase_matching_is_full_length():
    """折射率为 1 时 Δk ≡ 0，|积分| = L"""
    model = DispersionModel.vacuum(800e-9, speed_of_light=C)
    sig, idl = _pair(model=model)
    value = phase_matching_integral_analytic(sig, idl, model, 2.3555e15, 2.3569e15)
    assert abs(abs(value) - L) <= 1e-12 * L


def _sinc_null_frequency(model):
    """简并时 ΔkL = 2π 的频率（线性色散下 Δk 随 ω 线性变化）"""
    slope = 2 * model.pump.kprime - model.signal.kprime - model.idler.kprime
    dk0 = (2 * model.pump.n0 - model.signal.n0 - model.idler.n0) * model.omega0 / model.speed_of_light
    return model.omega0 + (2 * math.pi / L - dk0) / slope


def test_sinc_null():
    sig, idl = _pair()
    model = sig.dispersion
    omega = _sinc_null_frequency(model)
    assert abs(bulk_phase_matching(model, omega, omega, L, GAP)) <= 1e-9 * L
    assert abs(phase_matching_integral_analytic(sig, idl, model, omega, omega)) <= 1e-9 * L
    settings = QuadratureSettings(gauss_order=8, points_per_period=4, convergence_tol=1e-9)
    assert abs(phase_matching_integral(sig, idl, model, omega, omega, settings)) <= 1e-9 * L


def _band_edges(assembly):
    """禁带边缘 |Δ| = 2κ 对应的两个频率（线性色散）"""
    model = assembly.dispersion
    law = model.signal if assembly.pol is Polarization.SIGNAL else model.idler
    half_width = assembly.dbr.kappa / law.kprime
    return model.omega0 - half_width, model.omega0 + half_width


def test_quadrature_agrees_with_analytic(default_config):
    sig, idl = default_config.assemblies()
    model = sig.dispersion
    settings = default_config.quadrature()
    grid = default_config.grid().values
    rng = np.random.default_rng(11)
    pairs = [tuple(p) for p in rng.choice(grid, size=(14, 2))]
    pairs += [(_band_edges(sig)[1], grid[len(grid) // 2]), (grid[0], _band_edges(idl)[0])]
    assert len(pairs) == 16
    for ws, wi in pairs:
        analytic = phase_matching_integral_analytic(sig, idl, model, ws, wi)
        numeric = phase_matching_integral(sig, idl, model, ws, wi, settings)
        assert abs(numeric - analytic) <= 1e-8 * max(abs(analytic), 1e-30)


def test_band_edge_analytic_matches_quadrature(default_config):
    """两路频率落在禁带边缘（|g|L 从 1e-5 到 1e-3 量级）时解析积分仍与求积一致"""
    sig, idl = default_config.assemblies()
    model = sig.dispersion
    w0 = model.omega0
    settings = default_config.quadrature()
    s_low, s_high = _band_edges(sig)
    i_low, i_high = _band_edges(idl)
    pairs = [(w0, i_high), (w0 + 3e11, i_high), (s_high, w0), (s_low, i_low),
             (s_high, i_low), (w0, i_high + 3e3), (s_low - 3e3, w0 - 2e11)]
    for ws, wi in pairs:
        analytic = phase_matching_integral_analytic(sig, idl, model, ws, wi)
        numeric = phase_matching_integral(sig, idl, model, ws, wi, settings)
        assert abs(numeric - analytic) <= 1e-8 * abs(analytic)


def test_power_exp_integral_matches_gauss_legendre():
    """级数区与递推区（|bL| 在 4 附近切换）都与高阶高斯求积一致"""
    nodes, weights = np.polynomial.legendre.leggauss(80)
    x = 0.5 * L * (nodes + 1.0)
    w = 0.5 * L * weights
    z = np.array([0.0, 1e-4, 0.5j, -2.0 + 1.0j, 3.99j, 4.01j, -3.99, 4.01, 9.0 - 6.0j,
                  -16.0 + 2.0j, 16.0, 40.0j])
    b = z / L
    for n in range(11):
        got = _power_exp_integral(b, np.full(b.shape, n), L)
        expected = np.array([np.sum(w * x ** n * np.exp(bj * x)) for bj in b])
        np.testing.assert_allclose(got, expected, rtol=1e-11)
    assert _power_exp_integral(np.array([0j]), np.array([3]), L)[0] == pytest.approx(L ** 4 / 4,
                                                                                   rel=1e-14)


def test_quadrature_detects_nonconvergence():
    def wild(x):
        return np.exp(1j * 1e6 * x)

    with pytest.raises(QuadratureError):
        integrate_converged(wild, 0.0, 1.0, 1, order=2, tol=1e-12)


def test_composite_rule_integrates_polynomials():
    nodes, weights = composite_rule(0.0, 2.0, 3, 4)
    assert nodes.size == 12
    assert np.dot(weights, nodes ** 5) == pytest.approx(2.0 ** 6 / 6, rel=1e-13)
    assert panels_for_oscillation(2 * math.pi, 10.0, 8, 20) == 25
    with pytest.raises(DomainError):
        composite_rule(0.0, 1.0, 0)


def test_mismatched_lengths_rejected():
    sig, _ = _pair()
    _, idl = _pair(length=3e-3)
    with pytest.raises(DomainError):
        phase_matching_integral_analytic(sig, idl, sig.dispersion, 2.356e15, 2.356e15)
    _, idl_gap = _pair(gap=0.2e-3)
    with pytest.raises(DomainError):
        phase_matching_integral_analytic(sig, idl_gap, sig.dispersion, 2.356e15, 2.356e15)


def _small_build(config, n=24, amplitude=1.0, workers=1, method="analytic"):
    sig, idl = config.assemblies()
    grid = config.grid().with_points(n)
    pump = PumpSpectrum(config.pump().sigma, config.pump().omega_center, amplitude)
    return build_jsa(sig, idl, pump, grid, grid, method=method, workers=workers)


def test_linear_in_pump_amplitude(default_config):
    base = _small_build(default_config)
    doubled = _small_build(default_config, amplitude=2.0)
    np.testing.assert_array_equal(doubled.values, 2.0 * base.values)


def test_build_independent_of_worker_count(default_config):
    serial = _small_build(default_config, n=37)
    threaded = _small_build(default_config, n=37, workers=3)
    np.testing.assert_array_equal(serial.values, threaded.values)
    assert serial.metadata == threaded.metadata


def test_progress_callback_reaches_all_rows(default_config):
    sig, idl = default_config.assemblies()
    grid = default_config.grid().with_points(20)
    messages = []
    build_jsa(sig, idl, default_config.pump(), grid, grid, progress_callback=messages.append)
    assert messages[-1].endswith("20/20 行")


def test_build_rejects_unknown_method(default_config):
    sig, idl = default_config.assemblies()
    grid = default_config.grid().with_points(4)
    with pytest.raises(DomainError):
        build_jsa(sig, idl, default_config.pump(), grid, grid, method="simpson")


def test_bulk_build_matches_oracle():
    sig, idl = _pair()
    model = sig.dispersion
    grid = FrequencyGrid(2.3552e15, 2.3572e15, 31)
    pump = PumpSpectrum(sigma=3e11, omega_center=2 * model.omega0)
    jsa = build_jsa(sig, idl, pump, grid, grid)
    ws, wi = np.meshgrid(grid.values, grid.values, indexing="ij")
    expected = (frequency_prefactor(ws, wi) * pump.envelope(ws + wi)
                * bulk_phase_matching(model, ws, wi, L, GAP))
    scale = np.max(np.abs(expected))
    assert np.max(np.abs(jsa.values - expected)) <= 1e-10 * scale


def test_halving_quadrature_step_leaves_norm_unchanged(default_config):
    sig, idl = default_config.assemblies()
    grid = default_config.grid().with_points(4)
    pump = default_config.pump()
    coarse = QuadratureSettings(points_per_period=20)
    fine = QuadratureSettings(points_per_period=40)
    first = build_jsa(sig, idl, pump, grid, grid, method="quadrature", settings=coarse)
    second = build_jsa(sig, idl, pump, grid, grid, method="quadrature", settings=fine)
    norm = np.linalg.norm(first.values)
    assert norm > 0
    assert abs(np.linalg.norm(second.values) - norm) <= 1e-6 * norm


def _sum_frequency_width(jsa, omega0):
    """沿 ω_s = ω_i 对角线，|B|² 关于 ω_s + ω_i − 2ω₀ 的均方根宽度"""
    offset = 2.0 * (jsa.grid_s.values - omega0)
    weight = np.abs(np.diag(jsa.values)) ** 2
    mean = np.sum(weight * offset) / np.sum(weight)
    return math.sqrt(np.sum(weight * (offset - mean) ** 2) / np.sum(weight))


def test_bulk_ridge_width_scales_with_pump_bandwidth():
    """无光栅无腔镜：泵浦谱宽 ×10，反对角脊沿 ω_s + ω_i 方向的宽度也 ×10"""
    config = load_scenario("bulk_crystal")
    sig, idl = config.assemblies()
    w0 = sig.dispersion.omega0
    grid = FrequencyGrid(w0 - 6e11, w0 + 6e11, 241)
    widths = []
    for sigma in (3e10, 3e11):
        pump = PumpSpectrum(sigma=sigma, omega_center=2 * w0)
        widths.append(_sum_frequency_width(build_jsa(sig, idl, pump, grid, grid), w0))
    assert widths[0] == pytest.approx(0.5 * 3e10, rel=0.02)
    assert widths[1] / widths[0] == pytest.approx(10.0, rel=0.02)


def test_narrow_pump_confines_to_antidiagonal(default_config):
    sig, idl = default_config.assemblies()
    w0 = sig.dispersion.omega0
    grid = FrequencyGrid(w0 - 1e12, w0 + 1e12, 41)
    pump = PumpSpectrum(sigma=1e9, omega_center=2 * w0)
    jsa = build_jsa(sig, idl, pump, grid, grid)
    m, n = np.nonzero(jsa.values)
    assert m.size > 0
    assert np.all(m + n == 40)


def test_cross_structure_at_stop_band_center(default_config):
    """ρ² = 0.95：最大值位于禁带中心附近，过最大值的行与列明显高于非脊区"""
    config = default_config.with_overrides(["grid.n_points=297"])
    sig, idl = config.assemblies()
    grid = config.grid()
    jsa = build_jsa(sig, idl, config.pump(), grid, grid)
    amp = np.abs(jsa.values)
    m, n = np.unravel_index(np.argmax(amp), amp.shape)
    w0 = sig.dispersion.omega0
    assert abs(grid.values[m] - w0) <= 2 * grid.spacing
    assert abs(grid.values[n] - w0) <= 2 * grid.spacing

    off_ridge = np.ones_like(amp, dtype=bool)
    off_ridge[max(m - 2, 0):m + 3, :] = False
    off_ridge[:, max(n - 2, 0):n + 3] = False
    median = float(np.median(amp[off_ridge]))
    assert amp[m, :].mean() > 5 * median
    assert amp[:, n].mean() > 5 * median


def test_jsa_matrix_validation():
    grid = FrequencyGrid(1.0, 2.0, 3)
    with pytest.raises(DomainError):
        JsaMatrix(grid, grid, np.zeros((3, 4)))
    with pytest.raises(DomainError):
        JsaMatrix(grid, grid, np.full((3, 3), np.nan))
    jsa = JsaMatrix(grid, grid, np.ones((3, 3)))
    assert jsa.continuum_norm() == pytest.approx(1.5)
    assert jsa.scaled(2j).values[0, 0] == 2j


def test_filter_band():
    grid = FrequencyGrid(1.0, 2.0, 11)
    jsa = JsaMatrix(grid, grid, np.ones((11, 11)))
    rect = filter_band(jsa, "idler", 1.5, 0.25)
    assert np.count_nonzero(rect.values[0]) == 3
    assert np.all(rect.values[:, 5] == 1)
    assert rect.metadata["filter"]["side"] == "idler"

    lorentz = filter_band(jsa, "signal", 1.5, 0.2, shape="lorentzian")
    assert lorentz.values[5, 0] == pytest.approx(1.0)
    assert abs(lorentz.values[6, 0]) ** 2 == pytest.approx(0.5)

    for args in (("pump", 1.5, 0.2), ("idler", 1.5, 0.0)):
        with pytest.raises(DomainError):
            filter_band(jsa, *args)
    with pytest.raises(DomainError):
        filter_band(jsa, "idler", 1.5, 0.2, shape="gauss")
