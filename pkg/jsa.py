#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
微腔PDC模拟器 - 双光子联合谱幅度 (JSA)
B(ω_s, ω_i) = √(ω_i/ω_s)/ω_s · E_p(ω_s + ω_i − 2ω₀) · ∫₀^L w(x) u_S*(x, ω_s) u_I*(x, ω_i) dx
其中泵浦模 w(x) = e^{ik_p(ω_s+ω_i)x} 只沿 +x 传播、不受 DBR 反射；
信号光只受 K_S 光栅作用，闲频光只受 K_I 光栅作用（各自独立的 DbrParams）

相位匹配积分两种算法：
  analytic   - 腔模写成四项指数和，被积函数共 16 项 a·e^{bx}，逐项解析积分（默认）
  quadrature - 复合高斯-勒让德求积，用于交叉验证与小网格

作者：Lxx   更新时间：2026-10-14
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from cavity import CavityAssembly, ModeExpansion, mode_expansion, mode_function
from dispersion import DispersionModel, Polarization, wavenumber
from quadrature import integrate_converged, panels_for_oscillation
from sim_errors import DomainError

logger = logging.getLogger(__name__)

# |bL| 低于该值时 (e^{bL} − 1)/b 用级数
EXP_SERIES_THRESHOLD = 1e-3
# ∫x^n e^{bx} 在 |bL| 低于该值时用级数，否则向上递推（n ≤ 10 时递推误差放大不超过 10!/4^10）
POWER_SERIES_RADIUS = 4.0
POWER_SERIES_TERMS = 40
# 行块大小固定，保证结果与线程数无关
ROW_BLOCK = 8

METHODS = ("analytic", "quadrature")
FILTER_SHAPES = ("rect", "lorentzian")


@dataclass(frozen=True)
class FrequencyGrid:
    """均匀角频率网格"""
    omega_min: float
    omega_max: float
    n_points: int

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise DomainError(f"网格点数必须为不小于2的整数: {self.n_points}")
        if not 0 < self.omega_min < self.omega_max:
            raise DomainError(f"网格频带无效: [{self.omega_min}, {self.omega_max}]")
        object.__setattr__(self, "n_points", int(self.n_points))

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.omega_min, self.omega_max, self.n_points)

    @property
    def spacing(self) -> float:
        return (self.omega_max - self.omega_min) / (self.n_points - 1)

    @property
    def center(self) -> float:
        return 0.5 * (self.omega_min + self.omega_max)

    def with_points(self, n_points: int) -> "FrequencyGrid":
        return replace(self, n_points=n_points)

    def to_dict(self) -> dict:
        return {"omega_min": self.omega_min, "omega_max": self.omega_max,
                "n_points": self.n_points}

    @classmethod
    def from_dict(cls, data: dict) -> "FrequencyGrid":
        return cls(float(data["omega_min"]), float(data["omega_max"]), int(data["n_points"]))


@dataclass(frozen=True)
class PumpSpectrum:
    """变换极限高斯泵浦谱 E_p = A·exp(−(ω − ω_c)²/σ²)"""
    sigma: float
    omega_center: float
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"泵浦谱宽σ必须为正: {self.sigma}")
        if not self.amplitude > 0:
            raise DomainError(f"泵浦振幅必须为正实数: {self.amplitude}")
        if not self.omega_center > 0:
            raise DomainError(f"泵浦中心频率必须为正: {self.omega_center}")

    def envelope(self, omega_sum):
        offset = np.asarray(omega_sum, dtype=float) - self.omega_center
        return self.amplitude * np.exp(-(offset / self.sigma) ** 2)


@dataclass(frozen=True)
class QuadratureSettings:
    """数值求积设置"""
    gauss_order: int = 8
    points_per_period: int = 20
    convergence_tol: float = 1e-9


@dataclass
class JsaMatrix:
    """B[m, n] = B(ω_s[m], ω_i[n])"""
    grid_s: FrequencyGrid
    grid_i: FrequencyGrid
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        expected = (self.grid_s.n_points, self.grid_i.n_points)
        if self.values.shape != expected:
            raise DomainError(f"JSA矩阵形状{self.values.shape}与网格{expected}不一致")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("JSA矩阵含有非有限元素")

    @property
    def shape(self):
        return self.values.shape

    def continuum_norm(self) -> float:
        """√(Σ|B|² Δω_s Δω_i)"""
        weight = self.grid_s.spacing * self.grid_i.spacing
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * weight))

    def scaled(self, factor: complex) -> "JsaMatrix":
        return JsaMatrix(self.grid_s, self.grid_i, self.values * factor, dict(self.metadata))


def _check_pair(sig: CavityAssembly, idl: CavityAssembly) -> None:
    if sig.dbr.length != idl.dbr.length or sig.gap != idl.gap:
        raise DomainError("信号与闲频微腔必须具有相同的光栅长度L与空气隙d")


def _exp_integral(b: np.ndarray, length: float) -> np.ndarray:
    """∫₀^L e^{bx} dx，b → 0 时用级数"""
    z = b * length
    small = np.abs(z) < EXP_SERIES_THRESHOLD
    safe_b = np.where(small, 1.0, b)
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.expm1(np.where(small, 0.0, z)) / safe_b
    if np.any(small):
        series = length * (1.0 + z / 2.0 + z * z / 6.0 + z ** 3 / 24.0 + z ** 4 / 120.0)
        out = np.where(small, series, out)
    return out


def _power_exp_integral(b: np.ndarray, n: np.ndarray, length: float) -> np.ndarray:
    """∫₀^L x^n e^{bx} dx = L^{n+1}·J_n(bL)，J_n(z) = ∫₀¹ t^n e^{zt} dt

    |z| < POWER_SERIES_RADIUS 时 J_n = Σ_k z^k / (k!(n + k + 1))，
    其余用递推 J_n = (e^z − n·J_{n−1})/z。
    """
    b, n = np.broadcast_arrays(np.asarray(b, dtype=complex), np.asarray(n, dtype=int))
    n_max = int(n.max()) if n.size else 0
    if n_max == 0:
        return _exp_integral(b, length)
    z = b * length
    small = np.abs(z) < POWER_SERIES_RADIUS
    table = np.empty((n_max + 1,) + z.shape, dtype=complex)

    safe_z = np.where(small, 1.0, z)
    with np.errstate(over="ignore", invalid="ignore"):
        ez = np.exp(safe_z)
        table[0] = np.expm1(safe_z) / safe_z
        for p in range(1, n_max + 1):
            table[p] = (ez - p * table[p - 1]) / safe_z

    if np.any(small):
        zs = z[small]
        term = np.ones_like(zs)
        series = np.zeros((n_max + 1,) + zs.shape, dtype=complex)
        for k in range(POWER_SERIES_TERMS):
            series += term / (np.arange(n_max + 1)[:, None] + k + 1.0)
            term = term * zs / (k + 1)
        table[:, small] = series

    picked = np.take_along_axis(table, n[None, ...], axis=0)[0]
    return length ** (n + 1.0) * picked


def _pump_wavenumber(pump_model: DispersionModel, omega_sum):
    return wavenumber(pump_model, Polarization.PUMP, omega_sum)


def _expansion_integral(exp_s: ModeExpansion, exp_i: ModeExpansion, k_pump: np.ndarray,
                        length: float) -> np.ndarray:
    """展开式形式的相位匹配积分

    exp_s 形状 (ns, Js)，exp_i 形状 (ni, Ji)，k_pump 形状 (ns, ni)
    """
    cs = np.conj(exp_s.coeffs)[:, None, :, None]
    ci = np.conj(exp_i.coeffs)[None, :, None, :]
    bs = np.conj(exp_s.exponents)[:, None, :, None]
    bi = np.conj(exp_i.exponents)[None, :, None, :]
    a = cs * ci
    b = 1j * k_pump[:, :, None, None] + bs + bi
    n = exp_s.powers[:, None, :, None] + exp_i.powers[None, :, None, :]
    terms = a * _power_exp_integral(b, n, length)
    return terms.reshape(terms.shape[:2] + (-1,)).sum(axis=-1)


def phase_matching_integral_analytic(sig: CavityAssembly, idl: CavityAssembly,
                                     pump_model: DispersionModel,
                                     omega_s: float, omega_i: float) -> complex:
    """相位匹配积分的逐项解析求值"""
    _check_pair(sig, idl)
    exp_s = mode_expansion(sig, omega_s)
    exp_i = mode_expansion(idl, omega_i)
    k_pump = np.atleast_2d(_pump_wavenumber(pump_model, omega_s + omega_i))
    return complex(_expansion_integral(exp_s, exp_i, k_pump, sig.dbr.length)[0, 0])


def phase_matching_integral(sig: CavityAssembly, idl: CavityAssembly,
                            pump_model: DispersionModel, omega_s: float, omega_i: float,
                            settings: QuadratureSettings = QuadratureSettings()) -> complex:
    """相位匹配积分 ∫₀^L e^{ik_p x} u_S*(x, ω_s) u_I*(x, ω_i) dx 的数值求积

    面板数按被积函数各指数项中最大的 |b| 确定。

    Raises:
        QuadratureError: 加倍面板数后结果变化超过容差
    """
    _check_pair(sig, idl)
    length = sig.dbr.length
    k_pump = _pump_wavenumber(pump_model, omega_s + omega_i)
    exp_s = mode_expansion(sig, omega_s)
    exp_i = mode_expansion(idl, omega_i)
    rates = (1j * k_pump + np.conj(exp_s.exponents[0])[:, None]
             + np.conj(exp_i.exponents[0])[None, :])
    active = (np.abs(exp_s.coeffs[0])[:, None] * np.abs(exp_i.coeffs[0])[None, :]) > 0
    max_rate = float(np.max(np.abs(rates[active]))) if np.any(active) else 0.0
    n_panels = panels_for_oscillation(max_rate, length, settings.gauss_order,
                                      settings.points_per_period)

    def integrand(x):
        us = mode_function(sig, x, omega_s)
        ui = mode_function(idl, x, omega_i)
        return np.exp(1j * k_pump * x) * np.conj(us) * np.conj(ui)

    return integrate_converged(integrand, 0.0, length, n_panels,
                               settings.gauss_order, settings.convergence_tol)


def bulk_phase_matching(model: DispersionModel, omega_s, omega_i, length: float,
                        gap: float):
    """无光栅、无反射镜时的闭式解（模式归一化取 1）

    e^{−i(ω_s+ω_i)d/c} · L·sinc(ΔkL/2)·e^{iΔkL/2}，Δk = k_p − k_s − k_i
    """
    omega_s = np.asarray(omega_s, dtype=float)
    omega_i = np.asarray(omega_i, dtype=float)
    dk = (wavenumber(model, Polarization.PUMP, omega_s + omega_i)
          - wavenumber(model, Polarization.SIGNAL, omega_s)
          - wavenumber(model, Polarization.IDLER, omega_i))
    gap_phase = np.exp(-1j * (omega_s + omega_i) * gap / model.speed_of_light)
    return gap_phase * length * np.sinc(dk * length / (2.0 * math.pi)) * np.exp(0.5j * dk * length)


def frequency_prefactor(omega_s, omega_i):
    """频率相关前置因子 √(ω_i/ω_s)/ω_s"""
    omega_s = np.asarray(omega_s, dtype=float)
    return np.sqrt(np.asarray(omega_i, dtype=float) / omega_s) / omega_s


def build_jsa(sig: CavityAssembly, idl: CavityAssembly, pump: PumpSpectrum,
              grid_s: FrequencyGrid, grid_i: FrequencyGrid, method: str = "analytic",
              settings: QuadratureSettings = QuadratureSettings(), workers: int = 1,
              progress_callback: Optional[Callable[[str], None]] = None) -> JsaMatrix:
    """在矩形频率网格上构建 JSA 矩阵

    按固定大小的行块并行计算，结果与线程数和调度顺序无关。

    Args:
        sig: 信号微腔（K_S 光栅）
        idl: 闲频微腔（K_I 光栅）
        pump: 泵浦谱
        grid_s: 信号频率网格（行）
        grid_i: 闲频频率网格（列）
        method: "analytic" 或 "quadrature"
        settings: 数值求积设置（method="quadrature" 时使用）
        workers: 线程数
        progress_callback: 进度回调，接收一条中文消息

    Returns:
        JsaMatrix
    """
    if method not in METHODS:
        raise DomainError(f"未知的相位匹配积分算法: {method}")
    _check_pair(sig, idl)
    pump_model = sig.dispersion
    ws = grid_s.values
    wi = grid_i.values
    length = sig.dbr.length
    values = np.empty((ws.size, wi.size), dtype=complex)

    if method == "analytic":
        exp_s = mode_expansion(sig, ws)
        exp_i = mode_expansion(idl, wi)
        # 带边列单独成组，其余列保持四项指数形式
        edge_cols = exp_i.near_edge
        column_groups = [(cols, exp_i.subset(cols))
                         for cols in (np.flatnonzero(~edge_cols), np.flatnonzero(edge_cols))
                         if cols.size]
        if np.any(edge_cols) or np.any(exp_s.near_edge):
            logger.debug("带边附近使用多项式展开: 信号 %d 行, 闲频 %d 列",
                         int(np.count_nonzero(exp_s.near_edge)), int(np.count_nonzero(edge_cols)))

    def compute_block(start: int) -> int:
        stop = min(start + ROW_BLOCK, ws.size)
        omega_sum = ws[start:stop, None] + wi[None, :]
        if method == "analytic":
            block_exp = exp_s.subset(slice(start, stop))
            k_pump = _pump_wavenumber(pump_model, omega_sum)
            integral = np.empty(omega_sum.shape, dtype=complex)
            for cols, group in column_groups:
                integral[:, cols] = _expansion_integral(block_exp, group, k_pump[:, cols], length)
        else:
            integral = np.empty(omega_sum.shape, dtype=complex)
            for m in range(start, stop):
                for n in range(wi.size):
                    integral[m - start, n] = phase_matching_integral(
                        sig, idl, pump_model, ws[m], wi[n], settings)
        pref = frequency_prefactor(ws[start:stop, None], wi[None, :])
        values[start:stop] = pref * pump.envelope(omega_sum) * integral
        return stop - start

    starts = list(range(0, ws.size, ROW_BLOCK))
    logger.info("开始构建JSA: %dx%d, 算法=%s, 线程数=%d", ws.size, wi.size, method, workers)
    done_rows = 0
    if workers <= 1:
        for start in starts:
            done_rows += compute_block(start)
            if progress_callback:
                progress_callback(f"JSA构建进度: {done_rows}/{ws.size} 行")
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(compute_block, s) for s in starts]
            for future in as_completed(futures):
                done_rows += future.result()
                if progress_callback:
                    progress_callback(f"JSA构建进度: {done_rows}/{ws.size} 行")

    metadata = {"method": method, "signal_pol": sig.pol.value, "idler_pol": idl.pol.value}
    return JsaMatrix(grid_s, grid_i, values, metadata)


def filter_band(jsa: JsaMatrix, side, center: float, width: float,
                shape: str = "rect") -> JsaMatrix:
    """在信号或闲频一侧施加腔外光谱滤波器

    rect: |ω − center| ≤ width/2 透过，其余置零
    lorentzian: 振幅透射 1/(1 − 2i(ω − center)/width)，强度半高全宽为 width
    """
    pol = Polarization.parse(side)
    if pol is Polarization.PUMP:
        raise DomainError("滤波只能作用于信号或闲频光")
    if not width > 0:
        raise DomainError(f"滤波器带宽必须为正: {width}")
    if shape not in FILTER_SHAPES:
        raise DomainError(f"未知的滤波器类型: {shape}")
    grid = jsa.grid_s if pol is Polarization.SIGNAL else jsa.grid_i
    offset = grid.values - center
    if shape == "rect":
        transmission = (np.abs(offset) <= 0.5 * width).astype(float)
    else:
        transmission = 1.0 / (1.0 - 2j * offset / width)
    if pol is Polarization.SIGNAL:
        values = jsa.values * transmission[:, None]
    else:
        values = jsa.values * transmission[None, :]
    metadata = dict(jsa.metadata)
    metadata["filter"] = {"side": pol.value, "center": center, "width": width, "shape": shape}
    return JsaMatrix(jsa.grid_s, jsa.grid_i, values, metadata)
