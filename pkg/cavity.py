#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
微腔PDC模拟器 - DBR微腔
几何结构：薄反射镜位于 x = −d，空气隙 [−d, 0]，DBR 占据 [0, L]
左侧入射时：
  f = 1 − ρ r e^{2ik₀d},  A₂ = (τ/f)A₃,  R = −ρ + e^{2ik₀d} r τ² / f
腔模函数：
  u(x, ω) = N·(τ/f)·e^{ik₀d}·[Q(x)e^{ikx} − iκW(x)e^{−ikx}]
空气隙内使用真空波数 k₀ = ω/c，DBR 内使用介质色散 k(ω)

作者：Lxx   更新时间：2026-10-13
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.special import comb

from dbr import DbrParams, coupled_mode_fields, dbr_coefficients, _normalized_denominator
from dispersion import DispersionModel, Polarization, detuning, wavenumber
from sim_errors import DomainError, SingularityError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, complex, np.ndarray]

RESONANCE_FLOOR = 1e-300
# |g|L 低于该值（带边附近）时改用 g² 级数的多项式展开
EDGE_EXPANSION_GL = 1e-2
# 带边级数保留 g^0 … g^{2·EDGE_SERIES_ORDER}，多项式最高次为 2·EDGE_SERIES_ORDER + 1
EDGE_SERIES_ORDER = 2

NORMALIZATIONS = ("free_field", "unit")


@dataclass(frozen=True)
class MirrorParams:
    """薄反射镜：振幅反射率 ρ（右侧入射 +ρ，左侧入射 −ρ）与透射率 τ"""
    rho: float
    tau: float

    def __post_init__(self):
        if not 0 <= self.rho < 1:
            raise DomainError(f"反射镜振幅反射率ρ必须位于[0, 1)内: {self.rho}")
        if self.tau < 0 or abs(self.rho ** 2 + self.tau ** 2 - 1.0) > 1e-12:
            raise DomainError(f"反射镜参数必须满足 ρ² + τ² = 1: ρ={self.rho}, τ={self.tau}")

    @classmethod
    def from_reflectivity(cls, rho_squared: float) -> "MirrorParams":
        if not 0 <= rho_squared < 1:
            raise DomainError(f"反射镜强度反射率ρ²必须位于[0, 1)内: {rho_squared}")
        return cls(rho=math.sqrt(rho_squared), tau=math.sqrt(1.0 - rho_squared))

    @property
    def rho_squared(self) -> float:
        return self.rho ** 2


@dataclass(frozen=True)
class CavityAssembly:
    """DBR + 薄反射镜 + 空气隙"""
    dbr: DbrParams
    mirror: MirrorParams
    gap: float
    dispersion: DispersionModel
    pol: Polarization
    normalization: str = "free_field"

    def __post_init__(self):
        if not self.gap > 0:
            raise DomainError(f"空气隙长度d必须为正: {self.gap}")
        if self.normalization not in NORMALIZATIONS:
            raise DomainError(f"未知的模式归一化方式: {self.normalization}")
        object.__setattr__(self, "pol", Polarization.parse(self.pol))

    @property
    def norm_constant(self) -> float:
        """自由场归一化常数 N = (2πc)^{−1/2}，或取 1"""
        if self.normalization == "unit":
            return 1.0
        return 1.0 / math.sqrt(2.0 * math.pi * self.dispersion.speed_of_light)

    def detuning(self, omega: ArrayLike):
        return detuning(self.dispersion, self.pol, omega, self.dbr.grating_k)

    def gap_phase(self, omega: ArrayLike):
        """空气隙单程相位 e^{ik₀d}"""
        return np.exp(1j * self.dispersion.vacuum_wavenumber(omega) * self.gap)


@dataclass
class CavityResponse:
    """左侧入射的腔响应"""
    f: ArrayLike
    R: ArrayLike
    a2: ArrayLike
    r: ArrayLike
    t: ArrayLike


@dataclass
class RightIncidenceResponse:
    """右侧入射的腔响应：B(0)/B(L) = t/f，A(L) = R′B(L)，B₃ = τe^{ik₀d}B(0)"""
    b0_ratio: ArrayLike
    Rprime: ArrayLike
    b3_ratio: ArrayLike


@dataclass
class ModeExpansion:
    """腔模函数的展开 u(x) = Σ_j c_j x^{p_j} e^{β_j x}，数组形状 (n_omega, n_terms)

    远离带边时 p_j 全为 0（四个指数项）；带边附近的行用 e^{±iKx/2} 乘多项式表示。
    """
    coeffs: np.ndarray
    exponents: np.ndarray
    powers: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.powers is None:
            self.powers = np.zeros(self.coeffs.shape, dtype=int)

    @property
    def near_edge(self) -> np.ndarray:
        """各行是否使用带边多项式形式"""
        return np.any(self.powers > 0, axis=-1)

    def subset(self, rows) -> "ModeExpansion":
        """取出部分行，并去掉这些行中系数全为零的项"""
        coeffs = self.coeffs[rows]
        keep = np.any(coeffs != 0, axis=0)
        if not np.any(keep):
            keep[..., :1] = True
        return ModeExpansion(coeffs=coeffs[:, keep], exponents=self.exponents[rows][:, keep],
                             powers=self.powers[rows][:, keep])


@dataclass
class SpectrumTable:
    """反射谱扫描结果"""
    omega: np.ndarray
    k: np.ndarray
    r2: np.ndarray
    t2: np.ndarray
    R2: np.ndarray
    A2: np.ndarray

    def columns(self, names):
        return [getattr(self, n) for n in names]


def _squeeze(value):
    value = np.asarray(value)
    return complex(value) if value.ndim == 0 else value


def _resonance_denominator(assembly: CavityAssembly, r, omega):
    phase2 = assembly.gap_phase(omega) ** 2
    f = 1.0 - assembly.mirror.rho * r * phase2
    if np.any(np.abs(f) < RESONANCE_FLOOR):
        raise SingularityError("腔共振分母|f|低于下溢阈值（超共振）")
    return f, phase2


def cavity_response(assembly: CavityAssembly, omega: ArrayLike) -> CavityResponse:
    """左侧入射时的腔响应 f、R、A₂/A₃

    Args:
        assembly: 微腔
        omega: 角频率 (rad/s)，标量或数组

    Raises:
        SingularityError: |f| 低于下溢阈值
    """
    omega = np.asarray(omega, dtype=float)
    coeffs = dbr_coefficients(assembly.dbr, assembly.detuning(omega))
    r = np.asarray(coeffs.r)
    f, phase2 = _resonance_denominator(assembly, r, omega)
    rho, tau = assembly.mirror.rho, assembly.mirror.tau
    R = -rho + phase2 * r * tau ** 2 / f
    a2 = tau / f
    return CavityResponse(f=_squeeze(f), R=_squeeze(R), a2=_squeeze(a2),
                          r=_squeeze(r), t=_squeeze(coeffs.t))


def right_incidence_response(assembly: CavityAssembly, omega: ArrayLike) -> RightIncidenceResponse:
    """右侧（DBR 外侧）入射时的腔响应，用于诊断"""
    omega = np.asarray(omega, dtype=float)
    coeffs = dbr_coefficients(assembly.dbr, assembly.detuning(omega))
    r = np.asarray(coeffs.r)
    t = np.asarray(coeffs.t)
    f, phase2 = _resonance_denominator(assembly, r, omega)
    b0_ratio = t / f
    Rprime = np.asarray(coeffs.rprime) + phase2 * assembly.mirror.rho * t ** 2 / f
    b3_ratio = assembly.mirror.tau * assembly.gap_phase(omega) * b0_ratio
    return RightIncidenceResponse(b0_ratio=_squeeze(b0_ratio), Rprime=_squeeze(Rprime),
                                  b3_ratio=_squeeze(b3_ratio))


def transmitted_power(assembly: CavityAssembly, omega: ArrayLike):
    """穿过 DBR 的透射功率 |t|²|A₂|²；无损时 |R|² + |t|²|A₂|² = 1"""
    resp = cavity_response(assembly, omega)
    return np.abs(resp.t) ** 2 * np.abs(resp.a2) ** 2


def mode_function(assembly: CavityAssembly, x: ArrayLike, omega: ArrayLike):
    """非线性介质区 [0, L] 内的腔模函数 u(x, ω)

    x 与 omega 可为数组并相互广播。

    Raises:
        DomainError: x 不在 [0, L] 内
    """
    x = np.asarray(x, dtype=float)
    omega = np.asarray(omega, dtype=float)
    if np.any(x < 0) or np.any(x > assembly.dbr.length):
        raise DomainError(f"位置x必须位于[0, {assembly.dbr.length}]内")
    resp = cavity_response(assembly, omega)
    delta = assembly.detuning(omega)
    k = wavenumber(assembly.dispersion, assembly.pol, omega)
    fields = coupled_mode_fields(assembly.dbr, delta, x)
    kappa = assembly.dbr.kappa
    inner = np.asarray(fields.Q) * np.exp(1j * k * x)
    if kappa != 0:
        inner = inner - 1j * kappa * np.asarray(fields.W) * np.exp(-1j * k * x)
    pref = assembly.norm_constant * np.asarray(resp.a2) * assembly.gap_phase(omega)
    return _squeeze(pref * inner)


def _edge_polynomials(dbr: DbrParams, delta: np.ndarray, scale: np.ndarray):
    """带边行的多项式系数（按 x 的升幂），形状 (n, 2·EDGE_SERIES_ORDER + 2)

    以 y = L − x、u = g² 表示：
      Q(x)e^{ikx}      ∝ e^{iKx/2}·Σ_j u^j [2y^{2j}/(2j)! + iΔy^{2j+1}/(2j+1)!]
      −iκW(x)e^{−ikx}  ∝ e^{−iKx/2}·Σ_j u^j 2iκ y^{2j+1}/(2j+1)!
    """
    degree = 2 * EDGE_SERIES_ORDER + 1
    u = (dbr.kappa ** 2 - 0.25 * delta ** 2).astype(complex)
    forward = np.zeros(delta.shape + (degree + 1,), dtype=complex)
    backward = np.zeros_like(forward)
    for j in range(EDGE_SERIES_ORDER + 1):
        uj = u ** j
        forward[:, 2 * j] = 2.0 * uj / math.factorial(2 * j)
        odd = uj / math.factorial(2 * j + 1)
        forward[:, 2 * j + 1] = 1j * delta * odd
        backward[:, 2 * j + 1] = 2j * dbr.kappa * odd
    # (L − x)^n = Σ_p C(n, p) L^{n−p} (−x)^p
    n = np.arange(degree + 1)
    shift = (comb(n[:, None], n[None, :])
             * dbr.length ** np.clip(n[:, None] - n[None, :], 0, None)
             * (-1.0) ** n[None, :])
    return (forward @ shift) * scale[:, None], (backward @ shift) * scale[:, None]


def mode_expansion(assembly: CavityAssembly, omega: ArrayLike) -> ModeExpansion:
    """把腔模函数展开为指数项（或指数乘多项式）之和

    Q(x)e^{ikx} 的指数为 iK/2 ∓ g，−iκW(x)e^{−ikx} 的指数为 −iK/2 ∓ g，
    其中 g = √(κ² − Δ²/4)。|g|L < EDGE_EXPANSION_GL 时系数中的 1/g 会相消，
    这些行改写为 e^{±iKx/2} 乘 x 的多项式（cosh 与 sinh(gy)/g 按 g² 展开），
    项数随之变为 2·(2·EDGE_SERIES_ORDER + 2)。κ = 0 时只剩 e^{ikx} 一项。
    """
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    dbr = assembly.dbr
    L = dbr.length
    resp = cavity_response(assembly, omega)
    pref = assembly.norm_constant * np.asarray(resp.a2) * assembly.gap_phase(omega)

    if dbr.kappa == 0:
        coeffs = np.zeros(omega.shape + (4,), dtype=complex)
        exponents = np.zeros(omega.shape + (4,), dtype=complex)
        k = wavenumber(assembly.dispersion, assembly.pol, omega)
        coeffs[..., 0] = pref
        exponents[..., 0] = 1j * k
        return ModeExpansion(coeffs=coeffs, exponents=exponents)

    delta = assembly.detuning(omega)
    g = np.sqrt(dbr.kappa ** 2 - 0.25 * delta ** 2 + 0j)
    den, m = _normalized_denominator(dbr, delta, g)
    half_k = 0.5j * dbr.grating_k
    near = np.abs(g) * L < EDGE_EXPANSION_GL
    degree = 2 * EDGE_SERIES_ORDER + 1
    n_terms = 2 * (degree + 1) if np.any(near) else 4

    coeffs = np.zeros(omega.shape + (n_terms,), dtype=complex)
    exponents = np.zeros(omega.shape + (n_terms,), dtype=complex)
    powers = np.zeros(omega.shape + (n_terms,), dtype=int)

    far = ~near
    if np.any(far):
        gf, denf = g[far], den[far]
        e_plus = np.exp(gf * L - m[far])
        e_minus = np.exp(-gf * L - m[far])
        ratio = 0.5j * delta[far] / gf
        coeffs[far, :4] = pref[far, None] * np.stack([
            e_plus * (1.0 + ratio) / denf,
            e_minus * (1.0 - ratio) / denf,
            1j * dbr.kappa * e_plus / (gf * denf),
            -1j * dbr.kappa * e_minus / (gf * denf),
        ], axis=-1)
        exponents[far, :4] = np.stack([half_k - gf, half_k + gf, -half_k - gf, -half_k + gf],
                                      axis=-1)
    if np.any(near):
        scale = (pref * np.exp(-m) / den)[near]
        forward, backward = _edge_polynomials(dbr, delta[near], scale)
        coeffs[near] = np.concatenate([forward, backward], axis=-1)
        exponents[near, :degree + 1] = half_k
        exponents[near, degree + 1:] = -half_k
        powers[near] = np.tile(np.arange(degree + 1), 2)
        logger.debug("带边附近的 %d 个频率使用多项式展开", int(np.count_nonzero(near)))
    return ModeExpansion(coeffs=coeffs, exponents=exponents, powers=powers)


def evaluate_expansion(expansion: ModeExpansion, x: ArrayLike) -> np.ndarray:
    """在位置 x 处求展开式的值，结果形状 (n_omega, n_x)"""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    terms = (expansion.coeffs[..., None] * x ** expansion.powers[..., None]
             * np.exp(expansion.exponents[..., None] * x))
    return terms.sum(axis=-2)


def reflectivity_spectrum(assembly: CavityAssembly, grid) -> SpectrumTable:
    """逐频率计算 |r|²、|t|²、|R|²、|A₂|²

    Args:
        assembly: 微腔
        grid: FrequencyGrid 或升序角频率数组
    """
    omega = np.asarray(getattr(grid, "values", grid), dtype=float)
    if omega.ndim != 1 or omega.size == 0:
        raise DomainError("频率网格必须是非空一维序列")
    if omega.size > 1 and np.any(np.diff(omega) <= 0):
        raise DomainError("频率网格必须严格升序")
    resp = cavity_response(assembly, omega)
    k = wavenumber(assembly.dispersion, assembly.pol, omega)
    logger.debug("反射谱扫描完成: %d 点", omega.size)
    return SpectrumTable(
        omega=omega,
        k=np.atleast_1d(k),
        r2=np.atleast_1d(np.abs(resp.r) ** 2),
        t2=np.atleast_1d(np.abs(resp.t) ** 2),
        R2=np.atleast_1d(np.abs(resp.R) ** 2),
        A2=np.atleast_1d(np.abs(resp.a2) ** 2),
    )
