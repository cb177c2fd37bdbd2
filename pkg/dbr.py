#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
微腔PDC模拟器 - 分布布拉格反射镜（DBR）耦合模解
光栅 ε(x) = 1 + Δε cos(Kx) 占据 [0, L]，前向/后向包络满足
  A′ = iκ B e^{iΔx},  B′ = −iκ A e^{−iΔx}
其解写作
  A(x) = Q(x)A(0) + iκP(x)B(L)e^{iΔL}
  B(x) = −iκW(x)A(0) + V(x)B(L)

实现说明：
  - 以 g = S/2 = √(κ² − Δ²/4) 改写为双曲函数形式，只出现 cosh 和 sinh(z)/z，
    两者都是 g 的偶函数，因此与平方根分支无关
  - 分子分母同乘 e^{−|Re g|L}，κL 很大时也不会溢出
  - |z| 很小（禁带边缘 S → 0）时改用泰勒级数

作者：Lxx   更新时间：2026-10-12
"""

import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

from sim_errors import DomainError, SingularityError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, complex, np.ndarray]

# |z| 低于该值时 cosh、sinh(z)/z 用级数求值
SERIES_THRESHOLD = 1e-3
# 归一化分母的下溢阈值
DENOMINATOR_FLOOR = 1e-300


@dataclass(frozen=True)
class DbrParams:
    """光栅参数：耦合常数 κ (1/m)、长度 L (m)、空间频率 K (rad/m)"""
    kappa: float
    length: float
    grating_k: float

    def __post_init__(self):
        if not self.kappa >= 0:
            raise DomainError(f"耦合常数κ不能为负: {self.kappa}")
        if not self.length > 0:
            raise DomainError(f"光栅长度L必须为正: {self.length}")
        if not self.grating_k > 0:
            raise DomainError(f"光栅空间频率K必须为正: {self.grating_k}")

    @property
    def kappa_length(self) -> float:
        return self.kappa * self.length


@dataclass
class CoupledModeFields:
    """位置 x 处的耦合模函数 Q, P, V, W 及辅助量 S, D"""
    Q: ArrayLike
    P: ArrayLike
    V: ArrayLike
    W: ArrayLike
    S: ArrayLike
    D: ArrayLike


@dataclass(frozen=True)
class DbrCoefficients:
    """DBR 的振幅反射/透射系数（左入射 r, t；右入射 r′, t′）"""
    r: ArrayLike
    t: ArrayLike
    rprime: ArrayLike
    tprime: ArrayLike

    @property
    def reflectivity(self):
        return np.abs(self.r) ** 2

    @property
    def transmissivity(self):
        return np.abs(self.t) ** 2


def _scaled_cosh_shc(z: np.ndarray, m: np.ndarray):
    """返回 cosh(z)·e^{−m} 与 [sinh(z)/z]·e^{−m}"""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < SERIES_THRESHOLD
    safe_z = np.where(small, 1.0, z)
    with np.errstate(over="ignore", invalid="ignore"):
        ep = np.exp(safe_z - m)
        em = np.exp(-safe_z - m)
        ch = 0.5 * (ep + em)
        sh = 0.5 * (ep - em) / safe_z
    if np.any(small):
        z2 = z * z
        scale = np.exp(-m)
        ch_series = (1.0 + z2 / 2.0 + z2 * z2 / 24.0 + z2 * z2 * z2 / 720.0) * scale
        sh_series = (1.0 + z2 / 6.0 + z2 * z2 / 120.0 + z2 * z2 * z2 / 5040.0) * scale
        ch = np.where(small, ch_series, ch)
        sh = np.where(small, sh_series, sh)
    return ch, sh


def _as_output(value):
    value = np.asarray(value)
    return complex(value) if value.ndim == 0 else value


def _check_positions(params: DbrParams, x: np.ndarray) -> None:
    if np.any(x < 0) or np.any(x > params.length):
        raise DomainError(f"位置x必须位于[0, {params.length}]内")


def _normalized_denominator(params: DbrParams, delta: np.ndarray, g: np.ndarray):
    """返回 (den·e^{−m}, m)，其中 den = 2cosh(gL) + iΔL·sinh(gL)/(gL)"""
    L = params.length
    m = np.abs(g.real) * L
    ch, sh = _scaled_cosh_shc(g * L, m)
    den = 2.0 * ch + 1j * delta * L * sh
    if np.any(np.abs(den) < DENOMINATOR_FLOOR):
        raise SingularityError("DBR分母D低于下溢阈值")
    return den, m


def fields_for_root(params: DbrParams, delta: ArrayLike, x: ArrayLike,
                    s: ArrayLike) -> CoupledModeFields:
    """用给定的 S（任一平方根分支）计算耦合模函数

    Args:
        params: 光栅参数
        delta: 失谐量 Δ (rad/m)
        x: 位置 (m)，与 delta 广播
        s: S = ±√(4κ² − Δ²)

    Returns:
        CoupledModeFields
    """
    delta, x, s = np.broadcast_arrays(np.asarray(delta, dtype=float),
                                      np.asarray(x, dtype=float),
                                      np.asarray(s, dtype=complex))
    _check_positions(params, x)
    L = params.length
    g = 0.5 * s
    den, m = _normalized_denominator(params, delta, g)
    y = L - x

    ch_y, sh_y = _scaled_cosh_shc(g * y, m)
    ch_x, sh_x = _scaled_cosh_shc(g * x, m)

    Q = np.exp(0.5j * delta * x) * (2.0 * ch_y + 1j * delta * y * sh_y) / den
    P = 2.0 * np.exp(0.5j * delta * (x - L)) * x * sh_x / den
    V = np.exp(-0.5j * delta * (x - L)) * (2.0 * ch_x + 1j * delta * x * sh_x) / den
    W = -2.0 * np.exp(-0.5j * delta * x) * y * sh_y / den
    if params.kappa == 0:
        Q = np.ones_like(Q)
        V = np.ones_like(V)

    with np.errstate(over="ignore", invalid="ignore"):
        D = s * den * np.exp(g * L + m)

    return CoupledModeFields(Q=_as_output(Q), P=_as_output(P), V=_as_output(V),
                             W=_as_output(W), S=_as_output(s), D=_as_output(D))


def principal_root(params: DbrParams, delta: ArrayLike):
    """S = √(4κ² − Δ²)，取主值分支"""
    delta = np.asarray(delta, dtype=float)
    return np.sqrt(4.0 * params.kappa ** 2 - delta ** 2 + 0j)


def coupled_mode_fields(params: DbrParams, delta: ArrayLike, x: ArrayLike) -> CoupledModeFields:
    """光栅内 x 处的耦合模函数 Q, P, V, W

    禁带内外（4κ² ≷ Δ²）统一用复数运算求值；delta 与 x 可为数组并相互广播。

    Raises:
        DomainError: x 不在 [0, L] 内
        SingularityError: 分母低于下溢阈值
    """
    return fields_for_root(params, delta, x, principal_root(params, delta))


def dbr_coefficients(params: DbrParams, delta: ArrayLike) -> DbrCoefficients:
    """DBR 振幅反射/透射系数

    t = t′ = Q(L)，r = −iκW(0)，r′ = r·e^{iΔL}
    """
    delta = np.asarray(delta, dtype=float)
    L = params.length
    g = 0.5 * principal_root(params, delta)
    den, m = _normalized_denominator(params, delta, g)
    _, sh = _scaled_cosh_shc(g * L, m)
    if params.kappa == 0:
        r = np.zeros_like(den)
        t = np.ones_like(den)
    else:
        r = 2j * params.kappa * L * sh / den
        t = 2.0 * np.exp(0.5j * delta * L - m) / den
    rprime = r * np.exp(1j * delta * L)
    return DbrCoefficients(r=_as_output(r), t=_as_output(t),
                           rprime=_as_output(rprime), tprime=_as_output(t))


def energy_defect(params: DbrParams, delta: ArrayLike):
    """能量守恒诊断量 | |κP(L)|² + |V(0)|² − 1 |"""
    delta = np.asarray(delta, dtype=float)
    if params.kappa == 0:
        out = np.zeros(delta.shape)
        return float(out) if out.ndim == 0 else out
    at_end = coupled_mode_fields(params, delta, params.length)
    at_start = coupled_mode_fields(params, delta, 0.0)
    out = np.abs(np.abs(params.kappa * np.asarray(at_end.P)) ** 2
                 + np.abs(np.asarray(at_start.V)) ** 2 - 1.0)
    return float(out) if np.ndim(out) == 0 else out


def envelope_amplitudes(params: DbrParams, delta: ArrayLike, x: ArrayLike,
                        a0: complex = 1.0, b_end: complex = 0.0):
    """由边界值 A(0)、B(L) 重建包络 A(x)、B(x)"""
    f = coupled_mode_fields(params, delta, x)
    delta = np.asarray(delta, dtype=float)
    kappa = params.kappa
    A = np.asarray(f.Q) * a0 + 1j * kappa * np.asarray(f.P) * b_end * np.exp(1j * delta * params.length)
    B = -1j * kappa * np.asarray(f.W) * a0 + np.asarray(f.V) * b_end
    return A, B


def stop_band_mask(params: DbrParams, delta: ArrayLike):
    """禁带掩码 |Δ| < 2κ"""
    return np.abs(np.asarray(delta, dtype=float)) < 2.0 * params.kappa
