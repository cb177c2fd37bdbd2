#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
微腔PDC模拟器 - Schmidt 分解与纠缠度量
离散化采用均匀网格黎曼权重：对 M = B·√(Δω_s Δω_i) 做奇异值分解
  λ_j = s_j² / Σ s_k²
  ψ_j = U[:, j] / √Δω_s,  φ_j = Vh[j, :] / √Δω_i
使 Σ_m |ψ_j(ω_m)|² Δω_s = 1，且 B/‖B‖ = Σ √λ_j ψ_j φ_jᵀ
约化密度矩阵的本征分解保留作交叉验证

作者：Lxx   更新时间：2026-10-15
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg

from jsa import FrequencyGrid, JsaMatrix
from dispersion import Polarization
from sim_errors import DomainError

logger = logging.getLogger(__name__)

DEFAULT_TRUNCATION = 1e-8


@dataclass
class SchmidtSpectrum:
    """Schmidt 本征值（降序）与信号/闲频模式函数，psi 形状 (n_modes, ns)"""
    lambdas: np.ndarray
    psi: np.ndarray
    phi: np.ndarray
    grid_s: FrequencyGrid
    grid_i: FrequencyGrid
    global_phase: complex = 1.0
    discarded_weight: float = 0.0

    @property
    def n_modes(self) -> int:
        return int(self.lambdas.size)

    def mode(self, index: int, side="signal") -> np.ndarray:
        _check_index(self, index)
        pol = Polarization.parse(side)
        return self.psi[index] if pol is Polarization.SIGNAL else self.phi[index]


@dataclass(frozen=True)
class EntanglementMetrics:
    """纠缠熵 S（比特）、纯度 p、协同数 K"""
    entropy_S: float
    purity_p: float
    cooperativity_K: float

    def to_dict(self) -> dict:
        return {"entropy_S": self.entropy_S, "purity_p": self.purity_p,
                "cooperativity_K": self.cooperativity_K}


def _check_index(spectrum: SchmidtSpectrum, index: int) -> None:
    if not 0 <= index < spectrum.n_modes:
        raise DomainError(f"模式序号{index}越界（共{spectrum.n_modes}个模式）")


def _weighted(jsa: JsaMatrix) -> np.ndarray:
    values = jsa.values
    if not np.any(values):
        raise DomainError("JSA矩阵为零，无法分解")
    return values * math.sqrt(jsa.grid_s.spacing * jsa.grid_i.spacing)


def schmidt_decompose(jsa: JsaMatrix, truncation: float = DEFAULT_TRUNCATION) -> SchmidtSpectrum:
    """对 JSA 做 Schmidt 分解

    分解前先除去最大模元素的相位，使结果与 B 的全局相位无关；
    每个 ψ_j 的最大模分量取为正实数，φ_j 的相位随之确定。

    Args:
        jsa: 联合谱幅度矩阵
        truncation: 保留 λ_j > truncation 的模式（至少保留一个）

    Raises:
        DomainError: 零矩阵
    """
    M = _weighted(jsa)
    peak = np.unravel_index(np.argmax(np.abs(M)), M.shape)
    phase = M[peak] / abs(M[peak])
    M = M * np.conj(phase)

    U, s, Vh = linalg.svd(M, full_matrices=False)
    power = s ** 2
    lambdas = power / power.sum()
    keep = max(1, int(np.count_nonzero(lambdas > truncation)))

    psi = U[:, :keep].T / math.sqrt(jsa.grid_s.spacing)
    phi = Vh[:keep, :] / math.sqrt(jsa.grid_i.spacing)
    for j in range(keep):
        idx = int(np.argmax(np.abs(psi[j])))
        alpha = psi[j, idx] / abs(psi[j, idx])
        psi[j] = psi[j] * np.conj(alpha)
        psi[j, idx] = abs(psi[j, idx])
        phi[j] = phi[j] * alpha

    discarded = float(lambdas[keep:].sum())
    logger.info("Schmidt分解完成: 保留%d个模式, λ₁=%.6f", keep, lambdas[0])
    return SchmidtSpectrum(lambdas=lambdas[:keep], psi=psi, phi=phi,
                           grid_s=jsa.grid_s, grid_i=jsa.grid_i,
                           global_phase=complex(phase), discarded_weight=discarded)


def reconstruct(spectrum: SchmidtSpectrum) -> np.ndarray:
    """Σ_j √λ_j ψ_j φ_jᵀ，乘回分解时除去的全局相位，对应 B/‖B‖"""
    weights = np.sqrt(spectrum.lambdas)
    return spectrum.global_phase * np.einsum("j,jm,jn->mn", weights, spectrum.psi, spectrum.phi)


def reduced_density(jsa: JsaMatrix, side="signal") -> np.ndarray:
    """单位迹约化密度矩阵

    ρ_S = B·B†·Δω（信号），ρ_I = Bᵀ·B*·Δω（闲频），厄米且迹为 1
    """
    pol = Polarization.parse(side)
    M = _weighted(jsa)
    if pol is Polarization.SIGNAL:
        rho = M @ M.conj().T
    elif pol is Polarization.IDLER:
        rho = M.T @ M.conj()
    else:
        raise DomainError("约化密度矩阵只对信号或闲频光定义")
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def density_eigenvalues(rho: np.ndarray) -> np.ndarray:
    """约化密度矩阵本征值（降序）"""
    return linalg.eigh(rho, eigvals_only=True)[::-1]


def metrics_from_lambdas(lambdas) -> EntanglementMetrics:
    """按给定的 λ 直接计算 S、p、K（不重新归一化）"""
    lam = np.asarray(lambdas, dtype=float)
    positive = lam[lam > 0]
    # 0·log0 按 0 处理；加 0.0 消去 −0.0
    entropy = float(-np.sum(positive * np.log2(positive))) + 0.0
    purity = float(np.sum(lam ** 2))
    if purity <= 0:
        raise DomainError("λ 全为零，纯度无定义")
    return EntanglementMetrics(entropy_S=entropy, purity_p=purity,
                               cooperativity_K=1.0 / purity)


def metrics(spectrum: SchmidtSpectrum) -> EntanglementMetrics:
    return metrics_from_lambdas(spectrum.lambdas)


def default_time_grid(grid: FrequencyGrid) -> np.ndarray:
    """与频率网格离散傅里叶共轭的时间网格，Δt = 2π/(NΔω)，以 t = 0 为中心"""
    n = grid.n_points
    dt = 2.0 * math.pi / (n * grid.spacing)
    return (np.arange(n) - n // 2) * dt


def temporal_mode(spectrum: SchmidtSpectrum, mode_index: int,
                  time_grid: Optional[np.ndarray] = None, side="signal",
                  normalize: bool = True):
    """x = 0 处的时域波包 v(t) = Σ_m ψ(ω_m) e^{−iω_m t} Δω / √(2π)

    Args:
        spectrum: Schmidt 谱
        mode_index: 模式序号（从 0 开始）
        time_grid: 时间点 (s)；缺省为离散傅里叶共轭网格
        side: "signal" 或 "idler"
        normalize: 是否归一化到 Σ|v|²Δt = 1（要求时间网格均匀）

    Returns:
        (t, v)
    """
    _check_index(spectrum, mode_index)
    pol = Polarization.parse(side)
    grid = spectrum.grid_s if pol is Polarization.SIGNAL else spectrum.grid_i
    amplitude = spectrum.mode(mode_index, pol)
    t = default_time_grid(grid) if time_grid is None else np.asarray(time_grid, dtype=float)
    omega = grid.values
    kernel = np.exp(-1j * np.outer(t, omega))
    v = kernel @ amplitude * grid.spacing / math.sqrt(2.0 * math.pi)
    if normalize:
        if t.size < 2:
            raise DomainError("归一化需要至少两个时间点")
        dt = float(t[1] - t[0])
        energy = float(np.sum(np.abs(v) ** 2) * dt)
        if energy > 0:
            v = v / math.sqrt(energy)
    return t, v


def mode_band_weight(spectrum: SchmidtSpectrum, mode_index: int, mask,
                     side="signal") -> float:
    """模式谱权重落在掩码频带内的比例"""
    amplitude = spectrum.mode(mode_index, side)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != amplitude.shape:
        raise DomainError("频带掩码与模式网格长度不一致")
    power = np.abs(amplitude) ** 2
    return float(power[mask].sum() / power.sum())
