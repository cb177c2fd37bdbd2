#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
微腔PDC模拟器 - 色散模型
按偏振给出线性化波数 k(ω) 与光栅失谐量 Δ(ω) = K − 2k(ω)

默认参数为 KTP 在 800 nm 简并点的一阶展开：
  信号光、泵浦光为 e 光，闲频光为 o 光
另提供真空模型（n0 = 1, k′ = 1/c），用于单光栅反射谱演示

作者：Lxx   更新时间：2026-10-12
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

import numpy as np
from scipy import constants

from sim_errors import DomainError

ArrayLike = Union[float, np.ndarray]

SPEED_OF_LIGHT = constants.c

# KTP 简并点 (λ = 800 nm) 的折射率与群延迟 k′ = dk/dω，单位 s/m
KTP_CONSTANTS = {
    "signal": {"n0": 1.6047, "kprime": 5.4212e-9},
    "idler": {"n0": 1.6605, "kprime": 5.6149e-9},
    "pump": {"n0": 1.6326, "kprime": 5.6949e-9},
}


class Polarization(Enum):
    """偏振/光束类型"""
    SIGNAL = "signal"
    IDLER = "idler"
    PUMP = "pump"

    @property
    def is_extraordinary(self) -> bool:
        # 信号光与泵浦光为 e 光，闲频光为 o 光
        return self is not Polarization.IDLER

    @classmethod
    def parse(cls, value) -> "Polarization":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"未知偏振类型: {value}") from None


@dataclass(frozen=True)
class DispersionLaw:
    """单一偏振的线性色散律 k = n0·ω0/c + k′·(ω − ω0)"""
    n0: float
    kprime: float
    omega0: float


@dataclass(frozen=True)
class DispersionModel:
    """三种偏振的色散律集合"""
    signal: DispersionLaw
    idler: DispersionLaw
    pump: DispersionLaw
    speed_of_light: float = SPEED_OF_LIGHT
    name: str = "linear"
    _laws: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        problems = []
        allow_unit_index = self.name == "vacuum"
        for label, law in (("signal", self.signal), ("idler", self.idler), ("pump", self.pump)):
            if law.n0 < 1 or (law.n0 == 1 and not allow_unit_index):
                problems.append(f"{label}.n0 必须大于1，当前 {law.n0}")
            if not law.kprime > 0:
                problems.append(f"{label}.kprime 必须为正，当前 {law.kprime}")
            if not law.omega0 > 0:
                problems.append(f"{label}.omega0 必须为正，当前 {law.omega0}")
        if not self.speed_of_light > 0:
            problems.append(f"光速必须为正，当前 {self.speed_of_light}")
        if not math.isclose(self.pump.omega0, 2.0 * self.signal.omega0, rel_tol=1e-12):
            problems.append("泵浦参考频率必须等于信号参考频率的两倍")
        if problems:
            raise DomainError("色散模型参数无效: " + "; ".join(problems))
        object.__setattr__(self, "_laws", {
            Polarization.SIGNAL: self.signal,
            Polarization.IDLER: self.idler,
            Polarization.PUMP: self.pump,
        })

    def law(self, pol) -> DispersionLaw:
        return self._laws[Polarization.parse(pol)]

    @property
    def omega0(self) -> float:
        """简并信号/闲频参考角频率"""
        return self.signal.omega0

    def omega_from_wavelength(self, wavelength: float) -> float:
        return 2.0 * math.pi * self.speed_of_light / wavelength

    def wavelength_from_omega(self, omega: float) -> float:
        return 2.0 * math.pi * self.speed_of_light / omega

    def vacuum_wavenumber(self, omega: ArrayLike) -> ArrayLike:
        """空气隙中的波数 ω/c"""
        return np.asarray(omega, dtype=float) / self.speed_of_light

    @classmethod
    def ktp_default(cls, center_wavelength: float = 800e-9,
                    speed_of_light: float = SPEED_OF_LIGHT,
                    constants_table: dict = None) -> "DispersionModel":
        """KTP 线性化色散模型

        Args:
            center_wavelength: 简并信号/闲频中心波长 (m)
            speed_of_light: 光速 (m/s)
            constants_table: 覆盖 KTP_CONSTANTS 的 {偏振: {n0, kprime}} 字典
        """
        table = {k: dict(v) for k, v in KTP_CONSTANTS.items()}
        for pol, values in (constants_table or {}).items():
            table.setdefault(pol, {}).update(values)
        omega0 = 2.0 * math.pi * speed_of_light / center_wavelength
        return cls(
            signal=DispersionLaw(table["signal"]["n0"], table["signal"]["kprime"], omega0),
            idler=DispersionLaw(table["idler"]["n0"], table["idler"]["kprime"], omega0),
            pump=DispersionLaw(table["pump"]["n0"], table["pump"]["kprime"], 2.0 * omega0),
            speed_of_light=speed_of_light,
            name="linear",
        )

    @classmethod
    def vacuum(cls, center_wavelength: float = 800e-9,
               speed_of_light: float = SPEED_OF_LIGHT) -> "DispersionModel":
        """背景折射率为 1 的色散模型"""
        omega0 = 2.0 * math.pi * speed_of_light / center_wavelength
        kprime = 1.0 / speed_of_light
        return cls(
            signal=DispersionLaw(1.0, kprime, omega0),
            idler=DispersionLaw(1.0, kprime, omega0),
            pump=DispersionLaw(1.0, kprime, 2.0 * omega0),
            speed_of_light=speed_of_light,
            name="vacuum",
        )


def wavenumber(model: DispersionModel, pol, omega: ArrayLike) -> ArrayLike:
    """介质中的波数 k(ω)，单位 rad/m

    Args:
        model: 色散模型
        pol: 偏振（Polarization 或 'signal'/'idler'/'pump'）
        omega: 角频率 (rad/s)，标量或数组

    Returns:
        与 omega 同形状的波数

    Raises:
        DomainError: omega 非正
    """
    law = model.law(pol)
    w = np.asarray(omega, dtype=float)
    if np.any(~(w > 0)):
        raise DomainError(f"角频率必须为正: {omega}")
    k = law.n0 * law.omega0 / model.speed_of_light + law.kprime * (w - law.omega0)
    return float(k) if k.ndim == 0 else k


def detuning(model: DispersionModel, pol, omega: ArrayLike, grating_k: float) -> ArrayLike:
    """光栅失谐量 Δ = K − 2k(ω)"""
    if not grating_k > 0:
        raise DomainError(f"光栅空间频率K必须为正: {grating_k}")
    return grating_k - 2.0 * wavenumber(model, pol, omega)


def phase_matched_grating(model: DispersionModel, pol) -> float:
    """在参考频率处满足 Δ = 0 的光栅空间频率 K = 2k(ω0)"""
    return 2.0 * wavenumber(model, pol, model.law(pol).omega0)


def kappa_from_index_modulation(delta_n: float, k: float) -> float:
    """由折射率调制深度换算耦合常数 κ = (Δn/2)·k"""
    if delta_n < 0:
        raise DomainError(f"折射率调制深度不能为负: {delta_n}")
    return 0.5 * delta_n * k
