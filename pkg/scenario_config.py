#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
微腔PDC模拟器 - 场景配置
从 template/scenario_templates/ 下的 JSON 模板加载场景参数：
  1. 以默认场景为底，逐层合并模板中的字段
  2. 应用命令行 --set 键路径覆盖
  3. 带单位的字符串统一换算为 SI（米、rad/m、rad/s）
  4. 交给 ScenarioValidator 校验，失败时抛出 ScenarioConfigError

作者：Lxx   更新时间：2026-10-16
"""

import copy
import json
import logging
import os
import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Tuple

from cavity import CavityAssembly, MirrorParams
from dbr import DbrParams
from dispersion import DispersionModel, Polarization, phase_matched_grating
from jsa import FrequencyGrid, PumpSpectrum, QuadratureSettings
from path_helper import get_scenario_path
from scenario_validator import ScenarioValidator
from sim_errors import DomainError, ScenarioConfigError

logger = logging.getLogger(__name__)

LENGTH_UNITS = {"nm": 1e-9, "um": 1e-6, "µm": 1e-6, "mm": 1e-3, "m": 1.0}
INVERSE_LENGTH_UNITS = {"/nm": 1e9, "/um": 1e6, "/µm": 1e6, "/mm": 1e3, "/m": 1.0,
                        "mm^-1": 1e3, "um^-1": 1e6, "m^-1": 1.0}

# 需要做单位换算的键路径
LENGTH_KEYS = ("dispersion.center_wavelength", "grating.length", "gap")
INVERSE_LENGTH_KEYS = ("grating.kappa_signal", "grating.kappa_idler",
                       "grating.K_signal", "grating.K_idler")

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(\S*)\s*$")


def get_default_scenario():
    """获取默认场景（ρ² = 0.95 的双光栅 KTP 微腔）"""
    return {
        "name": "默认场景 ρ²=0.95",
        "description": "KTP双光栅DBR微腔，κ=2/mm，L=4mm，d=0.1999mm，σ=0.3e12 rad/s",
        "version": "1.0.0",
        "created_date": "2026-10-12",
        "author": "Lxx",
        "constants": {"speed_of_light": 3.0e8},
        "dispersion": {
            "model": "linear",
            "center_wavelength": "800nm",
            "signal": {"n0": 1.6047, "kprime": 5.4212e-9},
            "idler": {"n0": 1.6605, "kprime": 5.6149e-9},
            "pump": {"n0": 1.6326, "kprime": 5.6949e-9},
        },
        "grating": {
            "kappa_signal": "2/mm",
            "kappa_idler": "2/mm",
            "length": "4mm",
            "K_signal": None,
            "K_idler": None,
        },
        "mirror": {"rho_squared": 0.95},
        "gap": "0.1999mm",
        "pump": {"sigma": 0.3e12, "amplitude": 1.0},
        "grid": {"omega_min": 2.3552e15, "omega_max": 2.3572e15, "n_points": 1191},
        "scan": {"omega_min": 2.3544e15, "omega_max": 2.3580e15, "n_points": 6001,
                 "arm": "signal"},
        "quadrature": {"method": "analytic", "gauss_order": 8, "points_per_period": 20,
                       "convergence_tol": 1e-9},
        "schmidt": {"truncation": 1e-8, "n_mode_files": 4, "n_temporal_modes": 2,
                    "idler_filter": None},
        "mode_normalization": "free_field",
        "output": {"dir": "output", "csv_decimation": 1, "jsa_csv_parts": False},
        "workers": 1,
    }


def get_config_value(data: dict, key_path: str, default=None):
    """按点分键路径读取嵌套值，如 "grating.length" """
    value = data
    for key in key_path.split('.'):
        if isinstance(value, dict) and key in value:
            value = value[key]
        else:
            return default
    return value


def set_config_value(data: dict, key_path: str, value) -> None:
    """按点分键路径写入嵌套值，中间层不存在时创建"""
    keys = key_path.split('.')
    current = data
    for key in keys[:-1]:
        if not isinstance(current.get(key), dict):
            current[key] = {}
        current = current[key]
    current[keys[-1]] = value


def parse_override(text: str) -> Tuple[str, Any]:
    """解析 --set key.path=value；value 先按 JSON 解析，失败时按字符串处理"""
    if "=" not in text:
        raise ScenarioConfigError(f"覆盖项格式应为 key=value: {text}")
    key, raw = text.split("=", 1)
    key = key.strip()
    if not key:
        raise ScenarioConfigError(f"覆盖项缺少键名: {text}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw.strip()
    return key, value


def parse_quantity(value, key: str, units: dict) -> Optional[float]:
    """把数值或带单位字符串换算为 SI 浮点数；None 原样返回"""
    if value is None:
        return None
    if isinstance(value, bool):
        raise ScenarioConfigError(f"'{key}' 必须是数值: {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ScenarioConfigError(f"'{key}' 必须是数值或带单位的字符串: {value!r}")
    match = _QUANTITY.match(value)
    if not match:
        raise ScenarioConfigError(f"'{key}' 无法解析的数值: {value!r}")
    number, unit = match.groups()
    if not unit:
        return float(number)
    if unit not in units:
        raise ScenarioConfigError(
            f"'{key}' 不支持的单位 '{unit}'，可用: {', '.join(units)}")
    return float(number) * units[unit]


def _deep_merge(base: dict, extra: dict) -> dict:
    merged = copy.deepcopy(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def resolve_units(data: dict) -> dict:
    """返回单位已换算为 SI 的副本"""
    resolved = copy.deepcopy(data)
    errors = []
    for keys, units in ((LENGTH_KEYS, LENGTH_UNITS), (INVERSE_LENGTH_KEYS, INVERSE_LENGTH_UNITS)):
        for key in keys:
            try:
                set_config_value(resolved, key,
                                 parse_quantity(get_config_value(resolved, key), key, units))
            except ScenarioConfigError as e:
                errors.append(str(e))
    mirror = resolved.get("mirror")
    if isinstance(mirror, dict) and "rho" in mirror:
        # 同时给出 rho 与 rho_squared 时以 rho 为准
        rho = mirror.pop("rho")
        if isinstance(rho, (int, float)) and not isinstance(rho, bool):
            mirror["rho_squared"] = float(rho) ** 2
        else:
            errors.append(f"'mirror.rho' 必须是数值: {rho!r}")
    if errors:
        raise ScenarioConfigError("场景参数单位解析失败", errors)
    return resolved


def read_scenario_file(path: str) -> dict:
    """读取场景 JSON，语法错误时给出行列号"""
    if not os.path.exists(path):
        raise ScenarioConfigError(f"场景配置文件不存在: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            content = f.read().strip()
    except UnicodeDecodeError as e:
        raise ScenarioConfigError(f"文件编码错误，请使用UTF-8编码: {path}", [str(e)]) from None
    if not content:
        raise ScenarioConfigError(f"场景配置文件为空: {path}")
    try:
        data = json.loads(content)
    except json.JSONDecodeError as e:
        raise ScenarioConfigError(f"JSON格式错误: {path}",
                                  [f"第{e.lineno}行第{e.colno}列: {e.msg}"]) from None
    if not isinstance(data, dict):
        raise ScenarioConfigError(f"场景配置必须是JSON对象: {path}")
    return data


def resolve_scenario(raw: dict, overrides: Iterable[str] = ()) -> dict:
    """合并默认值、应用覆盖、换算单位（不做校验）"""
    merged = _deep_merge(get_default_scenario(), raw)
    for text in overrides or ():
        key, value = parse_override(text)
        set_config_value(merged, key, value)
    return resolve_units(merged)


@dataclass
class ScenarioConfig:
    """已解析、已校验的场景配置"""
    data: dict
    source: str = "<默认>"
    warnings: list = field(default_factory=list)

    def get(self, key_path: str, default=None):
        return get_config_value(self.data, key_path, default)

    def to_dict(self) -> dict:
        return copy.deepcopy(self.data)

    def with_overrides(self, overrides: Iterable[str]) -> "ScenarioConfig":
        """在当前配置上再应用覆盖并重新校验"""
        return validated_config(resolve_scenario(self.data, overrides), self.source)

    # ---- 领域对象构造 ----

    @property
    def speed_of_light(self) -> float:
        return float(self.get("constants.speed_of_light"))

    def dispersion(self) -> DispersionModel:
        c = self.speed_of_light
        wavelength = float(self.get("dispersion.center_wavelength"))
        if self.get("dispersion.model") == "vacuum":
            return DispersionModel.vacuum(wavelength, c)
        table = {pol: {"n0": float(self.get(f"dispersion.{pol}.n0")),
                       "kprime": float(self.get(f"dispersion.{pol}.kprime"))}
                 for pol in ("signal", "idler", "pump")}
        return DispersionModel.ktp_default(wavelength, c, table)

    def grating_k(self, pol: Polarization, model: DispersionModel) -> float:
        key = "grating.K_signal" if pol is Polarization.SIGNAL else "grating.K_idler"
        value = self.get(key)
        return phase_matched_grating(model, pol) if value is None else float(value)

    def mirror(self) -> MirrorParams:
        return MirrorParams.from_reflectivity(float(self.get("mirror.rho_squared")))

    def assembly(self, pol, model: Optional[DispersionModel] = None) -> CavityAssembly:
        pol = Polarization.parse(pol)
        model = model or self.dispersion()
        kappa_key = "grating.kappa_signal" if pol is Polarization.SIGNAL else "grating.kappa_idler"
        dbr = DbrParams(kappa=float(self.get(kappa_key)),
                        length=float(self.get("grating.length")),
                        grating_k=self.grating_k(pol, model))
        return CavityAssembly(dbr=dbr, mirror=self.mirror(), gap=float(self.get("gap")),
                              dispersion=model, pol=pol,
                              normalization=self.get("mode_normalization"))

    def assemblies(self) -> Tuple[CavityAssembly, CavityAssembly]:
        model = self.dispersion()
        return self.assembly(Polarization.SIGNAL, model), self.assembly(Polarization.IDLER, model)

    def pump(self, model: Optional[DispersionModel] = None) -> PumpSpectrum:
        model = model or self.dispersion()
        return PumpSpectrum(sigma=float(self.get("pump.sigma")),
                            omega_center=2.0 * model.omega0,
                            amplitude=float(self.get("pump.amplitude")))

    def grid(self) -> FrequencyGrid:
        return FrequencyGrid(float(self.get("grid.omega_min")), float(self.get("grid.omega_max")),
                             int(self.get("grid.n_points")))

    def scan_grid(self) -> FrequencyGrid:
        return FrequencyGrid(float(self.get("scan.omega_min")), float(self.get("scan.omega_max")),
                             int(self.get("scan.n_points")))

    def quadrature(self) -> QuadratureSettings:
        return QuadratureSettings(gauss_order=int(self.get("quadrature.gauss_order")),
                                  points_per_period=int(self.get("quadrature.points_per_period")),
                                  convergence_tol=float(self.get("quadrature.convergence_tol")))


def validated_config(resolved: dict, source: str = "<默认>") -> ScenarioConfig:
    """校验已解析的配置字典"""
    validator = ScenarioValidator()
    result = validator.validate_config(resolved)
    for warning in result['warnings']:
        logger.warning("配置警告: %s", warning)
    if not result['is_valid']:
        raise ScenarioConfigError(f"场景配置校验失败: {source}", result['errors'])
    config = ScenarioConfig(data=resolved, source=source, warnings=list(result['warnings']))
    try:
        # 构造一次领域对象，把模型层的约束也暴露为配置错误
        config.assemblies()
        config.pump()
    except DomainError as e:
        raise ScenarioConfigError(f"场景参数无效: {source}", [str(e)]) from None
    return config


def load_scenario(path: Optional[str] = None, overrides: Iterable[str] = ()) -> ScenarioConfig:
    """加载场景配置

    Args:
        path: 场景文件路径或内置模板名；None 时使用默认模板
        overrides: "key.path=value" 形式的覆盖项

    Returns:
        ScenarioConfig

    Raises:
        ScenarioConfigError: 文件缺失、JSON语法错误、单位错误或校验失败
    """
    if path is None:
        default_path = get_scenario_path()
        if os.path.exists(default_path):
            raw, source = read_scenario_file(default_path), default_path
        else:
            logger.warning("默认场景模板不存在: %s，使用内置默认配置", default_path)
            raw, source = {}, "<默认>"
    else:
        source = get_scenario_path(path)
        raw = read_scenario_file(source)
    config = validated_config(resolve_scenario(raw, overrides), source)
    logger.info("已加载场景: %s (%s)", config.get("name"), source)
    return config
