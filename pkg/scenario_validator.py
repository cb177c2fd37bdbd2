#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
场景模板验证器
校验 template/scenario_templates/ 下的场景配置：
  1. 通用字段 - name、description、version、created_date、author
  2. 物理参数 - 色散、光栅、反射镜、空气隙、泵浦（均为正，ρ² < 1）
  3. 频率网格 - 频带须在载频 ±1% 以内（线性化色散的适用范围）
  4. 数值设置 - 求积、Schmidt 截断、输出与线程数

作者：Lxx
更新时间：2026-10-16
"""

import math
import os
import re
from enum import Enum
from typing import Any, Dict, List


class ScenarioSection(Enum):
    """场景配置分段"""
    CONSTANTS = "constants"
    DISPERSION = "dispersion"
    GRATING = "grating"
    MIRROR = "mirror"
    GAP = "gap"
    PUMP = "pump"
    GRID = "grid"
    SCAN = "scan"
    QUADRATURE = "quadrature"
    SCHMIDT = "schmidt"
    MODE_NORMALIZATION = "mode_normalization"
    OUTPUT = "output"
    WORKERS = "workers"


class ScenarioValidator:
    """场景配置验证器"""

    # 必需字段（所有模板通用）
    REQUIRED_FIELDS = {
        'name',           # 场景名称
        'description',    # 场景描述
        'version',        # 版本号
        'created_date',   # 创建日期
        'author',         # 作者
    }

    KNOWN_FIELDS = REQUIRED_FIELDS | {s.value for s in ScenarioSection}

    DISPERSION_MODELS = ("linear", "vacuum")
    QUADRATURE_METHODS = ("analytic", "quadrature")
    NORMALIZATIONS = ("free_field", "unit")
    FILTER_SHAPES = ("rect", "lorentzian")
    ARMS = ("signal", "idler")

    # 线性化色散允许的相对频带
    BAND_TOLERANCE = 0.01

    def __init__(self):
        self.errors = []
        self.warnings = []

    def validate_file(self, path: str, overrides=()) -> Dict[str, Any]:
        """读取、解析并校验场景文件"""
        from scenario_config import read_scenario_file, resolve_scenario
        from sim_errors import ScenarioConfigError

        self.errors = []
        self.warnings = []
        if not path.lower().endswith('.json'):
            self.errors.append(f"场景文件必须是JSON格式: {path}")
            return self._get_result()
        try:
            resolved = resolve_scenario(read_scenario_file(path), overrides)
        except ScenarioConfigError as e:
            self.errors.append(str(e).splitlines()[0])
            self.errors.extend(e.errors)
            return self._get_result()
        return self.validate_config(resolved)

    def validate_config(self, data: Dict) -> Dict[str, Any]:
        """校验已换算为 SI 单位的配置字典"""
        self.errors = []
        self.warnings = []
        if not isinstance(data, dict):
            self.errors.append("场景配置必须是JSON对象（字典）类型")
            return self._get_result()

        self._validate_required_fields(data)
        self._validate_physics(data)
        self._validate_grids(data)
        self._validate_numerics(data)
        return self._get_result()

    # ---- 取值辅助 ----

    @staticmethod
    def _lookup(data: Dict, key_path: str):
        value = data
        for key in key_path.split('.'):
            if not isinstance(value, dict) or key not in value:
                return None
            value = value[key]
        return value

    def _number(self, data: Dict, key_path: str, positive=True, allow_zero=False,
                allow_none=False):
        value = self._lookup(data, key_path)
        if value is None:
            if not allow_none:
                self.errors.append(f"缺少数值字段: '{key_path}'")
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            self.errors.append(f"'{key_path}' 必须是有限数值，当前: {value!r}")
            return None
        if positive and (value < 0 or (value == 0 and not allow_zero)):
            bound = "非负" if allow_zero else "正"
            self.errors.append(f"'{key_path}' 必须为{bound}数，当前: {value}")
            return None
        return float(value)

    def _integer(self, data: Dict, key_path: str, minimum: int):
        value = self._lookup(data, key_path)
        if isinstance(value, bool) or not isinstance(value, int):
            self.errors.append(f"'{key_path}' 必须是整数，当前: {value!r}")
            return None
        if value < minimum:
            self.errors.append(f"'{key_path}' 不能小于{minimum}，当前: {value}")
            return None
        return value

    def _choice(self, data: Dict, key_path: str, choices):
        value = self._lookup(data, key_path)
        if value not in choices:
            self.errors.append(f"'{key_path}' 必须是 {', '.join(choices)} 之一，当前: {value!r}")
        return value

    # ---- 分段校验 ----

    def _validate_required_fields(self, data: Dict) -> None:
        missing_fields = self.REQUIRED_FIELDS - set(data.keys())
        if missing_fields:
            self.errors.append(f"缺少必需字段: {', '.join(sorted(missing_fields))}")

        for key in ('name', 'description', 'author'):
            if key in data and (not isinstance(data[key], str) or not data[key].strip()):
                self.errors.append(f"'{key}'字段必须是非空字符串")

        version = data.get('version')
        if version is not None:
            if not isinstance(version, str):
                self.errors.append("'version'字段必须是字符串")
            elif not re.match(r'^\d+\.\d+(\.\d+)?$', version):
                self.warnings.append("'version'字段建议使用语义化版本格式，如: 1.0.0")

        date = data.get('created_date')
        if date is not None:
            if not isinstance(date, str):
                self.errors.append("'created_date'字段必须是字符串")
            elif not re.match(r'^\d{4}-\d{2}-\d{2}$', date):
                self.warnings.append("'created_date'字段建议使用YYYY-MM-DD格式")

        unknown = set(data.keys()) - self.KNOWN_FIELDS
        for key in sorted(unknown):
            self.warnings.append(f"未知的顶层字段将被忽略: '{key}'")

    def _validate_physics(self, data: Dict) -> None:
        self._number(data, "constants.speed_of_light")
        model = self._choice(data, "dispersion.model", self.DISPERSION_MODELS)
        self._number(data, "dispersion.center_wavelength")
        if model == "linear":
            for pol in ("signal", "idler", "pump"):
                n0 = self._number(data, f"dispersion.{pol}.n0")
                if n0 is not None and n0 <= 1:
                    self.errors.append(f"'dispersion.{pol}.n0' 必须大于1，当前: {n0}")
                self._number(data, f"dispersion.{pol}.kprime")

        for arm in ("signal", "idler"):
            self._number(data, f"grating.kappa_{arm}", allow_zero=True)
            self._number(data, f"grating.K_{arm}", allow_none=True)
        self._number(data, "grating.length")

        rho2 = self._number(data, "mirror.rho_squared", allow_zero=True)
        if rho2 is not None and rho2 >= 1:
            self.errors.append(f"'mirror.rho_squared' 必须小于1，当前: {rho2}")

        self._number(data, "gap")
        self._number(data, "pump.sigma")
        self._number(data, "pump.amplitude")

    def _carrier(self, data: Dict):
        c = self._lookup(data, "constants.speed_of_light")
        wavelength = self._lookup(data, "dispersion.center_wavelength")
        if isinstance(c, (int, float)) and isinstance(wavelength, (int, float)) and c > 0 and wavelength > 0:
            return 2.0 * math.pi * c / wavelength
        return None

    def _validate_band(self, data: Dict, section: str, carrier) -> None:
        lo = self._number(data, f"{section}.omega_min")
        hi = self._number(data, f"{section}.omega_max")
        self._integer(data, f"{section}.n_points", 2)
        if lo is None or hi is None:
            return
        if lo >= hi:
            self.errors.append(f"'{section}' 频带下限必须小于上限: [{lo}, {hi}]")
            return
        if carrier is not None:
            worst = max(abs(lo - carrier), abs(hi - carrier)) / carrier
            if worst > self.BAND_TOLERANCE:
                self.errors.append(
                    f"'{section}' 频带 [{lo:.6e}, {hi:.6e}] 超出载频 {carrier:.6e} 的 ±1% 范围")

    def _validate_grids(self, data: Dict) -> None:
        carrier = self._carrier(data)
        self._validate_band(data, "grid", carrier)
        self._validate_band(data, "scan", carrier)
        self._choice(data, "scan.arm", self.ARMS)

    def _validate_numerics(self, data: Dict) -> None:
        self._choice(data, "quadrature.method", self.QUADRATURE_METHODS)
        self._integer(data, "quadrature.gauss_order", 1)
        self._integer(data, "quadrature.points_per_period", 1)
        self._number(data, "quadrature.convergence_tol")

        truncation = self._number(data, "schmidt.truncation", allow_zero=True)
        if truncation is not None and truncation >= 1:
            self.errors.append(f"'schmidt.truncation' 必须小于1，当前: {truncation}")
        self._integer(data, "schmidt.n_mode_files", 0)
        self._integer(data, "schmidt.n_temporal_modes", 0)
        flt = self._lookup(data, "schmidt.idler_filter")
        if flt is not None:
            if not isinstance(flt, dict):
                self.errors.append("'schmidt.idler_filter' 必须是对象或null")
            else:
                self._number(data, "schmidt.idler_filter.center")
                self._number(data, "schmidt.idler_filter.width")
                if "shape" in flt:
                    self._choice(data, "schmidt.idler_filter.shape", self.FILTER_SHAPES)

        self._choice(data, "mode_normalization", self.NORMALIZATIONS)
        self._integer(data, "output.csv_decimation", 1)
        out_dir = self._lookup(data, "output.dir")
        if not isinstance(out_dir, str) or not out_dir.strip():
            self.errors.append("'output.dir' 必须是非空字符串")
        self._integer(data, "workers", 1)

    def _get_result(self) -> Dict[str, Any]:
        return {
            'is_valid': len(self.errors) == 0,
            'errors': self.errors,
            'warnings': self.warnings,
            'error_count': len(self.errors),
            'warning_count': len(self.warnings),
        }

    def format_validation_report(self, result: Dict[str, Any], title: str = "") -> str:
        """格式化验证报告"""
        report_lines = ["=" * 60, f"场景配置验证报告 {title}".rstrip(), "=" * 60]
        report_lines.append("\n[OK] 验证状态: 通过" if result['is_valid'] else "\n[ERROR] 验证状态: 失败")

        if result['errors']:
            report_lines.append("\n错误信息:")
            for error in result['errors']:
                report_lines.append(f"  • {error}")

        if result['warnings']:
            report_lines.append("\n警告信息:")
            for warning in result['warnings']:
                report_lines.append(f"  • {warning}")

        report_lines.append(f"\n错误数量: {result['error_count']}  警告数量: {result['warning_count']}")
        report_lines.append("=" * 60)
        return "\n".join(report_lines)

    def validate_all_scenarios_in_directory(self, scenario_dir: str) -> Dict[str, Dict[str, Any]]:
        """批量验证目录下的所有场景文件"""
        results = {}
        if not os.path.isdir(scenario_dir):
            return results
        for file in sorted(os.listdir(scenario_dir)):
            if file.endswith('.json'):
                results[file] = self.validate_file(os.path.join(scenario_dir, file))
        return results
