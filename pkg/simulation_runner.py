#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
微腔PDC模拟器 - 运行流程
每个命令对应一个 run_* 函数：读取场景配置，计算，写出数据文件与运行清单
  run_dbr_spectrum     DBR 反射/透射谱
  run_cavity_spectrum  微腔反射谱与腔内强度
  run_jsa              联合谱幅度矩阵
  run_schmidt          Schmidt 本征值、纠缠度量、模式谱与时域波包
  run_sweep            参数扫描（如 ρ² 扫描复现本征值表）

作者：Lxx   更新时间：2026-10-17
"""

import json
import logging
import os
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np

from cavity import reflectivity_spectrum, transmitted_power
from dbr import stop_band_mask
from dispersion import Polarization
from jsa import JsaMatrix, build_jsa, filter_band
from path_helper import ensure_dir, get_app_path
from result_io import load_jsa, save_jsa, write_csv, write_jsa_csv, write_json
from run_manifest import RunManifest
from scenario_config import ScenarioConfig
from schmidt import (SchmidtSpectrum, metrics, mode_band_weight, schmidt_decompose,
                     temporal_mode)

logger = logging.getLogger(__name__)

ProgressCallback = Optional[Callable[[str], None]]

# 扫描参数的简写
SWEEP_ALIASES = {
    "rho_squared": ("mirror.rho_squared",),
    "rho2": ("mirror.rho_squared",),
    "kappa": ("grating.kappa_signal", "grating.kappa_idler"),
    "sigma": ("pump.sigma",),
    "gap": ("gap",),
    "length": ("grating.length",),
}


@dataclass
class RunResult:
    """一次运行的输出"""
    out_dir: str
    outputs: List[str]
    manifest_path: str


def resolve_out_dir(config: ScenarioConfig, out_dir: Optional[str] = None) -> str:
    target = out_dir or config.get("output.dir")
    if not os.path.isabs(target):
        target = get_app_path(target)
    return ensure_dir(target)


def _finish(command: str, config: ScenarioConfig, out_dir: str, outputs: List[str]) -> RunResult:
    manifest = RunManifest(command=command, config=config.to_dict())
    for path in outputs:
        manifest.add_output(path, out_dir)
    manifest_path = manifest.finish(out_dir)
    return RunResult(out_dir=out_dir, outputs=outputs, manifest_path=manifest_path)


def _scan_assembly(config: ScenarioConfig):
    return config.assembly(Polarization.parse(config.get("scan.arm")))


def run_dbr_spectrum(config: ScenarioConfig, out_dir: Optional[str] = None) -> RunResult:
    """DBR 单独的反射/透射谱，列 (omega, k, abs_r2, abs_t2)"""
    out_dir = resolve_out_dir(config, out_dir)
    table = reflectivity_spectrum(_scan_assembly(config), config.scan_grid())
    path = write_csv(os.path.join(out_dir, "dbr_spectrum.csv"),
                     {"omega": table.omega, "k": table.k, "abs_r2": table.r2, "abs_t2": table.t2},
                     decimation=int(config.get("output.csv_decimation")))
    logger.info("DBR反射谱: 最大|r|²=%.6f", float(table.r2.max()))
    return _finish("dbr-spectrum", config, out_dir, [path])


def run_cavity_spectrum(config: ScenarioConfig, out_dir: Optional[str] = None) -> RunResult:
    """微腔反射谱，列 (omega, k, abs_R2, abs_A2, abs_r2, transmitted)"""
    out_dir = resolve_out_dir(config, out_dir)
    assembly = _scan_assembly(config)
    grid = config.scan_grid()
    table = reflectivity_spectrum(assembly, grid)
    path = write_csv(os.path.join(out_dir, "cavity_spectrum.csv"),
                     {"omega": table.omega, "k": table.k, "abs_R2": table.R2,
                      "abs_A2": table.A2, "abs_r2": table.r2,
                      "transmitted": np.atleast_1d(transmitted_power(assembly, grid.values))},
                     decimation=int(config.get("output.csv_decimation")))
    peak = int(np.argmax(table.A2))
    logger.info("腔内强度峰值 |A₂|²=%.4g 位于 ω=%.10e rad/s，该处 |R|²=%.6f",
                table.A2[peak], table.omega[peak], table.R2[peak])
    return _finish("cavity-spectrum", config, out_dir, [path])


def compute_jsa(config: ScenarioConfig, workers: Optional[int] = None,
                progress_callback: ProgressCallback = None) -> JsaMatrix:
    sig, idl = config.assemblies()
    grid = config.grid()
    return build_jsa(sig, idl, config.pump(sig.dispersion), grid, grid,
                     method=config.get("quadrature.method"),
                     settings=config.quadrature(),
                     workers=int(workers or config.get("workers")),
                     progress_callback=progress_callback)


def run_jsa(config: ScenarioConfig, out_dir: Optional[str] = None,
            workers: Optional[int] = None, progress_callback: ProgressCallback = None) -> RunResult:
    """构建 JSA，写出矩阵文件与 |B| 的 CSV"""
    out_dir = resolve_out_dir(config, out_dir)
    jsa = compute_jsa(config, workers, progress_callback)
    outputs = save_jsa(jsa, os.path.join(out_dir, "jsa"))
    outputs.append(write_jsa_csv(jsa, os.path.join(out_dir, "jsa_abs.csv"),
                                 decimation=int(config.get("output.csv_decimation")),
                                 include_parts=bool(config.get("output.jsa_csv_parts"))))
    return _finish("jsa", config, out_dir, outputs)


def apply_configured_filter(config: ScenarioConfig, jsa: JsaMatrix) -> JsaMatrix:
    band = config.get("schmidt.idler_filter")
    if not band:
        return jsa
    logger.info("闲频滤波: 中心 %.6e rad/s，带宽 %.3e rad/s", band["center"], band["width"])
    return filter_band(jsa, Polarization.IDLER, float(band["center"]), float(band["width"]),
                       band.get("shape", "rect"))


def signal_stop_band(config: ScenarioConfig, spectrum: SchmidtSpectrum) -> np.ndarray:
    sig = config.assembly(Polarization.SIGNAL)
    return stop_band_mask(sig.dbr, sig.detuning(spectrum.grid_s.values))


def analyze(config: ScenarioConfig, jsa: JsaMatrix) -> SchmidtSpectrum:
    return schmidt_decompose(apply_configured_filter(config, jsa),
                             truncation=float(config.get("schmidt.truncation")))


def run_schmidt(config: ScenarioConfig, out_dir: Optional[str] = None,
                matrix_path: Optional[str] = None, workers: Optional[int] = None,
                progress_callback: ProgressCallback = None) -> RunResult:
    """Schmidt 分析：λ 表、度量 JSON、前几个模式的频谱与时域波包"""
    out_dir = resolve_out_dir(config, out_dir)
    jsa = load_jsa(matrix_path) if matrix_path else compute_jsa(config, workers, progress_callback)
    spectrum = analyze(config, jsa)
    m = metrics(spectrum)
    mask = signal_stop_band(config, spectrum)

    outputs = [write_csv(os.path.join(out_dir, "schmidt_lambdas.csv"),
                         {"j": np.arange(1, spectrum.n_modes + 1), "lambda": spectrum.lambdas})]
    report = m.to_dict()
    report.update({
        "n_modes": spectrum.n_modes,
        "discarded_weight": spectrum.discarded_weight,
        "purity_times_cooperativity": m.purity_p * m.cooperativity_K,
        "stop_band_weight": [mode_band_weight(spectrum, j, mask)
                             for j in range(min(spectrum.n_modes, 8))],
        "lambdas_top": [float(x) for x in spectrum.lambdas[:8]],
        "idler_filter": config.get("schmidt.idler_filter"),
        "source_matrix": os.path.basename(matrix_path) if matrix_path else None,
    })
    outputs.append(write_json(os.path.join(out_dir, "schmidt_metrics.json"), report))

    omega = spectrum.grid_s.values
    for j in range(min(int(config.get("schmidt.n_mode_files")), spectrum.n_modes)):
        psi = spectrum.psi[j]
        outputs.append(write_csv(os.path.join(out_dir, f"schmidt_mode_{j + 1}.csv"),
                                 {"omega": omega, "re_psi": psi.real, "im_psi": psi.imag,
                                  "abs_psi2": np.abs(psi) ** 2}))
    for j in range(min(int(config.get("schmidt.n_temporal_modes")), spectrum.n_modes)):
        t, v = temporal_mode(spectrum, j)
        outputs.append(write_csv(os.path.join(out_dir, f"temporal_mode_{j + 1}.csv"),
                                 {"t": t, "re_v": v.real, "im_v": v.imag,
                                  "abs_v2": np.abs(v) ** 2}))
    logger.info("Schmidt分析: λ₁=%.6f, S=%.4f bit, K=%.5f",
                spectrum.lambdas[0], m.entropy_S, m.cooperativity_K)
    return _finish("schmidt", config, out_dir, outputs)


def sweep_overrides(param: str, value) -> List[str]:
    keys = SWEEP_ALIASES.get(param, (param,))
    return [f"{key}={json.dumps(value, ensure_ascii=False)}" for key in keys]


def run_sweep(config: ScenarioConfig, param: str, values: Sequence,
              out_dir: Optional[str] = None, workers: Optional[int] = None,
              progress_callback: ProgressCallback = None) -> RunResult:
    """对单个参数扫描，输出 (value, lambda_1, entropy_S, cooperativity_K)"""
    out_dir = resolve_out_dir(config, out_dir)
    rows = {"value": [], "lambda_1": [], "entropy_S": [], "cooperativity_K": []}
    for index, value in enumerate(values, start=1):
        point = config.with_overrides(sweep_overrides(param, value))
        spectrum = analyze(point, compute_jsa(point, workers))
        m = metrics(spectrum)
        rows["value"].append(value)
        rows["lambda_1"].append(float(spectrum.lambdas[0]))
        rows["entropy_S"].append(m.entropy_S)
        rows["cooperativity_K"].append(m.cooperativity_K)
        if progress_callback:
            progress_callback(f"参数扫描进度: {index}/{len(values)} ({param}={value})")
    path = write_csv(os.path.join(out_dir, "sweep.csv"), rows)
    return _finish("sweep", config, out_dir, [path])
