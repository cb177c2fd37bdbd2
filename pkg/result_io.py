#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
微腔PDC模拟器 - 结果文件读写
  - CSV：科学计数法 17 位有效数字，固定列顺序与换行符，重复运行逐字节一致
  - JSA矩阵：<名称>.bin 为小端 complex128 行主序数据，<名称>.json 为形状、单位与网格描述
  - JSON：键排序、UTF-8、末尾换行

作者：Lxx   更新时间：2026-10-15
"""

import json
import logging
import os
from typing import Dict, List, Sequence

import numpy as np
import pandas as pd

from jsa import FrequencyGrid, JsaMatrix
from path_helper import ensure_dir
from sim_errors import ScenarioConfigError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.16e"
MATRIX_DTYPE = "<c16"
MATRIX_FORMAT = "dbr-pdc-jsa"


def write_csv(path: str, columns: Dict[str, Sequence], decimation: int = 1) -> str:
    """按列写 CSV

    Args:
        path: 输出文件路径
        columns: 有序的 {列名: 数据} 字典，各列等长
        decimation: 每隔多少行输出一行（≥1）

    Returns:
        写入的文件路径
    """
    if decimation < 1:
        raise ScenarioConfigError(f"CSV抽取间隔必须不小于1: {decimation}")
    frame = pd.DataFrame({name: np.asarray(values) for name, values in columns.items()},
                         columns=list(columns))
    if decimation > 1:
        frame = frame.iloc[::decimation]
    ensure_dir(os.path.dirname(os.path.abspath(path)))
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n",
                 encoding="utf-8")
    logger.debug("已写入CSV: %s (%d 行)", path, len(frame))
    return path


def read_csv(path: str) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")


def write_json(path: str, data) -> str:
    ensure_dir(os.path.dirname(os.path.abspath(path)))
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(data, f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")
    return path


def _matrix_paths(path: str):
    stem, ext = os.path.splitext(path)
    if ext not in (".bin", ".json"):
        stem = path
    return stem + ".bin", stem + ".json"


def save_jsa(jsa: JsaMatrix, path: str) -> List[str]:
    """保存 JSA 矩阵，返回 [数据文件, 描述文件]"""
    bin_path, meta_path = _matrix_paths(path)
    ensure_dir(os.path.dirname(os.path.abspath(bin_path)))
    data = np.ascontiguousarray(jsa.values, dtype=MATRIX_DTYPE)
    with open(bin_path, "wb") as f:
        f.write(data.tobytes(order="C"))
    sidecar = {
        "format": MATRIX_FORMAT,
        "shape": list(jsa.shape),
        "dtype": "complex128",
        "byte_order": "little",
        "layout": "row-major, element [m][n] = B(omega_s[m], omega_i[n])",
        "units": {"omega": "rad/s", "values": "arbitrary"},
        "data_file": os.path.basename(bin_path),
        "grid_s": jsa.grid_s.to_dict(),
        "grid_i": jsa.grid_i.to_dict(),
        "metadata": jsa.metadata,
    }
    write_json(meta_path, sidecar)
    logger.info("JSA矩阵已保存: %s", bin_path)
    return [bin_path, meta_path]


def load_jsa(path: str) -> JsaMatrix:
    """读取 save_jsa 写出的矩阵（可传 .bin、.json 或不带扩展名的路径）

    Raises:
        ScenarioConfigError: 文件缺失或描述与数据不一致
    """
    bin_path, meta_path = _matrix_paths(path)
    for p in (bin_path, meta_path):
        if not os.path.exists(p):
            raise ScenarioConfigError(f"矩阵文件不存在: {p}")
    try:
        with open(meta_path, "r", encoding="utf-8") as f:
            sidecar = json.load(f)
    except json.JSONDecodeError as e:
        raise ScenarioConfigError(f"矩阵描述文件JSON格式错误: {meta_path}",
                                  [f"第{e.lineno}行第{e.colno}列: {e.msg}"]) from None
    if sidecar.get("format") != MATRIX_FORMAT:
        raise ScenarioConfigError(f"不是JSA矩阵描述文件: {meta_path}")
    shape = tuple(int(n) for n in sidecar["shape"])
    raw = np.fromfile(bin_path, dtype=MATRIX_DTYPE)
    if raw.size != shape[0] * shape[1]:
        raise ScenarioConfigError(
            f"矩阵数据长度{raw.size}与描述的形状{shape}不一致: {bin_path}")
    values = raw.reshape(shape).astype(complex)
    return JsaMatrix(FrequencyGrid.from_dict(sidecar["grid_s"]),
                     FrequencyGrid.from_dict(sidecar["grid_i"]),
                     values, dict(sidecar.get("metadata") or {}))


def write_jsa_csv(jsa: JsaMatrix, path: str, decimation: int = 1,
                  include_parts: bool = False) -> str:
    """把 |B|（可选 Re/Im）按 (ω_s, ω_i) 长表写出，行列各自按 decimation 抽取"""
    if decimation < 1:
        raise ScenarioConfigError(f"CSV抽取间隔必须不小于1: {decimation}")
    ws = jsa.grid_s.values[::decimation]
    wi = jsa.grid_i.values[::decimation]
    block = jsa.values[::decimation, ::decimation]
    mesh_s, mesh_i = np.meshgrid(ws, wi, indexing="ij")
    columns = {"omega_s": mesh_s.ravel(), "omega_i": mesh_i.ravel(),
               "abs_B": np.abs(block).ravel()}
    if include_parts:
        columns["re_B"] = block.real.ravel()
        columns["im_B"] = block.imag.ravel()
    return write_csv(path, columns)
