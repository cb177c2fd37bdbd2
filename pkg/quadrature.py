#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
微腔PDC模拟器 - 复合高斯-勒让德求积
面板数按被积函数最短振荡周期确定，加倍面板数检查收敛

作者：Lxx   更新时间：2026-10-13
"""

import logging
import math
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from sim_errors import DomainError, QuadratureError

logger = logging.getLogger(__name__)


@lru_cache(maxsize=32)
def _reference_rule(order: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def composite_rule(a: float, b: float, n_panels: int, order: int = 8):
    """[a, b] 上等分 n_panels 个面板、每面板 order 个节点的求积节点与权重"""
    if n_panels < 1 or order < 1:
        raise DomainError(f"面板数与阶数必须为正: n_panels={n_panels}, order={order}")
    ref_x, ref_w = _reference_rule(order)
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * ref_x[None, :]).ravel()
    weights = (half[:, None] * ref_w[None, :]).ravel()
    return nodes, weights


def panels_for_oscillation(max_rate: float, length: float, order: int = 8,
                           points_per_period: int = 20) -> int:
    """保证每个最短周期 2π/max_rate 内至少 points_per_period 个节点的面板数"""
    periods = max_rate * length / (2.0 * math.pi)
    return max(1, int(math.ceil(points_per_period * periods / order)))


def integrate(func: Callable[[np.ndarray], np.ndarray], a: float, b: float,
              n_panels: int, order: int = 8) -> complex:
    nodes, weights = composite_rule(a, b, n_panels, order)
    return complex(np.dot(weights, func(nodes)))


def integrate_converged(func: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                        n_panels: int, order: int = 8, tol: float = 1e-9) -> complex:
    """加倍面板数复算一次，两次结果之差须小于 tol·∫|f|

    Returns:
        细网格结果

    Raises:
        QuadratureError: 未收敛
    """
    coarse = integrate(func, a, b, n_panels, order)
    nodes, weights = composite_rule(a, b, 2 * n_panels, order)
    values = func(nodes)
    fine = complex(np.dot(weights, values))
    scale = float(np.dot(weights, np.abs(values)))
    if abs(fine - coarse) > tol * max(scale, np.finfo(float).tiny):
        raise QuadratureError("相位匹配积分求积不收敛", coarse=coarse, fine=fine,
                              n_panels=2 * n_panels)
    return fine
