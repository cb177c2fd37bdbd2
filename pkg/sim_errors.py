#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
微腔PDC模拟器 - 异常定义
所有模块共用的异常层次，命令行入口据此映射退出码：
  配置类错误 -> 2，数值类错误 -> 3

作者：Lxx   更新时间：2026-10-12
"""

from typing import List, Optional


class SimulationError(Exception):
    """模拟器异常基类"""


class DomainError(SimulationError, ValueError):
    """参数超出定义域（ω ≤ 0、x 不在 [0, L] 内、模式序号越界等）"""


class ScenarioConfigError(SimulationError, ValueError):
    """场景配置文件解析或校验失败"""

    def __init__(self, message: str, errors: Optional[List[str]] = None):
        super().__init__(message)
        self.errors = list(errors or [])

    def __str__(self):
        base = super().__str__()
        if not self.errors:
            return base
        return base + "\n" + "\n".join(f"  • {e}" for e in self.errors)


class NumericalError(SimulationError, ArithmeticError):
    """数值计算失败"""


class SingularityError(NumericalError):
    """分母（DBR 的 D 或腔的 f）低于下溢阈值"""


class QuadratureError(NumericalError):
    """复合求积在加密后仍未收敛"""

    def __init__(self, message: str, coarse: complex = 0j, fine: complex = 0j,
                 n_panels: int = 0):
        super().__init__(message)
        self.coarse = coarse
        self.fine = fine
        self.n_panels = n_panels

    def __str__(self):
        return (f"{super().__str__()} (面板数={self.n_panels}, 粗={self.coarse!r}, "
                f"细={self.fine!r}, 差={abs(self.fine - self.coarse):.3e})")
