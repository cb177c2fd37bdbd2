#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
路径辅助工具模块
统一管理场景模板、输出目录等路径的获取

作者：Lxx
"""

import os
import sys

SCENARIO_TEMPLATE_DIR = os.path.join("template", "scenario_templates")
DEFAULT_SCENARIO_FILE = "default_rho095.json"


def get_resource_path(relative_path):
    """获取资源文件的绝对路径（用于场景模板、version.json等打包资源）

    打包后返回临时解压目录；开发环境返回本模块所在目录
    """
    try:
        # PyInstaller创建临时文件夹，将路径存储在_MEIPASS中
        base_path = sys._MEIPASS
    except AttributeError:
        base_path = os.path.dirname(os.path.abspath(__file__))

    return os.path.join(base_path, relative_path)


def get_app_path(relative_path=""):
    """获取应用程序运行目录的路径（用于output等结果目录）

    打包后返回exe所在目录；开发环境返回当前工作目录
    """
    if getattr(sys, 'frozen', False):
        base_path = os.path.dirname(sys.executable)
    else:
        base_path = os.path.abspath(".")

    if relative_path:
        return os.path.join(base_path, relative_path)
    return base_path


def get_scenario_path(name=DEFAULT_SCENARIO_FILE):
    """获取内置场景模板的路径；传入已存在的路径时原样返回"""
    if os.path.exists(name):
        return os.path.abspath(name)
    if not name.endswith(".json"):
        name += ".json"
    return get_resource_path(os.path.join(SCENARIO_TEMPLATE_DIR, name))


def list_scenarios():
    """列出内置场景模板文件名"""
    folder = get_resource_path(SCENARIO_TEMPLATE_DIR)
    if not os.path.isdir(folder):
        return []
    return sorted(f for f in os.listdir(folder) if f.endswith(".json"))


def ensure_dir(path):
    """确保目录存在，不存在则创建"""
    if not os.path.exists(path):
        os.makedirs(path, exist_ok=True)
    return path
