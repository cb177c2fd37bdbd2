#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
启动脚本 - 用于开发阶段运行命令行程序

用法：
  python run_cli.py schmidt --grid-points 297

作者：Lxx
更新时间：2026-10-17
"""

import sys
import os

# 添加当前目录到Python路径
current_dir = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, current_dir)

try:
    from main_cli import main
    sys.exit(main())
except ImportError as e:
    print(f"[ERROR] 导入失败: {e}")
    print("请确保所有依赖文件都在同一目录下，并已执行 pip install -r requirements.txt")
    sys.exit(2)
