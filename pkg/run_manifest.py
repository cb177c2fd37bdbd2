#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
微腔PDC模拟器 - 运行清单
每次命令运行后在输出目录写出：
  resolved_config.json - 已换算单位的完整场景配置，可直接作为 --config 复现本次运行
  run_manifest.json    - 配置快照、工具版本、起止时间、各输出文件的 SHA-256 摘要
时间戳只出现在清单中，数据文件本身不含时间信息

作者：Lxx   更新时间：2026-10-16
"""

import hashlib
import json
import logging
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime
from typing import Dict, Optional

from path_helper import get_resource_path
from result_io import write_json

logger = logging.getLogger(__name__)

MANIFEST_FILE = "run_manifest.json"
RESOLVED_CONFIG_FILE = "resolved_config.json"


def get_tool_version() -> str:
    """从 version.json 读取工具版本号"""
    try:
        with open(get_resource_path("version.json"), "r", encoding="utf-8") as f:
            return json.load(f)["project"]["version"]
    except (OSError, KeyError, json.JSONDecodeError) as e:
        logger.warning("读取版本信息失败: %s", e)
        return "unknown"


def file_digest(path: str) -> str:
    sha = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            sha.update(chunk)
    return sha.hexdigest()


@dataclass
class RunManifest:
    """一次命令运行的记录"""
    command: str
    config: dict
    tool_version: str = field(default_factory=get_tool_version)
    started_at: str = field(default_factory=lambda: datetime.now().isoformat(timespec="seconds"))
    finished_at: Optional[str] = None
    outputs: Dict[str, str] = field(default_factory=dict)

    def add_output(self, path: str, out_dir: str) -> None:
        rel = os.path.relpath(path, out_dir).replace(os.sep, "/")
        self.outputs[rel] = file_digest(path)

    def finish(self, out_dir: str) -> str:
        """写出配置快照与清单，返回清单路径"""
        config_path = write_json(os.path.join(out_dir, RESOLVED_CONFIG_FILE), self.config)
        self.add_output(config_path, out_dir)
        self.finished_at = datetime.now().isoformat(timespec="seconds")
        manifest_path = write_json(os.path.join(out_dir, MANIFEST_FILE), asdict(self))
        logger.info("运行清单已写入: %s (%d 个输出文件)", manifest_path, len(self.outputs))
        return manifest_path


def load_manifest(path: str) -> RunManifest:
    with open(path, "r", encoding="utf-8") as f:
        return RunManifest(**json.load(f))
