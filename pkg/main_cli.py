#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
微腔PDC模拟器 - 命令行入口

用法：
  python main_cli.py dbr-spectrum    --config single_grating_vacuum
  python main_cli.py cavity-spectrum --config single_grating_vacuum --out output/single_grating
  python main_cli.py jsa             --grid-points 297 --workers 4
  python main_cli.py schmidt         --matrix output/jsa.json
  python main_cli.py sweep           --param rho_squared --values 0.95,0.99
  python main_cli.py check

退出码：0 成功；2 配置错误；3 数值失败或自检未通过

作者：Lxx   更新时间：2026-10-17
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

import simulation_runner as runner
from scenario_config import load_scenario
from sim_errors import ScenarioConfigError, SimulationError

logger = logging.getLogger("main_cli")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", default=None,
                        help="场景配置文件路径或内置模板名（缺省为 default_rho095）")
    parser.add_argument("--out", default=None, help="输出目录（覆盖 output.dir）")
    parser.add_argument("--grid-points", type=int, default=None,
                        help="JSA网格点数（覆盖 grid.n_points）")
    parser.add_argument("--workers", type=int, default=None, help="JSA构建线程数")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="按键路径覆盖配置，可重复，如 mirror.rho_squared=0.99")
    parser.add_argument("-v", "--verbose", action="store_true", help="输出调试日志")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dbr-pdc",
        description="DBR微腔参量下转换：联合谱幅度与Schmidt分解模拟器")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (("dbr-spectrum", "DBR反射/透射谱"),
                            ("cavity-spectrum", "微腔反射谱与腔内强度"),
                            ("jsa", "构建联合谱幅度矩阵"),
                            ("check", "环境与数值自检")):
        _add_common(sub.add_parser(name, help=help_text))

    schmidt = sub.add_parser("schmidt", help="Schmidt分解与纠缠度量")
    _add_common(schmidt)
    schmidt.add_argument("--matrix", default=None, help="jsa命令写出的矩阵文件（.json/.bin）")

    sweep = sub.add_parser("sweep", help="参数扫描")
    _add_common(sweep)
    sweep.add_argument("--param", required=True,
                       help="参数键路径或简写（rho_squared、kappa、sigma、gap、length）")
    sweep.add_argument("--values", default="", help="逗号分隔的取值列表，可为空")
    return parser


def parse_values(text: str) -> List:
    """解析扫描取值：逐项按 JSON 解析，失败时保留字符串（如 "2/mm"）"""
    values = []
    for item in (s.strip() for s in text.split(",")):
        if not item:
            continue
        try:
            values.append(json.loads(item))
        except json.JSONDecodeError:
            values.append(item)
    return values


def setup_logging(verbose: bool) -> None:
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO,
                        format="[%(levelname)s] %(message)s", force=True)


def run_command(args: argparse.Namespace) -> int:
    overrides = list(args.overrides)
    if args.grid_points is not None:
        overrides.append(f"grid.n_points={args.grid_points}")

    if args.command == "check":
        from function_checker import FunctionChecker
        checker = FunctionChecker(log_callback=logger.info)
        return EXIT_OK if checker.run_all_checks(args.config, overrides) else EXIT_NUMERICAL

    config = load_scenario(args.config, overrides)
    progress = logger.info
    if args.command == "dbr-spectrum":
        result = runner.run_dbr_spectrum(config, args.out)
    elif args.command == "cavity-spectrum":
        result = runner.run_cavity_spectrum(config, args.out)
    elif args.command == "jsa":
        result = runner.run_jsa(config, args.out, args.workers, progress)
    elif args.command == "schmidt":
        result = runner.run_schmidt(config, args.out, args.matrix, args.workers, progress)
    else:
        result = runner.run_sweep(config, args.param, parse_values(args.values),
                                  args.out, args.workers, progress)

    for path in result.outputs:
        logger.info("[OK] %s", path)
    logger.info("[OK] 运行清单: %s", result.manifest_path)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)
    try:
        return run_command(args)
    except ScenarioConfigError as e:
        logger.error("配置错误: %s", e)
        return EXIT_CONFIG
    except SimulationError as e:
        logger.error("数值计算失败: %s", e)
        return EXIT_NUMERICAL
    except OSError as e:
        logger.error("文件读写失败: %s", e)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
