#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
功能检查器 - 检查运行环境、场景模板与各数值模块的自洽性

作者：Lxx
更新时间：2026-10-17
"""

import math
import sys
import traceback

from path_helper import SCENARIO_TEMPLATE_DIR, get_resource_path


class FunctionChecker:
    """功能检查器类"""

    def __init__(self, log_callback=None):
        self.log_callback = log_callback or print
        self.check_results = {}
        self.config_path = None
        self.overrides = []

    def log(self, message):
        """记录日志"""
        if self.log_callback:
            self.log_callback(message if isinstance(message, str) else str(message))

    def check_python_environment(self):
        """检查Python环境"""
        self.log("检查Python环境...")
        version = sys.version_info
        if version >= (3, 8):
            self.log(f"  Python版本: {version.major}.{version.minor}.{version.micro}")
            return True
        self.log(f"  Python版本过低: {version.major}.{version.minor}.{version.micro} (需要≥3.8)")
        return False

    def check_required_modules(self):
        """检查必需的Python模块"""
        self.log("检查必需模块...")
        required_modules = [
            ("numpy", "数组与复数运算"),
            ("scipy", "稠密矩阵分解与物理常数"),
            ("pandas", "CSV结果输出"),
        ]
        failed_modules = []
        for module_name, description in required_modules:
            try:
                module = __import__(module_name)
                self.log(f"  [OK] {module_name} {getattr(module, '__version__', '')} - {description}")
            except ImportError as e:
                self.log(f"  [ERROR] {module_name} - {description}: {e}")
                failed_modules.append(module_name)
        return len(failed_modules) == 0

    def check_optional_modules(self):
        """检查可选模块（只显示信息）"""
        self.log("检查可选模块...")
        for module_name, description, package_name in (("pytest", "单元测试", "pytest"),
                                                        ("PyInstaller", "exe打包功能", "pyinstaller")):
            try:
                __import__(module_name)
                self.log(f"  [OK] {module_name} - {description}")
            except ImportError:
                self.log(f"  [INFO] {module_name} - {description}: 未安装 (pip install {package_name})")
        return True

    def check_project_modules(self):
        """检查项目模块"""
        self.log("检查项目模块...")
        project_modules = [
            ("dispersion", "色散模型"),
            ("dbr", "DBR耦合模解"),
            ("cavity", "DBR微腔"),
            ("jsa", "联合谱幅度"),
            ("schmidt", "Schmidt分解"),
            ("scenario_config", "场景配置"),
            ("simulation_runner", "运行流程"),
        ]
        failed = []
        for module_name, description in project_modules:
            try:
                __import__(module_name)
                self.log(f"  [OK] {module_name} - {description}")
            except Exception as e:
                self.log(f"  [ERROR] {module_name} - {description}: {e}")
                failed.append(module_name)
        return not failed

    def check_scenario_templates(self):
        """检查内置场景模板"""
        from scenario_validator import ScenarioValidator

        self.log("检查场景模板...")
        validator = ScenarioValidator()
        results = validator.validate_all_scenarios_in_directory(get_resource_path(SCENARIO_TEMPLATE_DIR))
        if not results:
            self.log(f"  [ERROR] 未找到场景模板: {SCENARIO_TEMPLATE_DIR}")
            return False
        ok = True
        for name, result in results.items():
            if result['is_valid']:
                self.log(f"  [OK] {name} (警告 {result['warning_count']})")
            else:
                ok = False
                self.log(f"  [ERROR] {name}")
                for error in result['errors'][:3]:
                    self.log(f"       • {error}")
        return ok

    def check_selected_scenario(self):
        """检查本次指定的场景（含 --set 覆盖）能否加载"""
        from scenario_config import load_scenario

        self.log("检查指定场景...")
        config = load_scenario(self.config_path, self.overrides)
        sig, idl = config.assemblies()
        self.log(f"  [OK] {config.get('name')}: κL={sig.dbr.kappa_length:.3f}, "
                 f"ρ²={sig.mirror.rho_squared:.4f}, 网格 {config.get('grid.n_points')} 点")
        return True

    def check_dbr_closed_form(self):
        """Δ = 0 时 |t|² = sech²(κL)、|r|² = tanh²(κL)，以及能量守恒与分支无关性"""
        import numpy as np
        from dbr import DbrParams, dbr_coefficients, energy_defect, fields_for_root, principal_root

        self.log("检查DBR闭式解...")
        ok = True
        for kl in (0.5, 4.0, 8.0):
            params = DbrParams(kappa=kl / 4e-3, length=4e-3, grating_k=1.0e7)
            c = dbr_coefficients(params, 0.0)
            err = max(abs(abs(c.t) ** 2 - 1.0 / math.cosh(kl) ** 2),
                      abs(abs(c.r) ** 2 - math.tanh(kl) ** 2))
            ok &= err < 1e-12
            self.log(f"  κL={kl}: 闭式解误差 {err:.2e}")

        params = DbrParams(kappa=2e3, length=4e-3, grating_k=1.0e7)
        deltas = np.linspace(-6 * params.kappa, 6 * params.kappa, 101)
        defect = float(np.max(energy_defect(params, deltas)))
        s = principal_root(params, deltas)
        x = 0.37 * params.length
        a = fields_for_root(params, deltas, x, s)
        b = fields_for_root(params, deltas, x, -s)
        branch = max(float(np.max(np.abs(np.asarray(getattr(a, n)) - np.asarray(getattr(b, n)))))
                     for n in ("Q", "P", "V", "W"))
        self.log(f"  能量守恒最大偏差 {defect:.2e}，分支切换最大差 {branch:.2e}")
        return ok and defect < 1e-10 and branch < 1e-10

    def check_cavity_passivity(self):
        """指定场景扫描带内 |R| ≤ 1 且 |R|² + |t|²|A₂|² = 1"""
        import numpy as np
        from cavity import cavity_response
        from scenario_config import load_scenario

        self.log("检查微腔无源性...")
        config = load_scenario(self.config_path, self.overrides)
        assembly = config.assembly(config.get("scan.arm"))
        omega = config.scan_grid().values
        resp = cavity_response(assembly, omega)
        worst = float(np.max(np.abs(resp.R)))
        balance = float(np.max(np.abs(np.abs(resp.R) ** 2
                                      + np.abs(resp.t) ** 2 * np.abs(resp.a2) ** 2 - 1.0)))
        self.log(f"  max|R|={worst:.12f}，能量平衡偏差 {balance:.2e}")
        return worst <= 1 + 1e-9 and balance < 1e-9

    def check_bulk_limit(self):
        """无光栅无腔镜时相位匹配积分与 sinc 闭式解一致"""
        import numpy as np
        from cavity import CavityAssembly, MirrorParams
        from dbr import DbrParams
        from dispersion import DispersionModel, Polarization
        from jsa import bulk_phase_matching, phase_matching_integral_analytic

        self.log("检查体晶体极限...")
        model = DispersionModel.ktp_default(speed_of_light=3.0e8)
        mirror = MirrorParams(rho=0.0, tau=1.0)
        arms = [CavityAssembly(DbrParams(0.0, 4e-3, 1.0e7), mirror, 0.1999e-3, model, pol, "unit")
                for pol in (Polarization.SIGNAL, Polarization.IDLER)]
        worst = 0.0
        for ws, wi in ((2.3552e15, 2.3572e15), (model.omega0, model.omega0), (2.3560e15, 2.3555e15)):
            got = phase_matching_integral_analytic(arms[0], arms[1], model, ws, wi)
            ref = complex(bulk_phase_matching(model, ws, wi, 4e-3, 0.1999e-3))
            worst = max(worst, abs(got - ref) / 4e-3)
        self.log(f"  最大相对偏差 {worst:.2e}")
        return worst < 1e-10

    def check_schmidt_consistency(self):
        """随机复矩阵上 SVD 本征值与约化密度矩阵本征值一致"""
        import numpy as np
        from jsa import FrequencyGrid, JsaMatrix
        from schmidt import density_eigenvalues, reduced_density, schmidt_decompose

        self.log("检查Schmidt分解...")
        rng = np.random.default_rng(7)
        values = rng.normal(size=(24, 24)) + 1j * rng.normal(size=(24, 24))
        grid = FrequencyGrid(1.0, 2.0, 24)
        jsa = JsaMatrix(grid, grid, values)
        spectrum = schmidt_decompose(jsa, truncation=0.0)
        err = max(float(np.max(np.abs(spectrum.lambdas - density_eigenvalues(reduced_density(jsa, side)))))
                  for side in ("signal", "idler"))
        total = abs(float(spectrum.lambdas.sum()) - 1.0)
        self.log(f"  本征值最大差 {err:.2e}，Σλ−1 = {total:.2e}")
        return err < 1e-10 and total < 1e-12

    def run_all_checks(self, config_path=None, overrides=None):
        """运行全部检查"""
        self.config_path = config_path
        self.overrides = list(overrides or [])
        self.check_results = {}
        self.log("开始综合功能检查...")
        self.log("=" * 60)

        checks = [
            ("Python环境", self.check_python_environment),
            ("必需模块", self.check_required_modules),
            ("可选模块", self.check_optional_modules),
            ("项目模块", self.check_project_modules),
            ("场景模板", self.check_scenario_templates),
            ("指定场景", self.check_selected_scenario),
            ("DBR闭式解", self.check_dbr_closed_form),
            ("微腔无源性", self.check_cavity_passivity),
            ("体晶体极限", self.check_bulk_limit),
            ("Schmidt分解", self.check_schmidt_consistency),
        ]

        passed_checks = 0
        for check_name, check_func in checks:
            self.log(f"\n=== 检查 {check_name} ===")
            try:
                result = bool(check_func())
            except Exception as e:
                self.log(f"  [ERROR] {check_name} 检查失败: {e}")
                result = False
            self.check_results[check_name] = result
            passed_checks += result

        total_checks = len(checks)
        self.log("\n" + "=" * 60)
        self.log("功能检查总结:")
        self.log(f"  通过检查: {passed_checks}/{total_checks}")
        for check_name, result in self.check_results.items():
            self.log(f"  {'[OK]' if result else '[ERROR]'} {check_name}")
        if not self.check_results.get("必需模块", True):
            self.log("\n解决建议:\n  • 安装缺失的Python包: pip install -r requirements.txt")
        return passed_checks == total_checks


if __name__ == "__main__":
    try:
        success = FunctionChecker().run_all_checks()
        print(f"\n{'=' * 60}")
        print("功能检查完成，所有功能正常！" if success else "功能检查发现问题，请查看上方详细信息。")
        sys.exit(0 if success else 3)
    except KeyboardInterrupt:
        print("\n检查被用户中断")
    except Exception as e:
        print(f"\n检查过程中发生错误: {e}")
        traceback.print_exc()
        sys.exit(3)
