# 自检系统: 特殊函数恒等式, 平方根引理抽样, D_ν 闭式与积分对照, 矩的分支连续性, 已知变换对反演

import cmath
import itertools
import logging
import math
from typing import Callable, Dict, List, Optional

import numpy as np

from engine.core.exceptions import InputValidationError, PricingEngineError
from engine.core.systems.complex_kernel import ComplexKernel
from engine.core.systems.laplace_inversion import LaplaceInversion
from engine.core.systems.transform_core import TransformCore
from shared.constants import MC_CONFIG, SELFCHECK_CONFIG, SELFCHECK_SUITES, WEBER_GRID
from shared.schemas import (
    CheckResult,
    InversionConfig,
    KernelConfig,
    SelfcheckReport,
    TransformConfig,
)
from shared.utils import relative_error

logger = logging.getLogger(__name__)


def weber_grid() -> List[tuple]:
    """(a, ν, z) 对照网格, 顺序固定"""
    return list(itertools.product(WEBER_GRID["A_VALUES"], WEBER_GRID["NU_VALUES"], WEBER_GRID["Z_VALUES"]))


class SelfCheckSystem:
    """自检核心类"""

    @staticmethod
    def _result(name: str, errors: List[float], threshold: float, detail: str = "") -> CheckResult:
        max_error = max(errors) if errors else 0.0
        return CheckResult(
            name=name,
            passed=bool(max_error <= threshold),
            max_error=max_error,
            threshold=threshold,
            detail=detail,
        )

    @staticmethod
    def _failed(name: str, threshold: float, error: Exception) -> CheckResult:
        return CheckResult(name=name, passed=False, max_error=math.inf, threshold=threshold, detail=str(error))

    # ------------------------------------------------------------------
    # kernel
    # ------------------------------------------------------------------
    @staticmethod
    def check_kernel(tolerance: Optional[float] = None, config: Optional[KernelConfig] = None) -> List[CheckResult]:
        config = config or KernelConfig()
        checks = []

        # 平方根: √w² = w, 实部为正
        threshold = tolerance or SELFCHECK_CONFIG["SQRT_TOL"]
        rng = np.random.default_rng(MC_CONFIG["SEED"])
        w = rng.uniform(-50, 50, 2000) + 1j * rng.uniform(-50, 50, 2000)
        root = ComplexKernel.principal_sqrt(w)
        errors = list(np.abs(root * root - w) / np.abs(w))
        if (root.real <= 0).any():
            errors.append(math.inf)
        checks.append(SelfCheckSystem._result("sqrt_round_trip", errors, threshold))

        # 对数Gamma: 已知值与递推 Γ(w+1) = wΓ(w)
        threshold = tolerance or SELFCHECK_CONFIG["LOG_GAMMA_TOL"]
        known = {0.5: 0.5 * math.log(math.pi), 1.0: 0.0, 2.0: 0.0, 5.0: math.log(24.0), 10.5: math.lgamma(10.5)}
        errors = [abs(ComplexKernel.log_gamma(w) - value) for w, value in known.items()]
        for w in (0.3 + 0.2j, 0.6 - 4j, 1.5 + 10j, 7.25 - 0.5j, 20 + 20j):
            ratio = cmath.exp(ComplexKernel.log_gamma(w + 1) - ComplexKernel.log_gamma(w))
            errors.append(abs(ratio - w) / abs(w))
        checks.append(SelfCheckSystem._result("log_gamma", errors, threshold))

        # Bessel: 半整数阶闭式 (含渐近区) 与三项递推
        threshold = tolerance or SELFCHECK_CONFIG["BESSEL_TOL"]
        errors = []
        for xi in (0.1, 1.0, 10.0, 45.0, 80.0, 150.0):
            base = math.sqrt(2.0 / (math.pi * xi))
            sinh_scaled = base * 0.5 * -math.expm1(-2.0 * xi)
            cosh_scaled = base * 0.5 * (1.0 + math.exp(-2.0 * xi))
            errors.append(relative_error(ComplexKernel.bessel_i(0.5, xi, scaled=True, config=config).real, sinh_scaled))
            errors.append(relative_error(ComplexKernel.bessel_i(-0.5, xi, scaled=True, config=config).real, cosh_scaled))
        mu = 2.3 + 1.1j
        for xi in (0.5, 5.0, 30.0, 90.0):
            lower = ComplexKernel.bessel_i(mu - 1.0, xi, scaled=True, config=config)
            upper = ComplexKernel.bessel_i(mu + 1.0, xi, scaled=True, config=config)
            middle = ComplexKernel.bessel_i(mu, xi, scaled=True, config=config)
            rhs = 2.0 * mu / xi * middle
            errors.append(abs(lower - upper - rhs) / abs(rhs))
        checks.append(SelfCheckSystem._result("bessel_i", errors, threshold))

        # Kummer: Φ(α, α; x) = e^x, Φ(1, 2; x) = (e^x - 1)/x, Kummer 变换
        threshold = tolerance or SELFCHECK_CONFIG["KUMMER_TOL"]
        errors = []
        for x in (0.5, 2.0, 5.0, 40.0, 200.0):
            errors.append(abs(ComplexKernel.kummer_phi(1.7 + 0.4j, 1.7 + 0.4j, x, scaled=True, config=config) - 1.0))
            exact = -math.expm1(-x) / x
            errors.append(relative_error(ComplexKernel.kummer_phi(1.0, 2.0, x, scaled=True, config=config).real, exact))
        alpha, beta = 2.5 + 1.5j, 4.0 - 0.5j
        for x in (0.5, 2.0, 5.0):
            direct = ComplexKernel.kummer_phi(alpha, beta, x, scaled=True, config=config)
            reflected = ComplexKernel.kummer_phi(beta - alpha, beta, -x, config=config)
            errors.append(abs(direct - reflected) / abs(reflected))
        checks.append(SelfCheckSystem._result("kummer_phi", errors, threshold))
        return checks

    # ------------------------------------------------------------------
    # sqrt-lemma
    # ------------------------------------------------------------------
    @staticmethod
    def check_sqrt_lemma(samples: Optional[int] = None, seed: int = MC_CONFIG["SEED"]) -> List[CheckResult]:
        """Re z ≥ 2, |Im ν| ≤ 1 时 Re √(2z + ν²) > |Re ν| 严格成立"""
        samples = samples or SELFCHECK_CONFIG["SQRT_LEMMA_SAMPLES"]
        rng = np.random.default_rng(seed)
        z = rng.uniform(2.0, 50.0, samples) + 1j * rng.uniform(-50.0, 50.0, samples)
        nu = rng.uniform(-10.0, 10.0, samples) + 1j * rng.uniform(-1.0, 1.0, samples)
        # 边界: Re z = 2, |Im ν| = 1
        edge = samples // 10
        z[:edge] = 2.0 + 1j * z[:edge].imag
        nu[:edge] = nu[:edge].real + 1j * np.where(np.arange(edge) % 2 == 0, 1.0, -1.0)

        mu = ComplexKernel.mu_param(z, nu)
        margin = mu.real - np.abs(nu.real)
        violations = int((margin <= 0).sum())
        return [
            CheckResult(
                name="sqrt_lemma",
                passed=violations == 0,
                max_error=float(violations),
                threshold=0.0,
                detail=f"{samples} 个样本, 最小间隔 {float(margin.min()):.6g}",
            )
        ]

    # ------------------------------------------------------------------
    # weber
    # ------------------------------------------------------------------
    @staticmethod
    def check_weber(
        points: Optional[int] = None,
        tolerance: Optional[float] = None,
        kernel_config: Optional[KernelConfig] = None,
        transform_config: Optional[TransformConfig] = None,
    ) -> List[CheckResult]:
        """闭式 D_ν 与积分表示在对照网格上的相对误差"""
        threshold = tolerance or SELFCHECK_CONFIG["WEBER_TOL"]
        grid = weber_grid()
        points = min(points or SELFCHECK_CONFIG["WEBER_GRID_POINTS"], len(grid))
        indices = np.unique(np.linspace(0, len(grid) - 1, points).round().astype(int))

        errors = []
        worst = ""
        for index in indices:
            a, nu, z = grid[index]
            try:
                closed = TransformCore.weber_D_closed(a, nu, z, kernel_config)
                quadrature = TransformCore.weber_D_quadrature(a, nu, z, kernel_config, transform_config)
            except PricingEngineError as e:
                return [SelfCheckSystem._failed("weber_closed_vs_quadrature", threshold, e)]
            error = abs(closed - quadrature) / abs(quadrature)
            if not errors or error > max(errors):
                worst = f"最大误差点 a={a}, ν={nu}, z={z}"
            errors.append(error)
        return [SelfCheckSystem._result("weber_closed_vs_quadrature", errors, threshold, f"{len(indices)} 个网格点, {worst}")]

    # ------------------------------------------------------------------
    # moments
    # ------------------------------------------------------------------
    @staticmethod
    def check_moments(tolerance: Optional[float] = None, config: Optional[TransformConfig] = None) -> List[CheckResult]:
        """矩在 ν = -1, -2, -3 附近分支切换处的连续性"""
        config = config or TransformConfig()
        threshold = tolerance or SELFCHECK_CONFIG["MOMENT_SEAM_TOL"]
        radius = config.singularity_radius
        moments: Dict[str, Callable] = {
            "first_moment": TransformCore.first_moment,
            "second_moment": TransformCore.second_moment,
        }
        checks = []
        for name, moment in moments.items():
            errors = []
            for x in (0.05, 0.25, 1.0):
                # 级数/正则分支与一般公式的切换处
                inside = moment(x, -1.0 + radius * (1.0 - 1e-6), config)
                outside = moment(x, -1.0 + radius * (1.0 + 1e-6), config)
                errors.append(abs(inside - outside) / abs(outside))
                for pole in (-2.0, -3.0):
                    left = moment(x, pole - 1e-10, config)
                    right = moment(x, pole + 1e-10, config)
                    centre = moment(x, pole, config)
                    errors.append(max(abs(left - centre), abs(right - centre)) / abs(centre))
            checks.append(SelfCheckSystem._result(f"{name}_seams", errors, threshold))

        errors = []
        for x in (0.05, 0.25, 1.0):
            exact = 0.5 * x * (math.expm1(4.0 * x) / (4.0 * x) - 1.0)
            errors.append(relative_error(TransformCore.second_moment(x, -1.0, config).real, exact))
        checks.append(SelfCheckSystem._result("second_moment_at_minus_one", errors, threshold))
        return checks

    # ------------------------------------------------------------------
    # inversion
    # ------------------------------------------------------------------
    @staticmethod
    def check_inversion(tolerance: Optional[float] = None, config: Optional[InversionConfig] = None) -> List[CheckResult]:
        """已知变换对的反演相对误差"""
        config = config or InversionConfig()
        threshold = tolerance or config.target_rel_tol
        cases = {"exp": (-1.0, 0.5, 2.0), "ramp": (1.0,), "shifted": (-1.0, 1.0, 3.0)}
        checks = []
        for name, params in cases.items():
            errors = []
            try:
                for c in params:
                    pair = LaplaceInversion.known_pair(name, c)
                    for t in (0.1, 1.0, 5.0):
                        result = LaplaceInversion.bromwich_invert(pair, t, config)
                        errors.append(relative_error(result.value, pair.original(t)))
            except PricingEngineError as e:
                checks.append(SelfCheckSystem._failed(f"invert_{name}", threshold, e))
                continue
            checks.append(SelfCheckSystem._result(f"invert_{name}", errors, threshold))
        return checks

    # ------------------------------------------------------------------
    # 汇总
    # ------------------------------------------------------------------
    @staticmethod
    def run(
        suite: str = "all",
        samples: Optional[int] = None,
        tolerance: Optional[float] = None,
        kernel_config: Optional[KernelConfig] = None,
        transform_config: Optional[TransformConfig] = None,
        inversion_config: Optional[InversionConfig] = None,
    ) -> SelfcheckReport:
        """
        运行自检套件

        Args:
            suite: kernel / sqrt-lemma / weber / moments / inversion / all
            samples: 平方根引理的样本数; weber 套件中为网格点数
            tolerance: 覆盖所有检查阈值

        Returns:
            SelfcheckReport, 全部通过时 passed 为 True
        """
        if suite not in SELFCHECK_SUITES:
            raise InputValidationError(f"未知的自检套件 {suite}")
        selected = SELFCHECK_SUITES[:-1] if suite == "all" else [suite]

        checks: List[CheckResult] = []
        for name in selected:
            if name == "kernel":
                found = SelfCheckSystem.check_kernel(tolerance, kernel_config)
            elif name == "sqrt-lemma":
                found = SelfCheckSystem.check_sqrt_lemma(samples)
            elif name == "weber":
                found = SelfCheckSystem.check_weber(
                    samples if suite == "weber" else None, tolerance, kernel_config, transform_config
                )
            elif name == "moments":
                found = SelfCheckSystem.check_moments(tolerance, transform_config)
            else:
                found = SelfCheckSystem.check_inversion(tolerance, inversion_config)

            failed = [check.name for check in found if not check.passed]
            if failed:
                logger.warning(f"自检套件 {name} 未通过: {', '.join(failed)}")
            else:
                logger.info(f"自检套件 {name} 通过")
            checks.extend(found)

        return SelfcheckReport(suite=suite, passed=all(check.passed for check in checks), checks=checks)
