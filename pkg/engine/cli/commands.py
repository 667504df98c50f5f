# 命令实现: price / benchmark / transform / invert-test / selfcheck, 返回退出码

import asyncio
import logging
from typing import Any, Dict, List, Optional

from engine.config import settings
from engine.cli.output import emit, render_record, render_table
from engine.core.exceptions import DomainError, PricingEngineError
from engine.core.selfcheck import SelfCheckSystem
from engine.core.systems.complex_kernel import ComplexKernel
from engine.core.systems.laplace_inversion import LaplaceInversion
from engine.core.systems.mc_oracle import MonteCarloOracle
from engine.core.systems.pricer import AsianPricer
from engine.core.systems.transform_core import TransformCore, TransformEvaluator
from shared.constants import BENCHMARK_CASES, BENCHMARK_COLUMNS, EXIT_CODES, PRICE_COLUMNS
from shared.schemas import BenchmarkRow, McConfig, RunSpec
from shared.utils import benchmark_market, published_tolerance, relative_error

logger = logging.getLogger(__name__)


def run_price(spec: RunSpec) -> int:
    """
    单个合约定价

    输出价格, 归一化坐标 (ν, h, k, q*, q), 路径, 误差指标; 带 --with-mc 时附加蒙特卡洛列
    """
    result = AsianPricer.price_asian(
        spec.market, spec.inversion, settings.kernel_config(), settings.transform_config()
    )
    record: Dict[str, Any] = {column: None for column in PRICE_COLUMNS}
    record.update(
        price=result.price,
        normalized_price=result.normalized_price,
        path=result.path.value,
        error_indicator=result.error_indicator,
        **result.problem.model_dump(),
    )
    if spec.mc is not None:
        estimate = MonteCarloOracle.mc_price_asian(spec.market, spec.mc)
        record.update(price_mc=estimate.mean, mc_stderr=estimate.std_error)

    emit(render_record(record, spec.output_format), spec.output_path)
    return EXIT_CODES["SUCCESS"]


async def _price_benchmark(cases: List[Dict[str, Any]], spec: RunSpec) -> List[BenchmarkRow]:
    markets = [benchmark_market(entry["case"]) for entry in cases]
    results = await AsianPricer.price_many(
        markets,
        spec.inversion,
        settings.kernel_config(),
        settings.transform_config(),
        max_concurrency=settings.BENCHMARK_WORKERS,
    )

    estimates: List[Optional[Any]] = [None] * len(cases)
    if spec.mc is not None:
        estimates = await asyncio.gather(
            *(asyncio.to_thread(MonteCarloOracle.mc_price_asian, market, spec.mc) for market in markets)
        )

    rows = []
    for entry, market, result, estimate in zip(cases, markets, results, estimates):
        problem = AsianPricer.normalize(market)
        row = BenchmarkRow(
            case=entry["case"],
            r=entry["r"],
            sigma=entry["sigma"],
            T=entry["T"],
            S0=entry["S0"],
            nu=problem.nu,
            h=problem.h,
            q=problem.q,
        )
        if isinstance(result, PricingEngineError):
            row.error = result.detail
        else:
            row.price_transform = result.price
            row.abs_dev_vs_paper = abs(result.price - entry["published_price"])
            if row.abs_dev_vs_paper > published_tolerance(entry["case"]):
                logger.warning(f"基准 {entry['case']} 与公开价格偏差 {row.abs_dev_vs_paper:.2e}")
            logger.info(f"基准 {entry['case']} 定价完成: {result.price:.10f}")
        if estimate is not None:
            row.price_mc = estimate.mean
            row.mc_stderr = estimate.std_error
        rows.append(row)
    return rows


def run_benchmark(spec: RunSpec) -> int:
    """
    内置七个基准合约的定价表

    各行并发定价, 按编号输出; 任一行数值失败时输出部分表格并返回 3
    """
    cases = [entry for entry in BENCHMARK_CASES if spec.case is None or entry["case"] == spec.case]
    rows = asyncio.run(_price_benchmark(cases, spec))

    deviations = [row.abs_dev_vs_paper for row in rows if row.abs_dev_vs_paper is not None]
    summary = {"max_abs_dev_vs_paper": max(deviations) if deviations else None}
    emit(
        render_table([row.model_dump() for row in rows], BENCHMARK_COLUMNS, spec.output_format, summary),
        spec.output_path,
    )

    failed = [row.case for row in rows if row.error is not None]
    if failed:
        for row in rows:
            if row.error is not None:
                logger.error(f"基准 {row.case} 定价失败: {row.error}")
        return EXIT_CODES["NUMERICAL_FAILURE"]
    return EXIT_CODES["SUCCESS"]


def run_transform(spec: RunSpec) -> int:
    """F_a^(ν)(z) 诊断: μ(z), 闭式 D (及积分 D), F, 两个横坐标"""
    try:
        evaluator = TransformEvaluator(
            a=spec.a,
            nu=spec.nu,
            kernel_config=settings.kernel_config(),
            transform_config=settings.transform_config(),
        )
        mu = ComplexKernel.mu_param(spec.z, spec.nu)
        transform = evaluator(spec.z)
        weber = TransformCore.weber_D_closed(spec.a, spec.nu, spec.z, evaluator.kernel_config)
        record: Dict[str, Any] = {
            "a": spec.a,
            "nu": spec.nu,
            "z": spec.z,
            "mu": mu,
            "finiteness_abscissa": evaluator.finiteness_abscissa,
            "identity_abscissa": evaluator.identity_abscissa,
            "D_closed": weber,
            "D_quadrature": None,
            "F": transform,
        }
        if spec.quadrature:
            record["D_quadrature"] = TransformCore.weber_D_quadrature(
                spec.a, spec.nu, spec.z, evaluator.kernel_config, evaluator.transform_config
            )
    except DomainError as e:
        logger.error(f"变换参数超出定义域: {e.detail}")
        return EXIT_CODES["VALIDATION_ERROR"]

    emit(render_record(record, spec.output_format), spec.output_path)
    return EXIT_CODES["SUCCESS"]


def run_invert_test(spec: RunSpec) -> int:
    """反演已知变换对并与原函数比较; 相对误差不超过 target_rel_tol 时返回 0, 否则 3"""
    pair = LaplaceInversion.known_pair(spec.pair, spec.pair_param)
    result = LaplaceInversion.bromwich_invert(pair, spec.t_eval, spec.inversion)
    exact = pair.original(spec.t_eval)
    error = relative_error(result.value, exact)
    passed = error <= spec.inversion.target_rel_tol

    record = {
        "pair": pair.name,
        "param": spec.pair_param,
        "t": spec.t_eval,
        "value": result.value,
        "exact": exact,
        "relative_error": error,
        "error_indicator": result.error_indicator,
        "imag_residue": result.imag_residue,
        "abscissa": result.abscissa,
        "nodes": result.nodes,
        "passed": passed,
    }
    emit(render_record(record, spec.output_format), spec.output_path)
    if not passed:
        logger.error(f"反演相对误差 {error:.3g} 超过 {spec.inversion.target_rel_tol:g}")
        return EXIT_CODES["NUMERICAL_FAILURE"]
    return EXIT_CODES["SUCCESS"]


def run_selfcheck(spec: RunSpec) -> int:
    """运行自检套件; 全部通过返回 0, 否则列出失败项并返回 1"""
    report = SelfCheckSystem.run(
        suite=spec.suite,
        samples=spec.samples,
        tolerance=spec.tolerance,
        kernel_config=settings.kernel_config(),
        transform_config=settings.transform_config(),
        inversion_config=spec.inversion,
    )
    rows = [check.model_dump() for check in report.checks]
    columns = ["name", "passed", "max_error", "threshold", "detail"]
    emit(
        render_table(rows, columns, spec.output_format, {"suite": report.suite, "passed": report.passed}),
        spec.output_path,
    )
    if not report.passed:
        failed = [check.name for check in report.checks if not check.passed]
        logger.error(f"自检失败: {', '.join(failed)}")
        return EXIT_CODES["SELFCHECK_FAILED"]
    return EXIT_CODES["SUCCESS"]


def default_mc_config(**overrides: Any) -> McConfig:
    """以配置文件中的蒙特卡洛默认值为基础, 应用命令行覆盖"""
    base = settings.mc_config().model_dump()
    base.update({key: value for key, value in overrides.items() if value is not None})
    return McConfig(**base)


COMMANDS = {
    "price": run_price,
    "benchmark": run_benchmark,
    "transform": run_transform,
    "invert-test": run_invert_test,
    "selfcheck": run_selfcheck,
}
