# 命令行主程序入口 (亚式期权 Laplace 变换定价引擎)

import argparse
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional

# 添加项目根目录到Python路径
project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, project_root)

from pydantic import ValidationError

from engine.config import settings
from engine.cli.commands import COMMANDS, default_mc_config
from engine.core.exceptions import InputValidationError, PricingEngineError
from shared.constants import EXIT_CODES, KNOWN_TRANSFORM_PAIRS, OUTPUT_FORMATS, SELFCHECK_SUITES
from shared.schemas import InversionConfig, MarketInputs, RunSpec
from shared.utils import parse_complex

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# 市场参数: 命令行目标名 -> MarketInputs 字段
MARKET_FIELDS = {
    "rate": "r",
    "div": "dividend_yield",
    "sigma": "sigma",
    "spot": "spot",
    "strike": "strike",
    "maturity": "T",
    "t0": "t0",
    "t": "t",
    "running_integral": "running_integral",
}

# 反演参数: 命令行目标名 -> InversionConfig 字段
INVERSION_FIELDS = {
    "terms": "terms",
    "euler_stages": "euler_stages",
    "margin": "abscissa_margin",
    "tol": "target_rel_tol",
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", dest="output_format", choices=OUTPUT_FORMATS, default=None, help="输出格式")
    parser.add_argument("--output", dest="output_path", default=None, help="输出文件, 缺省为标准输出")
    parser.add_argument("--config", default=None, help="JSON 配置文件 (键为命令行参数名)")
    parser.add_argument(
        "--log-level", dest="log_level", type=str.upper, default=None,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="日志级别",
    )


def _add_inversion(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("反演参数")
    group.add_argument("--terms", type=int, default=None, help="梯形和项数")
    group.add_argument("--euler-stages", dest="euler_stages", type=int, default=None, help="Euler 加速阶数")
    group.add_argument("--margin", type=float, default=None, help="围道横坐标余量")
    group.add_argument("--tol", type=float, default=None, help="目标相对容差")


def _add_mc(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("蒙特卡洛参数")
    group.add_argument("--with-mc", dest="with_mc", action="store_true", default=False, help="附加蒙特卡洛对照")
    group.add_argument("--paths", type=int, default=None, help="路径数")
    group.add_argument("--steps", type=int, default=None, help="单位时间步数")
    group.add_argument("--seed", type=int, default=None, help="随机种子")
    group.add_argument("--no-antithetic", dest="no_antithetic", action="store_true", default=False, help="关闭对偶变量")


def build_parser() -> argparse.ArgumentParser:
    """构建命令行解析器"""
    parser = argparse.ArgumentParser(prog="asian-engine", description=settings.APP_NAME)
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.APP_VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    price = subparsers.add_parser("price", help="单个合约定价")
    price.add_argument("--rate", type=float, default=None, help="无风险利率 r")
    price.add_argument("--div", type=float, default=None, help="分红率 δ")
    price.add_argument("--sigma", type=float, default=None, help="波动率 σ")
    price.add_argument("--spot", type=float, default=None, help="标的价格 S")
    price.add_argument("--strike", type=float, default=None, help="执行价 K")
    price.add_argument("--maturity", type=float, default=None, help="到期日 T")
    price.add_argument("--t0", type=float, default=None, help="平均期起点")
    price.add_argument("--t", type=float, default=None, help="估值时刻")
    price.add_argument("--running-integral", dest="running_integral", type=float, default=None, help="已观测积分")
    _add_inversion(price)
    _add_mc(price)
    _add_common(price)

    benchmark = subparsers.add_parser("benchmark", help="内置基准表")
    benchmark.add_argument("--case", type=int, default=None, help="只计算指定编号 (1-7)")
    _add_inversion(benchmark)
    _add_mc(benchmark)
    _add_common(benchmark)

    transform = subparsers.add_parser("transform", help="变换 F_a^(ν)(z) 诊断")
    transform.add_argument("--a", type=float, default=None, help="变换参数 a")
    transform.add_argument("--nu", type=parse_complex, default=None, help="指数 ν, 例如 --nu=-0.6 或 --nu=0.5+0.9j")
    transform.add_argument("--z", type=parse_complex, default=None, help="自变量 z, 例如 --z=9+5j")
    transform.add_argument("--quadrature", action="store_true", default=False, help="同时用积分表示计算 D")
    _add_common(transform)

    invert = subparsers.add_parser("invert-test", help="已知变换对反演校准")
    invert.add_argument("--pair", choices=KNOWN_TRANSFORM_PAIRS, default=None, help="变换对")
    invert.add_argument("--param", dest="pair_param", type=float, default=None, help="变换对参数 c")
    invert.add_argument("--t-eval", dest="t_eval", type=float, default=None, help="反演时刻")
    _add_inversion(invert)
    _add_common(invert)

    selfcheck = subparsers.add_parser("selfcheck", help="自检套件")
    selfcheck.add_argument("--suite", choices=SELFCHECK_SUITES, default=None, help="套件")
    selfcheck.add_argument("--samples", type=int, default=None, help="抽样数 / 网格点数")
    selfcheck.add_argument("--tolerance", type=float, default=None, help="覆盖所有检查阈值")
    _add_inversion(selfcheck)
    _add_common(selfcheck)

    parser.subparsers = subparsers
    return parser


def load_config_file(path: str) -> Dict[str, Any]:
    """读取扁平 JSON 配置 (键与命令行目标名一致)"""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            values = json.load(handle)
    except (OSError, json.JSONDecodeError) as e:
        raise InputValidationError(f"无法读取配置文件 {path}: {e}")
    if not isinstance(values, dict):
        raise InputValidationError("配置文件必须是扁平的 JSON 对象")
    for key in ("nu", "z"):
        if key in values:
            try:
                values[key] = parse_complex(values[key])
            except (AttributeError, TypeError, ValueError):
                raise InputValidationError(f"配置文件中的 {key} 不是复数: {values[key]!r}")
    return values


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """
    解析命令行; --config 文件中的值作为子命令默认值, 显式参数优先
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)

    if known.config:
        values = load_config_file(known.config)
        command = next((arg for arg in argv if arg in parser.subparsers.choices), None)
        if command is not None:
            subparser = parser.subparsers.choices[command]
            destinations = {action.dest for action in subparser._actions}
            unknown = sorted(set(values) - destinations)
            if unknown:
                raise InputValidationError(f"配置文件包含未知键: {', '.join(unknown)}")
            subparser.set_defaults(**values)
    return parser.parse_args(argv)


def build_run_spec(args: argparse.Namespace) -> RunSpec:
    """命令行参数 -> RunSpec (pydantic 校验)"""
    options = vars(args)

    inversion = settings.inversion_config().model_dump()
    inversion.update(
        {field: options[dest] for dest, field in INVERSION_FIELDS.items() if options.get(dest) is not None}
    )

    spec: Dict[str, Any] = {
        "command": args.command,
        "inversion": InversionConfig(**inversion),
        "output_format": options.get("output_format") or settings.OUTPUT_FORMAT,
        "output_path": options.get("output_path"),
    }

    if args.command == "price":
        market = {field: options[dest] for dest, field in MARKET_FIELDS.items() if options.get(dest) is not None}
        for required in ("rate", "sigma", "spot", "strike", "maturity"):
            market.setdefault(MARKET_FIELDS[required], None)
        spec["market"] = MarketInputs(**market)

    if options.get("with_mc"):
        spec["mc"] = default_mc_config(
            paths=options.get("paths"),
            steps_per_unit_time=options.get("steps"),
            seed=options.get("seed"),
            antithetic=False if options.get("no_antithetic") else None,
        )

    for key in ("case", "a", "nu", "z", "quadrature", "pair", "pair_param", "t_eval", "suite", "samples", "tolerance"):
        if options.get(key) is not None:
            spec[key] = options[key]
    return RunSpec(**spec)


def configure_logging(level: Optional[str] = None) -> None:
    """日志输出到标准错误, 标准输出只保留结果"""
    if level is None:
        level = "DEBUG" if settings.DEBUG else settings.LOG_LEVEL
    logging.basicConfig(level=level.upper(), format=LOG_FORMAT, stream=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    """命令行入口, 返回退出码"""
    try:
        args = parse_args(argv)
    except InputValidationError as e:
        configure_logging()
        logger.error(e.detail)
        return e.exit_code
    except SystemExit as e:
        # argparse 在参数错误时退出码为 2, --help 为 0
        return e.code if isinstance(e.code, int) else EXIT_CODES["VALIDATION_ERROR"]

    configure_logging(args.log_level)
    try:
        spec = build_run_spec(args)
        return COMMANDS[spec.command.value](spec)
    except ValidationError as e:
        logger.error(f"输入参数无效: {e}")
        return EXIT_CODES["VALIDATION_ERROR"]
    except PricingEngineError as e:
        logger.error(f"{type(e).__name__}: {e.detail}")
        logger.debug("异常详情", exc_info=True)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
