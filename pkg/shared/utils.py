# 共享工具函数

import math
from typing import Any, Dict, Optional, Union

from .constants import BENCHMARK_CASES, BENCHMARK_CONFIG, BENCHMARK_STRIKE
from .schemas import MarketInputs


def parse_complex(text: Union[str, float, complex]) -> complex:
    """
    解析命令行中的复数, 接受 "0.5", "1+0.9j", "1+0.9i", "-0.9i"

    Raises:
        ValueError: 无法解析
    """
    if isinstance(text, (int, float, complex)):
        return complex(text)
    cleaned = text.strip().replace(" ", "").replace("i", "j")
    if not cleaned:
        raise ValueError("空字符串不是复数")
    return complex(cleaned)


def format_complex(value: complex, digits: int = 12) -> str:
    """复数的紧凑显示, 虚部为 0 时只显示实部"""
    value = complex(value)
    if value.imag == 0.0:
        return f"{value.real:.{digits}g}"
    sign = "+" if value.imag >= 0 or math.isnan(value.imag) else "-"
    return f"{value.real:.{digits}g}{sign}{abs(value.imag):.{digits}g}j"


def complex_to_dict(value: complex) -> Dict[str, float]:
    """JSON 输出用的复数表示"""
    value = complex(value)
    return {"re": value.real, "im": value.imag}


def benchmark_case(case: int) -> Dict[str, Any]:
    """按编号获取基准合约"""
    for entry in BENCHMARK_CASES:
        if entry["case"] == case:
            return entry
    raise KeyError(f"基准合约编号不存在: {case}")


def benchmark_market(case: int) -> MarketInputs:
    """基准合约对应的市场参数 (K = 2, δ = 0, t = t0 = 0)"""
    entry = benchmark_case(case)
    return MarketInputs(
        r=entry["r"],
        sigma=entry["sigma"],
        spot=entry["S0"],
        strike=BENCHMARK_STRIKE,
        T=entry["T"],
    )


def published_tolerance(case: int) -> float:
    """与公开的三位小数价格比较时的允许偏差"""
    return BENCHMARK_CONFIG["PUBLISHED_TOLERANCE_OVERRIDES"].get(case, BENCHMARK_CONFIG["PUBLISHED_TOLERANCE"])


def relative_error(value: float, exact: float, floor: Optional[float] = None) -> float:
    """相对误差 |value - exact| / max(|exact|, floor)"""
    scale = max(abs(exact), floor if floor is not None else 0.0)
    if scale == 0.0:
        return abs(value - exact)
    return abs(value - exact) / scale
