# Pydantic数据模型, 规范定价引擎各层之间传递的数据结构

from enum import Enum
from typing import Optional, List, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .constants import (
    KERNEL_CONFIG,
    TRANSFORM_CONFIG,
    INVERSION_CONFIG,
    MC_CONFIG,
)


# 数值配置 (不可变, 可哈希)
class KernelConfig(BaseModel):
    """特殊函数核的截断与容差"""
    model_config = ConfigDict(frozen=True)

    bessel_term_cap: int = Field(KERNEL_CONFIG["BESSEL_TERM_CAP"], gt=0, description="Bessel 级数项数上限")
    bessel_rel_tol: float = Field(KERNEL_CONFIG["BESSEL_REL_TOL"], gt=0, description="Bessel 级数相对容差")
    bessel_series_cap: float = Field(KERNEL_CONFIG["BESSEL_SERIES_CAP"], gt=0, description="升幂级数适用的最大自变量")
    asymptotic_term_cap: int = Field(KERNEL_CONFIG["ASYMPTOTIC_TERM_CAP"], gt=0, description="渐近展开项数上限")
    kummer_term_cap: int = Field(KERNEL_CONFIG["KUMMER_TERM_CAP"], gt=0, description="Kummer 级数项数上限")
    kummer_rel_tol: float = Field(KERNEL_CONFIG["KUMMER_REL_TOL"], gt=0, description="Kummer 级数相对容差")
    kummer_asymptotic_min_x: float = Field(
        KERNEL_CONFIG["KUMMER_ASYMPTOTIC_MIN_X"], gt=0, description="Kummer 大自变量展开的最小自变量"
    )


class TransformConfig(BaseModel):
    """Laplace 变换核的分支半径与积分容差"""
    model_config = ConfigDict(frozen=True)

    singularity_radius: float = Field(TRANSFORM_CONFIG["SINGULARITY_RADIUS"], gt=0, description="可去奇点附近的切换半径")
    quad_abs_tol: float = Field(TRANSFORM_CONFIG["QUAD_ABS_TOL"], gt=0, description="积分绝对容差(相对峰值质量)")
    quad_rel_tol: float = Field(TRANSFORM_CONFIG["QUAD_REL_TOL"], gt=0, description="积分相对容差")
    envelope_cutoff: float = Field(TRANSFORM_CONFIG["ENVELOPE_CUTOFF"], gt=0, lt=1, description="积分截断处包络比例")
    quad_limit: int = Field(TRANSFORM_CONFIG["QUAD_LIMIT"], gt=0, description="自适应积分子区间上限")


class InversionConfig(BaseModel):
    """Bromwich 反演参数"""
    model_config = ConfigDict(frozen=True)

    abscissa_margin: float = Field(INVERSION_CONFIG["ABSCISSA_MARGIN"], gt=0, description="围道横坐标超出有效横坐标的余量")
    terms: int = Field(INVERSION_CONFIG["TERMS"], gt=0, description="梯形和的项数")
    euler_stages: int = Field(INVERSION_CONFIG["EULER_STAGES"], ge=1, description="Euler 加速阶数")
    target_rel_tol: float = Field(INVERSION_CONFIG["TARGET_REL_TOL"], gt=0, description="目标相对容差")
    target_abs_tol: float = Field(INVERSION_CONFIG["TARGET_ABS_TOL"], ge=0, description="目标绝对容差下限")
    damping: float = Field(INVERSION_CONFIG["DAMPING"], gt=0, description="离散化参数 A")

    @model_validator(mode="after")
    def _check_stages(self) -> "InversionConfig":
        if self.terms <= self.euler_stages:
            raise ValueError("terms 必须大于 euler_stages")
        return self


class McConfig(BaseModel):
    """蒙特卡洛参数"""
    model_config = ConfigDict(frozen=True)

    paths: int = Field(MC_CONFIG["PATHS"], ge=1, description="路径数")
    steps_per_unit_time: int = Field(MC_CONFIG["STEPS_PER_UNIT_TIME"], ge=1, description="单位时间步数")
    seed: int = Field(MC_CONFIG["SEED"], ge=0, description="随机种子")
    antithetic: bool = Field(MC_CONFIG["ANTITHETIC"], description="是否使用对偶变量")
    block_size: int = Field(MC_CONFIG["BLOCK_SIZE"], ge=2, description="每个随机块的路径数")
    workers: int = Field(MC_CONFIG["WORKERS"], ge=1, description="并行线程数")


# 市场与合约输入
class MarketInputs(BaseModel):
    """Black-Scholes 市场与算术平均亚式看涨合约"""
    model_config = ConfigDict(frozen=True)

    r: float = Field(..., description="无风险利率")
    dividend_yield: float = Field(0.0, description="分红率 δ")
    sigma: float = Field(..., gt=0, description="波动率")
    spot: float = Field(..., gt=0, description="估值时刻标的价格 S")
    strike: float = Field(..., ge=0, description="执行价 K")
    t0: float = Field(0.0, description="平均期起点")
    t: float = Field(0.0, description="估值时刻")
    T: float = Field(..., description="到期日")
    running_integral: float = Field(0.0, ge=0, description="已观测的 ∫_{t0}^{t} S_u du")

    @model_validator(mode="after")
    def _check_dates(self) -> "MarketInputs":
        if not self.t0 <= self.t < self.T:
            raise ValueError("需要满足 t0 ≤ t < T")
        if self.t == self.t0 and self.running_integral != 0:
            raise ValueError("新发行合约 (t = t0) 的已观测积分必须为 0")
        return self


class NormalizedProblem(BaseModel):
    """归一化问题 (ν, h, k, q*, q)"""
    model_config = ConfigDict(frozen=True)

    nu: float = Field(..., description="指数 ν = 2(r-δ)/σ² - 1")
    h: float = Field(..., gt=0, description="归一化剩余期限 σ²(T-t)/4")
    k: float = Field(..., ge=0, description="归一化执行价 K/S")
    q_star: float = Field(..., description="平均期已过部分的修正项")
    q: float = Field(..., description="有效归一化执行价 k·h + q*")


class PricingPath(str, Enum):
    """定价路径"""
    CLOSED_FORM_NONPOSITIVE_Q = "closed_form_nonpositive_q"
    LAPLACE_INVERSION = "laplace_inversion"


class PriceResult(BaseModel):
    """定价结果"""
    price: float = Field(..., description="以货币计价的期权价格")
    normalized_price: float = Field(..., description="归一化价格 C^(ν)(h,q)")
    path: PricingPath
    error_indicator: float = Field(..., ge=0, description="反演误差指标, 闭式路径为 0")
    problem: NormalizedProblem


class InversionResult(BaseModel):
    """Bromwich 反演的诊断信息"""
    value: float
    error_indicator: float = Field(..., ge=0, description="最后两阶 Euler 和之差")
    imag_residue: float = Field(..., ge=0, description="加速和的虚部残差")
    abscissa: float = Field(..., description="围道横坐标 σ0")
    nodes: int = Field(..., description="计算变换的节点数")


class SeriesDiagnostics(BaseModel):
    """级数求和诊断"""
    terms_used: int
    peak_index: int = Field(..., description="模最大项的下标 (抵消审计)")
    peak_log_modulus: float = Field(..., description="最大项模的自然对数")


class McEstimate(BaseModel):
    """蒙特卡洛估计"""
    mean: Union[float, complex]
    std_error: float = Field(..., ge=0)
    paths_used: int = Field(..., ge=1)


class McCurve(BaseModel):
    """沿 x 网格的蒙特卡洛期望曲线"""
    x: List[float]
    mean: List[Union[float, complex]]
    std_error: List[float]
    paths_used: int


class LaplaceSampleResult(BaseModel):
    """样本曲线的数值 Laplace 变换"""
    value: complex
    std_error: float = Field(..., ge=0, description="传播的蒙特卡洛标准误")
    quadrature_error: float = Field(..., ge=0, description="Richardson 积分误差估计")
    tail_ratio: float = Field(..., ge=0, description="截断处被积函数与积分值之比")
    truncated: bool = Field(False, description="尾部判据是否失败")


class TransformOracleResult(BaseModel):
    """蒙特卡洛变换对照结果"""
    value: complex
    std_error: float = Field(..., ge=0)
    quadrature_error: float = Field(..., ge=0)

    @property
    def combined_error(self) -> float:
        return self.std_error + self.quadrature_error


# 命令行运行描述
class CommandName(str, Enum):
    PRICE = "price"
    BENCHMARK = "benchmark"
    TRANSFORM = "transform"
    INVERT_TEST = "invert-test"
    SELFCHECK = "selfcheck"


class OutputFormat(str, Enum):
    TEXT = "text"
    JSON = "json"
    CSV = "csv"


class RunSpec(BaseModel):
    """一次命令行调用的完整描述"""
    command: CommandName
    market: Optional[MarketInputs] = None
    inversion: InversionConfig = Field(default_factory=InversionConfig)
    mc: Optional[McConfig] = None
    output_format: OutputFormat = OutputFormat.TEXT
    output_path: Optional[str] = None

    # benchmark
    case: Optional[int] = Field(None, ge=1, le=7, description="只计算指定基准编号")

    # transform
    a: Optional[float] = Field(None, gt=0, description="变换参数 a")
    nu: Optional[complex] = Field(None, description="指数 ν")
    z: Optional[complex] = Field(None, description="变换自变量 z")
    quadrature: bool = Field(False, description="同时用积分表示计算 D")

    # invert-test
    pair: Optional[str] = Field(None, description="已知变换对名称")
    pair_param: float = Field(1.0, description="变换对参数 c")
    t_eval: Optional[float] = Field(None, gt=0, description="反演时刻")

    # selfcheck
    suite: str = Field("all", description="自检套件")
    samples: Optional[int] = Field(None, ge=1, description="随机抽样数")
    tolerance: Optional[float] = Field(None, gt=0, description="覆盖所有检查阈值")

    @model_validator(mode="after")
    def _check_command_inputs(self) -> "RunSpec":
        if self.command == CommandName.PRICE and self.market is None:
            raise ValueError("price 命令需要市场参数")
        if self.command == CommandName.TRANSFORM and (self.a is None or self.nu is None or self.z is None):
            raise ValueError("transform 命令需要 a, ν 与 z")
        if self.command == CommandName.INVERT_TEST and (self.pair is None or self.t_eval is None):
            raise ValueError("invert-test 命令需要变换对与时刻 t")
        return self


# 输出行
class BenchmarkRow(BaseModel):
    """基准表的一行"""
    case: int
    r: float
    sigma: float
    T: float
    S0: float
    nu: float
    h: float
    q: float
    price_transform: Optional[float] = None
    price_mc: Optional[float] = None
    mc_stderr: Optional[float] = None
    abs_dev_vs_paper: Optional[float] = None
    error: Optional[str] = Field(None, description="该行失败时的错误信息")


class CheckResult(BaseModel):
    """单项自检结果"""
    name: str
    passed: bool
    max_error: float
    threshold: float
    detail: str = ""


class SelfcheckReport(BaseModel):
    """自检汇总"""
    suite: str
    passed: bool
    checks: List[CheckResult]
