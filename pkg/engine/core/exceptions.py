# 定价引擎异常定义

from typing import Optional

from shared.constants import EXIT_CODES


class PricingEngineError(Exception):
    """定价引擎基础异常"""
    exit_code = EXIT_CODES["NUMERICAL_FAILURE"]

    def __init__(self, detail: str = "数值计算失败"):
        super().__init__(detail)
        self.detail = detail


class DomainError(PricingEngineError, ValueError):
    """参数超出定义域"""

    def __init__(
        self,
        detail: str = "参数超出定义域",
        finiteness_abscissa: Optional[float] = None,
        identity_abscissa: Optional[float] = None,
        real_part: Optional[float] = None,
    ):
        super().__init__(detail)
        self.finiteness_abscissa = finiteness_abscissa
        self.identity_abscissa = identity_abscissa
        self.real_part = real_part


class ConvergenceError(PricingEngineError):
    """级数或加速求和未收敛"""

    def __init__(self, detail: str = "级数未收敛", terms_used: Optional[int] = None):
        super().__init__(detail)
        self.terms_used = terms_used


class QuadratureError(PricingEngineError):
    """自适应积分未达到容差"""

    def __init__(self, detail: str = "数值积分未达到容差"):
        super().__init__(detail)


class NumericalFailureError(PricingEngineError):
    """结果违反结构性界 (负价格, 低于内在价值下界)"""

    def __init__(self, detail: str = "数值结果违反结构性界"):
        super().__init__(detail)


class InputValidationError(PricingEngineError):
    """用户输入无效"""
    exit_code = EXIT_CODES["VALIDATION_ERROR"]

    def __init__(self, detail: str = "输入参数无效"):
        super().__init__(detail)
