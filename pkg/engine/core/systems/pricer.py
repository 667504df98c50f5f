# 亚式期权定价系统: 归一化, 二分法路由 (q ≤ 0 闭式 / q > 0 反演), 折现回货币价格

import asyncio
import logging
import math
from typing import List, Optional, Sequence, Union

from engine.core.exceptions import PricingEngineError
from engine.core.systems.laplace_inversion import LaplaceInversion
from engine.core.systems.transform_core import TransformCore
from shared.schemas import (
    InversionConfig,
    KernelConfig,
    MarketInputs,
    NormalizedProblem,
    PriceResult,
    PricingPath,
    TransformConfig,
)

logger = logging.getLogger(__name__)


class AsianPricer:
    """算术平均亚式看涨期权定价类"""

    @staticmethod
    def normalize(market: MarketInputs) -> NormalizedProblem:
        """
        市场参数归一化

        ν = 2(r-δ)/σ² - 1, h = σ²(T-t)/4, k = K/S,
        q* = σ²/(4S)·(K(t-t0) - ∫_{t0}^{t} S_u du), q = k·h + q*
        """
        sigma_sq = market.sigma ** 2
        nu = 2.0 * (market.r - market.dividend_yield) / sigma_sq - 1.0
        h = sigma_sq * (market.T - market.t) / 4.0
        k = market.strike / market.spot
        q_star = sigma_sq / (4.0 * market.spot) * (
            market.strike * (market.t - market.t0) - market.running_integral
        )
        return NormalizedProblem(nu=nu, h=h, k=k, q_star=q_star, q=k * h + q_star)

    @staticmethod
    def price_scale(market: MarketInputs) -> float:
        """归一化价格到货币价格的系数 e^{-r(T-t)}/(T-t0)·4S/σ²"""
        return (
            math.exp(-market.r * (market.T - market.t))
            / (market.T - market.t0)
            * 4.0
            * market.spot
            / market.sigma ** 2
        )

    @staticmethod
    def price_asian(
        market: MarketInputs,
        config: Optional[InversionConfig] = None,
        kernel_config: Optional[KernelConfig] = None,
        transform_config: Optional[TransformConfig] = None,
    ) -> PriceResult:
        """
        计算算术平均亚式看涨期权价格

        q ≤ 0 时期权必然实值, C = e_1(h, ν) - q; 否则通过 Bromwich 反演求 C^(ν)(h, q)

        Args:
            market: 市场与合约参数
            config: 反演参数

        Returns:
            PriceResult (货币价格, 归一化价格, 路径, 误差指标)

        Raises:
            NumericalFailureError / ConvergenceError: 反演失败
        """
        config = config or InversionConfig()
        transform_config = transform_config or TransformConfig()
        problem = AsianPricer.normalize(market)

        if problem.q <= 0:
            normalized = TransformCore.first_moment(problem.h, problem.nu, transform_config).real - problem.q
            path = PricingPath.CLOSED_FORM_NONPOSITIVE_Q
            error_indicator = 0.0
        else:
            inversion = LaplaceInversion.normalized_price_result(
                problem.nu, problem.h, problem.q, config, kernel_config, transform_config
            )
            normalized = inversion.value
            path = PricingPath.LAPLACE_INVERSION
            error_indicator = inversion.error_indicator

        price = AsianPricer.price_scale(market) * normalized
        logger.debug(
            f"定价完成: ν={problem.nu:.6g}, h={problem.h:.6g}, q={problem.q:.6g}, "
            f"路径={path.value}, 价格={price:.10g}"
        )
        return PriceResult(
            price=price,
            normalized_price=normalized,
            path=path,
            error_indicator=error_indicator,
            problem=problem,
        )

    @staticmethod
    def closed_form_zero_strike(market: MarketInputs) -> float:
        """K = 0 时的价格 e^{-rT'}/(T-t0)·(∫_{t0}^{t} S_u du + S(e^{(r-δ)T'} - 1)/(r-δ)), T' = T - t"""
        horizon = market.T - market.t
        drift = market.r - market.dividend_yield
        growth = horizon if drift == 0 else math.expm1(drift * horizon) / drift
        expected_integral = market.running_integral + market.spot * growth
        return math.exp(-market.r * horizon) / (market.T - market.t0) * expected_integral

    @staticmethod
    async def price_many(
        markets: Sequence[MarketInputs],
        config: Optional[InversionConfig] = None,
        kernel_config: Optional[KernelConfig] = None,
        transform_config: Optional[TransformConfig] = None,
        max_concurrency: int = 4,
    ) -> List[Union[PriceResult, PricingEngineError]]:
        """并发定价多个合约, 结果按输入顺序返回, 单个失败以异常对象返回"""
        semaphore = asyncio.Semaphore(max(1, max_concurrency))

        async def price_one(market: MarketInputs):
            async with semaphore:
                try:
                    return await asyncio.to_thread(
                        AsianPricer.price_asian, market, config, kernel_config, transform_config
                    )
                except PricingEngineError as e:
                    logger.error(f"合约定价失败: {e}")
                    return e

        return list(await asyncio.gather(*(price_one(market) for market in markets)))
