# 蒙特卡洛对照系统: 亚式期权价格, 指数泛函的矩, Girsanov 加权的 L^(ν)(x), 数值 Laplace 变换

import functools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Union

import numpy as np
from scipy import integrate

from engine.core.exceptions import DomainError, InputValidationError
from engine.core.systems.transform_core import TransformCore
from shared.schemas import (
    LaplaceSampleResult,
    MarketInputs,
    McConfig,
    McCurve,
    McEstimate,
    TransformOracleResult,
)

logger = logging.getLogger(__name__)

# 尾部判据: |e^{-zX} L(X)| ≤ TAIL_TOLERANCE · |积分|
TAIL_TOLERANCE = 1e-6

BlockSimulator = Callable[[np.random.Generator, int], np.ndarray]


@dataclass(frozen=True)
class _Moments:
    """分块样本的均值与离差平方和, 按 Chan 公式合并"""
    count: int
    mean: Union[np.ndarray, complex, float]
    m2_re: Union[np.ndarray, float]
    m2_im: Union[np.ndarray, float]

    @classmethod
    def from_samples(cls, samples: np.ndarray) -> "_Moments":
        mean = samples.mean(axis=0)
        deviation = samples - mean
        return cls(
            count=samples.shape[0],
            mean=mean,
            m2_re=(deviation.real ** 2).sum(axis=0),
            m2_im=(np.imag(deviation) ** 2).sum(axis=0),
        )

    def merge(self, other: "_Moments") -> "_Moments":
        count = self.count + other.count
        delta = other.mean - self.mean
        weight = self.count * other.count / count
        return _Moments(
            count=count,
            mean=self.mean + delta * (other.count / count),
            m2_re=self.m2_re + np.real(delta) ** 2 * weight,
            m2_im=self.m2_im + np.imag(delta) ** 2 * weight,
        )

    def std_error(self):
        if self.count < 2:
            return np.full(np.shape(self.mean), np.inf) if np.ndim(self.mean) else math.inf
        scale = 1.0 / (self.count * (self.count - 1))
        return np.maximum(np.sqrt(self.m2_re * scale), np.sqrt(self.m2_im * scale))


class MonteCarloOracle:
    """蒙特卡洛对照核心类"""

    # ------------------------------------------------------------------
    # 分块调度
    # ------------------------------------------------------------------
    @staticmethod
    def _run(simulate: BlockSimulator, config: McConfig) -> _Moments:
        """
        按固定大小分块模拟; 每块的随机数流由 SeedSequence 派生,
        结果与线程数和执行顺序无关, 按块顺序合并
        """
        if config.antithetic:
            samples = math.ceil(config.paths / 2)
            per_block = max(1, config.block_size // 2)
        else:
            samples = config.paths
            per_block = config.block_size
        sizes = [per_block] * (samples // per_block)
        if samples % per_block:
            sizes.append(samples % per_block)
        seeds = np.random.SeedSequence(config.seed).spawn(len(sizes))

        def run_block(index: int) -> _Moments:
            rng = np.random.default_rng(seeds[index])
            return _Moments.from_samples(simulate(rng, sizes[index]))

        if config.workers > 1 and len(sizes) > 1:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                blocks = list(pool.map(run_block, range(len(sizes))))
        else:
            blocks = [run_block(i) for i in range(len(sizes))]
        logger.debug(f"蒙特卡洛: {len(sizes)} 块, {samples} 个样本, 线程数 {config.workers}")
        return functools.reduce(_Moments.merge, blocks)

    @staticmethod
    def _paths_used(moments: _Moments, config: McConfig) -> int:
        return moments.count * 2 if config.antithetic else moments.count

    @staticmethod
    def _estimate(moments: _Moments, config: McConfig) -> McEstimate:
        mean = moments.mean
        mean = complex(mean) if np.iscomplexobj(mean) else float(mean)
        return McEstimate(
            mean=mean,
            std_error=float(moments.std_error()),
            paths_used=MonteCarloOracle._paths_used(moments, config),
        )

    @staticmethod
    def _step_count(horizon: float, config: McConfig) -> int:
        return max(1, math.ceil(config.steps_per_unit_time * horizon))

    @staticmethod
    def _signs(config: McConfig) -> Sequence[float]:
        return (1.0, -1.0) if config.antithetic else (1.0,)

    # ------------------------------------------------------------------
    # 期权价格
    # ------------------------------------------------------------------
    @staticmethod
    def mc_price_asian(market: MarketInputs, config: Optional[McConfig] = None) -> McEstimate:
        """
        直接模拟几何布朗运动 (精确对数步进, 梯形时间积分) 估计亚式看涨期权价格

        已过平均期的积分 running_integral 加到模拟积分上
        """
        config = config or McConfig()
        horizon = market.T - market.t
        steps = MonteCarloOracle._step_count(horizon, config)
        dt = horizon / steps
        drift = (market.r - market.dividend_yield - 0.5 * market.sigma ** 2) * dt
        vol = market.sigma * math.sqrt(dt)
        discount = math.exp(-market.r * horizon)
        signs = MonteCarloOracle._signs(config)

        def simulate(rng: np.random.Generator, n: int) -> np.ndarray:
            log_s = [np.zeros(n) for _ in signs]
            previous = [np.full(n, market.spot) for _ in signs]
            integral = [np.zeros(n) for _ in signs]
            for _ in range(steps):
                shock = rng.standard_normal(n)
                for i, sign in enumerate(signs):
                    log_s[i] += drift + sign * vol * shock
                    current = market.spot * np.exp(log_s[i])
                    integral[i] += 0.5 * (previous[i] + current) * dt
                    previous[i] = current
            payoffs = [
                discount * np.maximum((market.running_integral + path) / (market.T - market.t0) - market.strike, 0.0)
                for path in integral
            ]
            return sum(payoffs) / len(payoffs)

        estimate = MonteCarloOracle._estimate(MonteCarloOracle._run(simulate, config), config)
        logger.info(f"蒙特卡洛价格 {estimate.mean:.6f} ± {estimate.std_error:.2e} ({estimate.paths_used} 条路径)")
        return estimate

    # ------------------------------------------------------------------
    # 指数泛函 A_x^(ν) = ∫_0^x e^{2(B_s + νs)} ds
    # ------------------------------------------------------------------
    @staticmethod
    def _accumulate(rng: np.random.Generator, n: int, x: float, nu: float, steps: int, signs) -> List[np.ndarray]:
        dt = x / steps
        drift = 2.0 * nu * dt
        vol = 2.0 * math.sqrt(dt)
        log_y = [np.zeros(n) for _ in signs]
        previous = [np.ones(n) for _ in signs]
        integral = [np.zeros(n) for _ in signs]
        for _ in range(steps):
            shock = rng.standard_normal(n)
            for i, sign in enumerate(signs):
                log_y[i] += drift + sign * vol * shock
                current = np.exp(log_y[i])
                integral[i] += 0.5 * (previous[i] + current) * dt
                previous[i] = current
        return integral

    @staticmethod
    def mc_accumulation_moment(x: float, nu: float, order: int, config: Optional[McConfig] = None) -> McEstimate:
        """E[(A_x^(ν))^order], order ∈ {1, 2}"""
        config = config or McConfig()
        if order not in (1, 2):
            raise InputValidationError(f"只支持一阶与二阶矩: order = {order}")
        if not x > 0:
            raise DomainError(f"x 必须为正: x = {x}")
        steps = MonteCarloOracle._step_count(x, config)
        signs = MonteCarloOracle._signs(config)

        def simulate(rng: np.random.Generator, n: int) -> np.ndarray:
            paths = MonteCarloOracle._accumulate(rng, n, x, nu, steps, signs)
            return sum(path ** order for path in paths) / len(paths)

        return MonteCarloOracle._estimate(MonteCarloOracle._run(simulate, config), config)

    @staticmethod
    def mc_L(x: float, nu: complex, a: float, config: Optional[McConfig] = None) -> McEstimate:
        """
        L^(ν)(x) = E[(A_x^(0) - a)^+ · e^{νW_x - xν²/2}], ν 可为复数

        复数结果的标准误取实部与虚部标准误的较大者
        """
        config = config or McConfig()
        if not x > 0:
            raise DomainError(f"x 必须为正: x = {x}")
        nu = complex(nu)
        steps = MonteCarloOracle._step_count(x, config)
        dt = x / steps
        vol = math.sqrt(dt)
        signs = MonteCarloOracle._signs(config)
        compensator = x * nu * nu / 2.0

        def simulate(rng: np.random.Generator, n: int) -> np.ndarray:
            brownian = [np.zeros(n) for _ in signs]
            previous = [np.ones(n) for _ in signs]
            integral = [np.zeros(n) for _ in signs]
            for _ in range(steps):
                shock = rng.standard_normal(n)
                for i, sign in enumerate(signs):
                    brownian[i] += sign * vol * shock
                    current = np.exp(2.0 * brownian[i])
                    integral[i] += 0.5 * (previous[i] + current) * dt
                    previous[i] = current
            values = [
                np.maximum(integral[i] - a, 0.0) * np.exp(nu * brownian[i] - compensator)
                for i in range(len(signs))
            ]
            return sum(values) / len(values)

        return MonteCarloOracle._estimate(MonteCarloOracle._run(simulate, config), config)

    @staticmethod
    def mc_L_curve(
        nu: complex,
        a: float,
        x_max: float,
        n_points: int,
        config: Optional[McConfig] = None,
    ) -> McCurve:
        """在均匀网格上沿同一组路径估计 L^(ν)(x_i), 权重与 mc_L 相同; 实 ν 时曲线为实数"""
        config = config or McConfig()
        if n_points < 3 or not x_max > 0:
            raise InputValidationError("曲线需要至少 3 个网格点且 x_max > 0")
        nu = complex(nu)
        index = nu.real if nu.imag == 0 else nu
        spacing = x_max / (n_points - 1)
        substeps = MonteCarloOracle._step_count(spacing, config)
        dt = spacing / substeps
        vol = math.sqrt(dt)
        signs = MonteCarloOracle._signs(config)
        grid = np.linspace(0.0, x_max, n_points)
        compensator = grid * index * index / 2.0

        def simulate(rng: np.random.Generator, n: int) -> np.ndarray:
            curve = np.zeros((n, n_points), dtype=complex if isinstance(index, complex) else float)
            brownian = [np.zeros(n) for _ in signs]
            previous = [np.ones(n) for _ in signs]
            integral = [np.zeros(n) for _ in signs]
            for point in range(1, n_points):
                for _ in range(substeps):
                    shock = rng.standard_normal(n)
                    for i, sign in enumerate(signs):
                        brownian[i] += sign * vol * shock
                        current = np.exp(2.0 * brownian[i])
                        integral[i] += 0.5 * (previous[i] + current) * dt
                        previous[i] = current
                values = [
                    np.maximum(integral[i] - a, 0.0) * np.exp(index * brownian[i] - compensator[point])
                    for i in range(len(signs))
                ]
                curve[:, point] = sum(values) / len(values)
            return curve

        moments = MonteCarloOracle._run(simulate, config)
        return McCurve(
            x=grid.tolist(),
            mean=np.asarray(moments.mean).tolist(),
            std_error=np.asarray(moments.std_error(), dtype=float).tolist(),
            paths_used=MonteCarloOracle._paths_used(moments, config),
        )

    @staticmethod
    def mc_auxiliary_curve(
        nu: float,
        a: float,
        x_max: float,
        n_points: int,
        config: Optional[McConfig] = None,
        kind: str = "put",
    ) -> McCurve:
        """
        在均匀网格 x_i = i·x_max/(n_points-1) 上估计 E[(a - A_x^(ν))^+] (put) 或 E[(A_x^(ν) - a)^+] (call)

        所有网格点共用同一组路径; 每个网格区间内的步数由 steps_per_unit_time 决定
        """
        config = config or McConfig()
        if kind not in ("put", "call"):
            raise InputValidationError(f"未知的曲线类型: {kind}")
        if n_points < 3 or not x_max > 0:
            raise InputValidationError("曲线需要至少 3 个网格点且 x_max > 0")
        spacing = x_max / (n_points - 1)
        substeps = MonteCarloOracle._step_count(spacing, config)
        dt = spacing / substeps
        drift = 2.0 * nu * dt
        vol = 2.0 * math.sqrt(dt)
        signs = MonteCarloOracle._signs(config)

        def payoff(integral: np.ndarray) -> np.ndarray:
            return np.maximum(a - integral, 0.0) if kind == "put" else np.maximum(integral - a, 0.0)

        def simulate(rng: np.random.Generator, n: int) -> np.ndarray:
            curve = np.empty((n, n_points))
            log_y = [np.zeros(n) for _ in signs]
            previous = [np.ones(n) for _ in signs]
            integral = [np.zeros(n) for _ in signs]
            curve[:, 0] = payoff(np.zeros(n))
            for point in range(1, n_points):
                for _ in range(substeps):
                    shock = rng.standard_normal(n)
                    for i, sign in enumerate(signs):
                        log_y[i] += drift + sign * vol * shock
                        current = np.exp(log_y[i])
                        integral[i] += 0.5 * (previous[i] + current) * dt
                        previous[i] = current
                curve[:, point] = sum(payoff(path) for path in integral) / len(signs)
            return curve

        moments = MonteCarloOracle._run(simulate, config)
        grid = np.linspace(0.0, x_max, n_points)
        return McCurve(
            x=grid.tolist(),
            mean=np.asarray(moments.mean, dtype=float).tolist(),
            std_error=np.asarray(moments.std_error(), dtype=float).tolist(),
            paths_used=MonteCarloOracle._paths_used(moments, config),
        )

    # ------------------------------------------------------------------
    # 数值 Laplace 变换
    # ------------------------------------------------------------------
    @staticmethod
    def laplace_of_samples(
        x_grid: Sequence[float],
        values: Sequence[complex],
        z: complex,
        std_errors: Optional[Sequence[float]] = None,
    ) -> LaplaceSampleResult:
        """
        梯形法求 ∫_0^X e^{-zx} L(x) dx

        积分误差用全网格与隔点网格之差的 1/3 估计; 蒙特卡洛标准误按完全正相关保守传播;
        |e^{-zX}L(X)| 超过积分值的 TAIL_TOLERANCE 倍时标记截断并记录警告
        """
        x = np.asarray(x_grid, dtype=float)
        samples = np.asarray(values)
        if x.ndim != 1 or x.size < 3 or x.size != samples.size:
            raise InputValidationError("网格与样本必须是长度相同且不少于 3 的一维数组")
        if np.any(np.diff(x) <= 0):
            raise InputValidationError("网格必须严格递增")

        kernel = np.exp(-complex(z) * x)
        integrand = kernel * samples
        value = complex(integrate.trapezoid(integrand, x))

        odd = x.size if x.size % 2 == 1 else x.size - 1
        fine = integrate.trapezoid(integrand[:odd], x[:odd])
        coarse = integrate.trapezoid(integrand[:odd:2], x[:odd:2])
        quadrature_error = float(abs(fine - coarse) / 3.0)

        std_error = 0.0
        if std_errors is not None:
            widths = np.diff(x)
            weights = np.zeros_like(x)
            weights[:-1] += 0.5 * widths
            weights[1:] += 0.5 * widths
            std_error = float(np.sum(weights * np.abs(kernel) * np.asarray(std_errors, dtype=float)))

        tail = abs(integrand[-1])
        tail_ratio = 0.0 if tail == 0 else (math.inf if value == 0 else float(tail / abs(value)))
        truncated = tail_ratio > TAIL_TOLERANCE
        if truncated:
            logger.warning(f"Laplace 积分可能被截断: 尾部比值 {tail_ratio:.3g} 超过 {TAIL_TOLERANCE:g}")
        return LaplaceSampleResult(
            value=value,
            std_error=std_error,
            quadrature_error=quadrature_error,
            tail_ratio=tail_ratio,
            truncated=truncated,
        )

    @staticmethod
    def mc_transform_oracle(
        nu: complex,
        a: float,
        z: complex,
        config: Optional[McConfig] = None,
        x_max: Optional[float] = None,
        n_points: int = 1601,
        method: str = "put",
    ) -> TransformOracleResult:
        """
        F_a^(ν)(z) 的统计对照

        put: 利用 (A - a)^+ = A - a + (a - A)^+,
        F = 1/(z(z - 2(ν+1))) - a/z + ∫_0^∞ e^{-zx} E[(a - A_x^(ν))^+] dx, 只有有界的看跌部分需要蒙特卡洛, 仅实数 ν
        girsanov: 直接对 mc_L_curve 的 L^(ν)(x) 表做数值 Laplace 变换, ν 可为复数;
        方差随 x 增长, 只适用于 Re z 明显超过 2(Re ν + 1) 的情形
        """
        config = config or McConfig()
        z = complex(z)
        if method == "girsanov":
            nu = complex(nu)
            decay = z.real - max(0.0, 2.0 * (nu.real + 1.0))
            if not decay > 0:
                raise DomainError(f"Re z = {z.real:.6g} 未超过 L^(ν) 的指数增长率")
            if x_max is None:
                x_max = max(6.0 * a, 30.0 / decay)
            curve = MonteCarloOracle.mc_L_curve(nu, a, x_max, n_points, config)
            sampled = MonteCarloOracle.laplace_of_samples(curve.x, curve.mean, z, curve.std_error)
            return TransformOracleResult(
                value=sampled.value,
                std_error=sampled.std_error,
                quadrature_error=sampled.quadrature_error,
            )
        if method != "put":
            raise InputValidationError(f"未知的对照方法: {method}")

        if isinstance(nu, complex) and nu.imag != 0:
            raise DomainError("看跌曲线对照只支持实数 ν")
        nu = float(np.real(nu))
        if x_max is None:
            x_max = max(6.0 * a, 15.0 / z.real)
        analytic = TransformCore.first_moment_transform(nu, z) - a / z
        curve = MonteCarloOracle.mc_auxiliary_curve(nu, a, x_max, n_points, config, kind="put")
        sampled = MonteCarloOracle.laplace_of_samples(curve.x, curve.mean, z, curve.std_error)
        return TransformOracleResult(
            value=analytic + sampled.value,
            std_error=sampled.std_error,
            quadrature_error=sampled.quadrature_error,
        )
