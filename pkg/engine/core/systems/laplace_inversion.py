# Bromwich 数值反演 (Euler 加速的梯形和) 与归一化价格 C^(ν)(h, q)

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Protocol, Tuple

import numpy as np
from scipy import special

from engine.core.exceptions import (
    ConvergenceError,
    DomainError,
    InputValidationError,
    NumericalFailureError,
)
from engine.core.systems.transform_core import TransformCore, TransformEvaluator
from shared.constants import KNOWN_TRANSFORM_PAIRS
from shared.schemas import InversionConfig, InversionResult, KernelConfig, TransformConfig

logger = logging.getLogger(__name__)


class LaplaceTransform(Protocol):
    """可反演的变换: 在 Re z > validity_abscissa 上逐点求值 (接受数组)"""

    validity_abscissa: float

    def __call__(self, z: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class KnownTransform:
    """原函数已知的变换对"""
    name: str
    transform: Callable[[np.ndarray], np.ndarray]
    original: Callable[[float], float]
    validity_abscissa: float

    def __call__(self, z: np.ndarray) -> np.ndarray:
        return self.transform(z)


class LaplaceInversion:
    """Laplace 反演核心类"""

    @staticmethod
    def known_pair(name: str, c: float = 1.0) -> KnownTransform:
        """
        已知变换对

        exp: 1/(z-c) ↔ e^{ct}; ramp: 1/z² ↔ t; shifted: 1/(z(z-c)) ↔ (e^{ct}-1)/c
        """
        if name == "exp":
            return KnownTransform(name, lambda z: 1.0 / (z - c), lambda t: math.exp(c * t), c)
        if name == "ramp":
            return KnownTransform(name, lambda z: 1.0 / (z * z), lambda t: t, 0.0)
        if name == "shifted":
            if c == 0:
                raise InputValidationError("shifted 变换对需要 c ≠ 0")
            return KnownTransform(
                name,
                lambda z: 1.0 / (z * (z - c)),
                lambda t: math.expm1(c * t) / c,
                max(0.0, c),
            )
        raise InputValidationError(f"未知的变换对 {name}, 可选: {', '.join(KNOWN_TRANSFORM_PAIRS)}")

    @staticmethod
    def _euler_sums(
        transform: LaplaceTransform,
        t: float,
        config: InversionConfig,
    ) -> Tuple[complex, complex, float, int]:
        """
        两侧梯形和 e^{γt}/(2t)·Σ_k (-1)^k F(γ + iπk/t) 的最后两阶 Euler 加速值

        节点 z_k 与 z̄_k 都直接求值, 不假设 F(z̄) = conj F(z)
        """
        if not t > 0:
            raise DomainError(f"反演时刻必须为正: t = {t}")

        sigma0 = transform.validity_abscissa + config.abscissa_margin
        gamma = sigma0 + config.damping / (2.0 * t)
        count = config.terms + config.euler_stages + 2
        k = np.arange(count)
        upper = gamma + 1j * math.pi * k / t
        values = np.asarray(transform(np.concatenate([upper, np.conj(upper[1:])])), dtype=complex)
        if not np.all(np.isfinite(values)):
            raise NumericalFailureError("变换在围道节点上出现非有限值")

        series = np.empty(count, dtype=complex)
        series[0] = values[0]
        signs = np.where(k[1:] % 2 == 0, 1.0, -1.0)
        series[1:] = signs * (values[1:count] + values[count:])
        partial = np.cumsum(series) * (math.exp(gamma * t) / (2.0 * t))

        stages = config.euler_stages
        weights = special.binom(stages, np.arange(stages + 1)) / 2.0 ** stages
        n = config.terms
        current = complex(weights @ partial[n : n + stages + 1])
        following = complex(weights @ partial[n + 1 : n + stages + 2])
        return current, following, sigma0, int(values.size)

    @staticmethod
    def bromwich_invert(
        transform: LaplaceTransform,
        t: float,
        config: Optional[InversionConfig] = None,
    ) -> InversionResult:
        """
        在 t 处反演 Laplace 变换 (原函数为实值)

        梯形和节点 z_k = σ0 + (A + 2πik)/(2t), σ0 = 有效横坐标 + 余量;
        部分和 s_n 经 Euler 二项加权平均加速

        Args:
            transform: 带 validity_abscissa 的变换求值器
            t: 反演时刻, 正数
            config: 项数, 加速阶数, 容差

        Returns:
            InversionResult (value, 误差指标, 虚部残差, σ0, 节点数)

        Raises:
            ConvergenceError: 最后两阶 Euler 和之差或虚部残差超过容差
        """
        config = config or InversionConfig()
        current, following, sigma0, nodes = LaplaceInversion._euler_sums(transform, t, config)

        value = float(current.real)
        error_indicator = float(abs(following.real - current.real))
        imag_residue = float(abs(current.imag))
        tolerance = config.target_rel_tol * abs(value) + config.target_abs_tol

        logger.debug(
            f"Bromwich 反演 t={t:.6g}: σ0={sigma0:.6g}, 值={value:.12g}, "
            f"误差指标={error_indicator:.3g}, 虚部残差={imag_residue:.3g}"
        )
        if error_indicator > tolerance:
            raise ConvergenceError(
                f"Euler 加速未稳定: 最后两阶之差 {error_indicator:.3g} 超过容差 {tolerance:.3g}",
                terms_used=nodes,
            )
        if imag_residue > tolerance:
            raise ConvergenceError(f"反演虚部残差 {imag_residue:.3g} 超过容差 {tolerance:.3g}", terms_used=nodes)

        return InversionResult(
            value=value,
            error_indicator=error_indicator,
            imag_residue=imag_residue,
            abscissa=sigma0,
            nodes=nodes,
        )

    @staticmethod
    def bromwich_invert_complex(
        transform: LaplaceTransform,
        t: float,
        config: Optional[InversionConfig] = None,
    ) -> Tuple[complex, float]:
        """
        复值原函数的反演 (例如复 ν 下的 F_a^(ν)), 返回 (值, 误差指标)

        不做虚部残差检查; 误差指标为最后两阶 Euler 和之差的模
        """
        config = config or InversionConfig()
        current, following, sigma0, nodes = LaplaceInversion._euler_sums(transform, t, config)
        error_indicator = abs(following - current)
        tolerance = config.target_rel_tol * abs(current) + config.target_abs_tol
        logger.debug(
            f"复值 Bromwich 反演 t={t:.6g}: σ0={sigma0:.6g}, 值={current:.12g}, 误差指标={error_indicator:.3g}"
        )
        if error_indicator > tolerance:
            raise ConvergenceError(
                f"Euler 加速未稳定: 最后两阶之差 {error_indicator:.3g} 超过容差 {tolerance:.3g}",
                terms_used=nodes,
            )
        return current, error_indicator

    @staticmethod
    def normalized_price_result(
        nu: float,
        h: float,
        q: float,
        config: Optional[InversionConfig] = None,
        kernel_config: Optional[KernelConfig] = None,
        transform_config: Optional[TransformConfig] = None,
    ) -> InversionResult:
        """C^(ν)(h, q) 及反演诊断, q > 0"""
        config = config or InversionConfig()
        transform_config = transform_config or TransformConfig()
        if not q > 0:
            raise DomainError(f"归一化执行价必须为正: q = {q}")
        if not h > 0:
            raise DomainError(f"归一化期限必须为正: h = {h}")

        evaluator = TransformEvaluator(
            a=q,
            nu=nu,
            kernel_config=kernel_config or KernelConfig(),
            transform_config=transform_config,
        )
        result = LaplaceInversion.bromwich_invert(evaluator, h, config)

        # 结构性下界: C ≥ max(0, e_1 - q)
        floor = max(0.0, TransformCore.first_moment(h, nu, transform_config).real - q)
        slack = config.target_rel_tol * max(abs(result.value), floor) + config.target_abs_tol + result.error_indicator
        if result.value < floor - slack:
            raise NumericalFailureError(
                f"归一化价格 {result.value:.6g} 低于下界 {floor:.6g} (ν={nu}, h={h}, q={q})"
            )
        return result.model_copy(update={"value": max(result.value, floor)})

    @staticmethod
    def normalized_price(
        nu: float,
        h: float,
        q: float,
        config: Optional[InversionConfig] = None,
        kernel_config: Optional[KernelConfig] = None,
        transform_config: Optional[TransformConfig] = None,
    ) -> float:
        """
        归一化价格 C^(ν)(h, q) = E[(A_h^(ν) - q)^+], q > 0, 通过反演 F_q^(ν) 得到

        Raises:
            NumericalFailureError: 结果低于 max(0, e_1 - q) 超过容差
        """
        return LaplaceInversion.normalized_price_result(
            nu, h, q, config, kernel_config, transform_config
        ).value
