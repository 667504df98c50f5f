# 复数特殊函数核: 主值平方根, 对数Gamma, 修正Bessel函数 I_μ, Kummer合流超几何函数 Φ

import cmath
import logging
import math
from typing import Any, Optional, Tuple, Union

import numpy as np

from engine.core.exceptions import ConvergenceError, DomainError
from shared.schemas import KernelConfig, SeriesDiagnostics

logger = logging.getLogger(__name__)

ComplexLike = Union[complex, float, np.ndarray]

# Lanczos 近似系数 (g = 7, 9 项)
LANCZOS_G = 7.0
LANCZOS_COEFFICIENTS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)

# Kummer 级数的重标度阈值
_RESCALE = 1e200
_LOG_RESCALE = math.log(_RESCALE)


def _is_scalar(*values: Any) -> bool:
    return all(np.ndim(v) == 0 for v in values)


def _all(condition: Any) -> bool:
    if isinstance(condition, np.ndarray):
        return bool(condition.all())
    return bool(condition)


def _any(condition: Any) -> bool:
    if isinstance(condition, np.ndarray):
        return bool(condition.any())
    return bool(condition)


class _CompensatedSum:
    """Neumaier 补偿求和, 实部与虚部分别补偿; 同时支持 Python 标量与 numpy 数组"""

    def __init__(self, first: ComplexLike):
        self._re = first.real + 0.0
        self._im = first.imag + 0.0
        self._re_carry = 0.0 * self._re
        self._im_carry = 0.0 * self._im

    @staticmethod
    def _step(total, carry, x):
        t = total + x
        if np.ndim(t) == 0:
            if abs(total) >= abs(x):
                carry += (total - t) + x
            else:
                carry += (x - t) + total
        else:
            carry = carry + np.where(np.abs(total) >= np.abs(x), (total - t) + x, (x - t) + total)
        return t, carry

    def add(self, term: ComplexLike) -> None:
        self._re, self._re_carry = self._step(self._re, self._re_carry, term.real)
        self._im, self._im_carry = self._step(self._im, self._im_carry, term.imag)

    def scale(self, factor: Union[float, np.ndarray]) -> None:
        self._re = self._re * factor
        self._im = self._im * factor
        self._re_carry = self._re_carry * factor
        self._im_carry = self._im_carry * factor

    @property
    def estimate(self) -> ComplexLike:
        """未补偿的近似和 (用于收敛判断)"""
        return self._re + 1j * self._im

    @property
    def value(self) -> ComplexLike:
        return (self._re + self._re_carry) + 1j * (self._im + self._im_carry)


class ComplexKernel:
    """复数特殊函数核心类"""

    # ------------------------------------------------------------------
    # 主值平方根
    # ------------------------------------------------------------------
    @staticmethod
    def principal_sqrt(w: ComplexLike) -> ComplexLike:
        """
        复平面去掉 (-∞, 0] 后的主值平方根, 结果实部为正

        Args:
            w: 复数或复数数组

        Returns:
            与输入形状相同的平方根

        Raises:
            DomainError: w 落在割线 (-∞, 0] 上
        """
        if np.ndim(w) == 0:
            w = complex(w)
            if w.imag == 0.0 and w.real <= 0.0:
                raise DomainError(f"主值平方根在割线 (-∞, 0] 上无定义: w = {w}")
            return cmath.sqrt(w)

        w = np.asarray(w, dtype=complex)
        on_cut = (w.imag == 0.0) & (w.real <= 0.0)
        if on_cut.any():
            raise DomainError(f"主值平方根在割线 (-∞, 0] 上无定义: {int(on_cut.sum())} 个点")
        return np.sqrt(w)

    @staticmethod
    def mu_param(z: ComplexLike, nu: ComplexLike) -> ComplexLike:
        """μ(z) = √(2z + ν²), 主值分支"""
        if _is_scalar(z, nu):
            z, nu = complex(z), complex(nu)
        else:
            z, nu = np.asarray(z, dtype=complex), np.asarray(nu, dtype=complex)
        return ComplexKernel.principal_sqrt(2.0 * z + nu * nu)

    # ------------------------------------------------------------------
    # 对数Gamma
    # ------------------------------------------------------------------
    @staticmethod
    def _lanczos_log_gamma(w: ComplexLike, lib) -> ComplexLike:
        z = w - 1.0
        series = LANCZOS_COEFFICIENTS[0]
        for i, coefficient in enumerate(LANCZOS_COEFFICIENTS[1:], start=1):
            series = series + coefficient / (z + i)
        t = z + LANCZOS_G + 0.5
        return HALF_LOG_TWO_PI + (z + 0.5) * lib.log(t) - t + lib.log(series)

    @staticmethod
    def log_gamma(w: ComplexLike) -> ComplexLike:
        """
        右半平面上的对数Gamma (主分支, 在正实轴上为实数)

        Re(w) < 1/2 时先用 logΓ(w) = logΓ(w+1) - log(w) 平移到 Lanczos 近似的适用区域

        Raises:
            DomainError: Re(w) ≤ 0
        """
        if np.ndim(w) == 0:
            w = complex(w)
            if w.real <= 0.0:
                raise DomainError(f"log_gamma 需要 Re(w) > 0: w = {w}")
            if w.real < 0.5:
                return ComplexKernel._lanczos_log_gamma(w + 1.0, cmath) - cmath.log(w)
            return ComplexKernel._lanczos_log_gamma(w, cmath)

        w = np.asarray(w, dtype=complex)
        if (w.real <= 0.0).any():
            raise DomainError("log_gamma 需要 Re(w) > 0")
        shifted = w.real < 0.5
        result = ComplexKernel._lanczos_log_gamma(np.where(shifted, w + 1.0, w), np)
        return np.where(shifted, result - np.log(w), result)

    # ------------------------------------------------------------------
    # 修正Bessel函数 I_μ(ξ)
    # ------------------------------------------------------------------
    @staticmethod
    def bessel_i(
        mu: ComplexLike,
        xi: Union[float, np.ndarray],
        scaled: bool = False,
        config: Optional[KernelConfig] = None,
    ) -> ComplexLike:
        """
        第一类修正Bessel函数 I_μ(ξ), 复阶数 μ, 正实自变量 ξ

        ξ 不超过 config.bessel_series_cap 时用升幂级数 (补偿求和),
        否则使用大自变量渐近展开

        Args:
            mu: 阶数, 要求 Re(μ) > -1
            xi: 正实自变量
            scaled: 为 True 时返回 e^{-ξ} I_μ(ξ)
            config: 截断与容差

        Returns:
            I_μ(ξ), 标量或按广播规则得到的数组
        """
        config = config or KernelConfig()
        if np.iscomplexobj(xi) and np.any(np.imag(xi) != 0):
            raise DomainError("bessel_i 只接受正实自变量")
        if np.any(np.real(xi) <= 0):
            raise DomainError("bessel_i 需要 ξ > 0")
        if np.any(np.real(mu) <= -1.0):
            raise DomainError("bessel_i 需要 Re(μ) > -1")

        cap = config.bessel_series_cap
        if _is_scalar(mu, xi):
            mu, xi = complex(mu), float(np.real(xi))
            if xi <= cap:
                return ComplexKernel._bessel_series(mu, xi, scaled, config)
            return ComplexKernel._bessel_asymptotic(mu, xi, scaled, config)

        mu_arr, xi_arr = np.broadcast_arrays(np.asarray(mu, dtype=complex), np.asarray(np.real(xi), dtype=float))
        result = np.empty(mu_arr.shape, dtype=complex)
        series = xi_arr <= cap
        if series.any():
            result[series] = ComplexKernel._bessel_series(mu_arr[series], xi_arr[series], scaled, config)
        if (~series).any():
            result[~series] = ComplexKernel._bessel_asymptotic(mu_arr[~series], xi_arr[~series], scaled, config)
        return result

    @staticmethod
    def _bessel_series(mu, xi, scaled: bool, config: KernelConfig):
        scalar = _is_scalar(mu, xi)
        lib = cmath if scalar else np
        half = 0.5 * xi
        log_first = mu * (math.log(half) if scalar else np.log(half)) - ComplexKernel.log_gamma(mu + 1.0)
        if scaled:
            log_first = log_first - xi
        term = lib.exp(log_first)
        total = _CompensatedSum(term)
        quarter = half * half
        tol = config.bessel_rel_tol

        for n in range(config.bessel_term_cap):
            ratio = quarter / ((n + 1) * (mu + n + 1))
            term = term * ratio
            total.add(term)
            if _all(abs(term) <= tol * abs(total.estimate)) and _all(abs(ratio) < 1.0):
                return total.value

        raise ConvergenceError(
            f"Bessel 级数在 {config.bessel_term_cap} 项内未收敛", terms_used=config.bessel_term_cap
        )

    @staticmethod
    def _bessel_asymptotic(mu, xi, scaled: bool, config: KernelConfig):
        scalar = _is_scalar(mu, xi)
        lib = cmath if scalar else np
        four_mu_sq = 4.0 * mu * mu
        term = 1.0 + 0j if scalar else np.ones(np.broadcast(mu, xi).shape, dtype=complex)
        total = _CompensatedSum(term)
        previous = abs(term)
        tol = config.bessel_rel_tol

        for k in range(1, config.asymptotic_term_cap + 1):
            term = term * (-(four_mu_sq - (2 * k - 1) ** 2)) / (8.0 * k * xi)
            total.add(term)
            size = abs(term)
            if _all(size <= tol * abs(total.estimate)):
                break
            if _any(size > previous):
                raise ConvergenceError(f"Bessel 渐近展开在第 {k} 项开始发散", terms_used=k)
            previous = size
        else:
            raise ConvergenceError(
                f"Bessel 渐近展开在 {config.asymptotic_term_cap} 项内未收敛",
                terms_used=config.asymptotic_term_cap,
            )

        # 被忽略的指数小分支必须可以忽略
        neglected = -2.0 * xi + math.pi * abs(mu.imag)
        if _any(neglected > math.log(tol)):
            raise ConvergenceError("渐近展开的指数小分支不可忽略, 请提高 bessel_series_cap")

        prefactor = 1.0 / lib.sqrt(2.0 * math.pi * xi)
        if not scaled:
            prefactor = prefactor * lib.exp(xi)
        return prefactor * total.value

    # ------------------------------------------------------------------
    # Kummer 合流超几何函数 Φ(α, β; x)
    # ------------------------------------------------------------------
    @staticmethod
    def _check_kummer_beta(beta) -> None:
        beta_arr = np.asarray(beta, dtype=complex)
        pole = (beta_arr.imag == 0) & (beta_arr.real <= 0) & (beta_arr.real == np.round(beta_arr.real))
        if pole.any():
            raise DomainError("Kummer 函数在 β 为非正整数处无定义")

    @staticmethod
    def _kummer_sum(alpha, beta, x, config: KernelConfig):
        """升幂级数求和, 返回 (log Φ, 使用项数, 最大项下标, 最大项对数模)"""
        scalar = _is_scalar(alpha, beta, x)
        if scalar:
            alpha, beta, x = complex(alpha), complex(beta), float(np.real(x))
        else:
            alpha, beta, x = np.broadcast_arrays(
                np.asarray(alpha, dtype=complex),
                np.asarray(beta, dtype=complex),
                np.asarray(np.real(x), dtype=float),
            )
        ComplexKernel._check_kummer_beta(beta)
        lib = cmath if scalar else np

        term = 1.0 + 0j if scalar else np.ones(alpha.shape, dtype=complex)
        total = _CompensatedSum(term)
        log_ref = 0.0 if scalar else np.zeros(alpha.shape)
        peak_log = 0.0 if scalar else np.zeros(alpha.shape)
        peak_index = 0 if scalar else np.zeros(alpha.shape, dtype=int)
        tol = config.kummer_rel_tol

        for n in range(config.kummer_term_cap):
            ratio = (alpha + n) * x / ((beta + n) * (n + 1))
            term = term * ratio
            total.add(term)
            size = abs(term)

            if scalar:
                log_size = (math.log(size) if size > 0 else -math.inf) + log_ref
                if log_size > peak_log:
                    peak_log, peak_index = log_size, n + 1
                if size > _RESCALE:
                    term = term / _RESCALE
                    total.scale(1.0 / _RESCALE)
                    log_ref += _LOG_RESCALE
                    size = abs(term)
            else:
                with np.errstate(divide="ignore"):
                    log_size = np.log(size) + log_ref
                higher = log_size > peak_log
                peak_log = np.where(higher, log_size, peak_log)
                peak_index = np.where(higher, n + 1, peak_index)
                big = size > _RESCALE
                if big.any():
                    factor = np.where(big, 1.0 / _RESCALE, 1.0)
                    term = term * factor
                    total.scale(factor)
                    log_ref = log_ref + np.where(big, _LOG_RESCALE, 0.0)
                    size = np.abs(term)

            if _all(size <= tol * abs(total.estimate)) and _all(abs(ratio) < 1.0):
                log_value = lib.log(total.value) + log_ref
                return log_value, n + 2, peak_index, peak_log

        raise ConvergenceError(
            f"Kummer 级数在 {config.kummer_term_cap} 项内未收敛", terms_used=config.kummer_term_cap
        )

    @staticmethod
    def _kummer_asymptotic(alpha, beta, x, config: KernelConfig):
        """
        大自变量展开 e^{-x}Φ ≈ Γ(β)/Γ(α)·x^{α-β}·Σ (β-α)_n (1-α)_n / (n!·x^n)

        另一支贡献相对为 e^{-x} 量级, 忽略; 返回 (log(e^{-x}Φ), 收敛掩码, 使用项数)
        """
        first = beta - alpha
        second = 1.0 - alpha
        term = np.ones(alpha.shape, dtype=complex)
        total = _CompensatedSum(term)
        previous = np.ones(alpha.shape)
        converged = np.zeros(alpha.shape, dtype=bool)
        diverged = np.zeros(alpha.shape, dtype=bool)
        decreasing = np.zeros(alpha.shape, dtype=bool)
        tol = config.kummer_rel_tol

        terms_used = 1
        for n in range(config.asymptotic_term_cap):
            active = ~(converged | diverged)
            term = np.where(active, term * (first + n) * (second + n) / ((n + 1) * x), 0.0)
            total.add(term)
            size = np.abs(term)
            # 渐近级数在最小项之后重新增大
            diverged |= active & decreasing & (size > previous)
            decreasing |= active & (size < previous)
            converged |= active & ~diverged & (size <= tol * np.abs(total.estimate))
            previous = size
            terms_used = n + 2
            if not (~(converged | diverged)).any():
                break

        with np.errstate(divide="ignore", invalid="ignore"):
            log_value = (
                ComplexKernel.log_gamma(beta)
                - ComplexKernel.log_gamma(alpha)
                + (alpha - beta) * np.log(x)
                + np.log(total.value)
            )
        return log_value, converged, terms_used

    @staticmethod
    def _kummer_log_scaled(alpha, beta, x, config: KernelConfig):
        """log(e^{-x}Φ): x 足够大且 Re α, Re β > 0 时先用渐近展开, 未收敛的点回退到升幂级数"""
        scalar = _is_scalar(alpha, beta, x)
        alpha, beta, x = np.broadcast_arrays(
            np.atleast_1d(np.asarray(alpha, dtype=complex)),
            np.atleast_1d(np.asarray(beta, dtype=complex)),
            np.atleast_1d(np.asarray(np.real(x), dtype=float)),
        )
        ComplexKernel._check_kummer_beta(beta)

        result = np.empty(alpha.shape, dtype=complex)
        asymptotic = (x >= config.kummer_asymptotic_min_x) & (alpha.real > 0) & (beta.real > 0)
        if asymptotic.any():
            log_value, converged, terms_used = ComplexKernel._kummer_asymptotic(
                alpha[asymptotic], beta[asymptotic], x[asymptotic], config
            )
            logger.debug(f"Kummer 渐近展开使用 {terms_used} 项, {int(converged.sum())}/{converged.size} 点收敛")
            accepted = asymptotic.copy()
            accepted[asymptotic] = converged
            result[accepted] = log_value[converged]
        else:
            accepted = asymptotic

        pending = ~accepted
        if pending.any():
            log_value, terms_used, _, _ = ComplexKernel._kummer_sum(alpha[pending], beta[pending], x[pending], config)
            logger.debug(f"Kummer 级数使用 {terms_used} 项")
            result[pending] = log_value - x[pending]
        return complex(result[0]) if scalar else result

    @staticmethod
    def kummer_log_phi(
        alpha: ComplexLike,
        beta: ComplexLike,
        x: Union[float, np.ndarray],
        scaled: bool = False,
        config: Optional[KernelConfig] = None,
    ) -> ComplexLike:
        """log Φ(α, β; x), scaled 时为 log(e^{-x} Φ); 虚部只确定到 2π 的整数倍"""
        config = config or KernelConfig()
        log_scaled = ComplexKernel._kummer_log_scaled(alpha, beta, x, config)
        return log_scaled if scaled else log_scaled + x

    @staticmethod
    def kummer_phi(
        alpha: ComplexLike,
        beta: ComplexLike,
        x: Union[float, np.ndarray],
        scaled: bool = False,
        config: Optional[KernelConfig] = None,
    ) -> ComplexLike:
        """
        Kummer 合流超几何函数 Φ(α, β; x) = Σ (α)_n / (β)_n · x^n / n!

        Args:
            alpha, beta: 复参数, β 不能是非正整数
            x: 实自变量
            scaled: 为 True 时返回 e^{-x} Φ(α, β; x)

        Raises:
            DomainError: β 为非正整数
            ConvergenceError: 超过项数上限仍未收敛
        """
        log_value = ComplexKernel.kummer_log_phi(alpha, beta, x, scaled, config)
        if np.ndim(log_value) == 0:
            return cmath.exp(log_value)
        return np.exp(log_value)

    @staticmethod
    def kummer_phi_series(
        alpha: complex,
        beta: complex,
        x: float,
        scaled: bool = False,
        config: Optional[KernelConfig] = None,
    ) -> Tuple[complex, SeriesDiagnostics]:
        """带抵消审计诊断的标量 Kummer 级数"""
        config = config or KernelConfig()
        log_value, terms_used, peak_index, peak_log = ComplexKernel._kummer_sum(alpha, beta, x, config)
        if scaled:
            log_value -= x
            peak_log -= x
        diagnostics = SeriesDiagnostics(
            terms_used=terms_used, peak_index=int(peak_index), peak_log_modulus=float(peak_log)
        )
        return cmath.exp(log_value), diagnostics
