# Laplace 变换核: 指数泛函的矩, Weber 型积分 D_ν 与变换 F_a^(ν)(z)

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate, special

from engine.core.exceptions import DomainError, QuadratureError
from engine.core.systems.complex_kernel import ComplexKernel, ComplexLike
from shared.schemas import KernelConfig, TransformConfig

logger = logging.getLogger(__name__)

# 级数求和的机器精度终止阈值
_SERIES_EPS = 1e-17


def _expm1(u: ComplexLike) -> ComplexLike:
    """e^u - 1, 对复数在 u → 0 时无抵消误差"""
    if np.ndim(u) == 0:
        u = complex(u)
        if u.imag == 0.0:
            return complex(math.expm1(u.real))
        return complex(
            math.expm1(u.real) * math.cos(u.imag) - 2.0 * math.sin(0.5 * u.imag) ** 2,
            math.exp(u.real) * math.sin(u.imag),
        )
    u = np.asarray(u, dtype=complex)
    real = np.expm1(u.real) * np.cos(u.imag) - 2.0 * np.sin(0.5 * u.imag) ** 2
    return real + 1j * np.exp(u.real) * np.sin(u.imag)


def _exprel_series(u: complex) -> complex:
    """(e^u - 1)/u = Σ u^n / (n+1)!"""
    term = 1.0 + 0j
    total = term
    n = 0
    while abs(term) > _SERIES_EPS * abs(total):
        n += 1
        term *= u / (n + 1)
        total += term
    return total


def _exprel(u: complex, radius: float) -> complex:
    """整函数 (e^u - 1)/u, |u| 小于 radius 时使用级数"""
    u = complex(u)
    if abs(u) < radius:
        return _exprel_series(u)
    if u.imag == 0.0:
        return complex(special.exprel(u.real))
    return _expm1(u) / u


@dataclass(frozen=True)
class TransformEvaluator:
    """
    固定 (a, ν) 的变换求值器 z ↦ F_a^(ν)(z)

    finiteness_abscissa: Re z 超过它时变换有限
    identity_abscissa: Re z 超过它时变换等于定价辅助函数的 Laplace 变换
    """
    a: float
    nu: complex
    kernel_config: KernelConfig = field(default_factory=KernelConfig)
    transform_config: TransformConfig = field(default_factory=TransformConfig)
    finiteness_abscissa: float = field(init=False)
    identity_abscissa: float = field(init=False)

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError(f"变换参数 a 必须为正: a = {self.a}")
        object.__setattr__(self, "nu", complex(self.nu))
        object.__setattr__(self, "finiteness_abscissa", TransformCore.finiteness_abscissa(self.nu))
        object.__setattr__(self, "identity_abscissa", TransformCore.identity_abscissa(self.nu))

    @property
    def validity_abscissa(self) -> float:
        return max(self.finiteness_abscissa, self.identity_abscissa)

    def __call__(self, z: ComplexLike) -> ComplexLike:
        return TransformCore.laplace_F(self, z)


class TransformCore:
    """变换核心类"""

    # ------------------------------------------------------------------
    # 矩
    # ------------------------------------------------------------------
    @staticmethod
    def first_moment(x: float, nu: complex, config: Optional[TransformConfig] = None) -> complex:
        """
        一阶矩 e_1 = E[A_x^(ν)] = (e^{2x(ν+1)} - 1) / (2(ν+1))

        ν 距 -1 小于 singularity_radius 时用级数 x·Σ (2x(ν+1))^n/(n+1)!
        """
        config = config or TransformConfig()
        if x < 0:
            raise DomainError(f"first_moment 需要 x ≥ 0: x = {x}")
        nu = complex(nu)
        u = 2.0 * x * (nu + 1.0)
        if abs(nu + 1.0) < config.singularity_radius:
            return x * _exprel_series(u)
        return _expm1(u) / (2.0 * (nu + 1.0))

    @staticmethod
    def second_moment(x: float, nu: complex, config: Optional[TransformConfig] = None) -> complex:
        """
        二阶矩 e_2 = E[(A_x^(ν))²]

        一般公式写成 x/(ν+1)·[e^{2x(ν+1)}·E(2x(ν+3)) - E(4x(ν+2))], E(u) = (e^u - 1)/u,
        ν = -2, -3 处的分母包含在 E 中; ν 距 -1 小于 singularity_radius 时
        改用在 ν = -1 处正则的等价形式 x/(2(ν+2))·[e^{2x(ν+1)}·E(2x(ν+3)) - E(2x(ν+1))]
        """
        config = config or TransformConfig()
        if x < 0:
            raise DomainError(f"second_moment 需要 x ≥ 0: x = {x}")
        if x == 0:
            return 0j
        nu = complex(nu)
        radius = config.singularity_radius
        lead = cmath.exp(2.0 * x * (nu + 1.0)) * _exprel(2.0 * x * (nu + 3.0), radius)
        if abs(nu + 1.0) < radius:
            return x / (2.0 * (nu + 2.0)) * (lead - _exprel(2.0 * x * (nu + 1.0), radius))
        return x / (nu + 1.0) * (lead - _exprel(4.0 * x * (nu + 2.0), radius))

    @staticmethod
    def first_moment_transform(nu: complex, z: ComplexLike) -> ComplexLike:
        """一阶矩的 Laplace 变换 1/(z(z - 2(ν+1))), Re z > max(0, 2(Re ν+1))"""
        nu = complex(nu)
        bound = max(0.0, 2.0 * (nu.real + 1.0))
        if np.any(np.real(z) <= bound):
            raise DomainError(f"一阶矩变换需要 Re z > {bound}")
        return 1.0 / (z * (z - 2.0 * (nu + 1.0)))

    # ------------------------------------------------------------------
    # 横坐标
    # ------------------------------------------------------------------
    @staticmethod
    def finiteness_abscissa(nu: complex) -> float:
        """max{0, Im²ν/2 + 2(Re ν + 1)}"""
        nu = complex(nu)
        return max(0.0, 0.5 * nu.imag ** 2 + 2.0 * (nu.real + 1.0))

    @staticmethod
    def identity_abscissa(nu: complex) -> float:
        """实 ν ≥ 0 为 2(ν+1), 实 ν < 0 为 4, 复 ν 为有限性界与 4 的较大者"""
        nu = complex(nu)
        if nu.imag == 0.0:
            return 2.0 * (nu.real + 1.0) if nu.real >= 0 else 4.0
        return max(4.0, TransformCore.finiteness_abscissa(nu))

    @staticmethod
    def transform_majorant(nu: complex, z: complex) -> float:
        """|F(z)| 的上界 1/(ξ0(ξ0 - 2(Re ν+1))), ξ0 = Re z - Im²ν/2"""
        nu = complex(nu)
        xi0 = complex(z).real - 0.5 * nu.imag ** 2
        gap = xi0 - 2.0 * (nu.real + 1.0)
        if xi0 <= 0 or gap <= 0:
            raise DomainError("z 不在有限性区域内")
        return 1.0 / (xi0 * gap)

    # ------------------------------------------------------------------
    # Weber 型积分 D_ν(a, z)
    # ------------------------------------------------------------------
    @staticmethod
    def weber_D_closed(
        a: float,
        nu: complex,
        z: ComplexLike,
        config: Optional[KernelConfig] = None,
    ) -> ComplexLike:
        """
        闭式 D = Γ((ν+4+μ)/2)/Γ(μ+1)·Φ((ν+4+μ)/2, μ+1; 1/(2a))·e^{-1/(2a)}·(2a)^{(ν+2-μ)/2}

        Gamma 比值与 e^{-x}Φ 在对数域中合并, 避免小 a 时上溢

        Args:
            a: 正实参数
            nu: 指数, |Im ν| ≤ 1
            z: Re z ≥ 2, 可为数组

        Returns:
            D_ν(a, z)
        """
        config = config or KernelConfig()
        nu = complex(nu)
        if not a > 0:
            raise DomainError(f"weber_D_closed 需要 a > 0: a = {a}")
        if abs(nu.imag) > 1.0:
            raise DomainError(f"weber_D_closed 需要 |Im ν| ≤ 1: ν = {nu}")
        if np.any(np.real(z) < 2.0):
            raise DomainError("weber_D_closed 需要 Re z ≥ 2")

        scalar = np.ndim(z) == 0
        z = complex(z) if scalar else np.asarray(z, dtype=complex)
        mu = ComplexKernel.mu_param(z, nu)
        alpha = 0.5 * (nu + 4.0 + mu)
        beta = mu + 1.0
        x = 0.5 / a
        log_value = (
            ComplexKernel.log_gamma(alpha)
            - ComplexKernel.log_gamma(beta)
            + ComplexKernel.kummer_log_phi(alpha, beta, x, scaled=True, config=config)
            + 0.5 * (nu + 2.0 - mu) * math.log(2.0 * a)
        )
        return cmath.exp(log_value) if scalar else np.exp(log_value)

    @staticmethod
    def _weber_log_integrand(x, a: float, nu: complex, mu: complex, config: KernelConfig):
        """被积函数 e^{-1/(2a)}/a·e^{-x²/(2a)}·x^{ν+3}·I_μ(x/a) 的对数, 用缩放 Bessel 函数避免上溢"""
        bessel = ComplexKernel.bessel_i(mu, x / a, scaled=True, config=config)
        log_x = np.log(x) if np.ndim(x) else math.log(x)
        return -((x - 1.0) ** 2) / (2.0 * a) + (nu + 3.0) * log_x - math.log(a), bessel

    @staticmethod
    def weber_D_quadrature(
        a: float,
        nu: complex,
        z: complex,
        kernel_config: Optional[KernelConfig] = None,
        transform_config: Optional[TransformConfig] = None,
    ) -> complex:
        """
        积分表示 D = (e^{-1/(2a)}/a)∫_0^∞ e^{-x²/(2a)} x^{ν+3} I_μ(x/a) dx, 自适应 Gauss-Kronrod

        积分上限取被积函数模降到峰值 envelope_cutoff 倍处; 峰值位置作为断点

        Raises:
            QuadratureError: 未达到容差
        """
        kernel_config = kernel_config or KernelConfig()
        transform_config = transform_config or TransformConfig()
        nu = complex(nu)
        z = complex(z)
        if not a > 0:
            raise DomainError(f"weber_D_quadrature 需要 a > 0: a = {a}")
        if z.real < 2.0:
            raise DomainError("weber_D_quadrature 需要 Re z ≥ 2")
        mu = ComplexKernel.mu_param(z, nu)

        def log_modulus(x):
            log_envelope, bessel = TransformCore._weber_log_integrand(x, a, nu, mu, kernel_config)
            with np.errstate(divide="ignore"):
                return log_envelope.real + np.log(np.abs(bessel))

        # 寻找峰值与截断点
        log_cutoff = math.log(transform_config.envelope_cutoff)
        x_max = 1.0 + math.sqrt(2.0 * a * (abs(nu) + 3.0 + abs(mu) + 50.0))
        for _ in range(60):
            grid = np.linspace(x_max / 800.0, x_max, 800)
            profile = log_modulus(grid)
            peak = int(np.argmax(profile))
            if profile[-1] < profile[peak] + log_cutoff:
                break
            x_max *= 1.5
        else:
            raise QuadratureError("未能找到 Weber 积分的截断点")
        above = np.nonzero(profile >= profile[peak] + log_cutoff)[0]
        x_upper = float(grid[min(above[-1] + 1, grid.size - 1)])
        x_peak = float(grid[peak])
        mass = math.exp(profile[peak]) * x_upper

        def integrand(x):
            log_envelope, bessel = TransformCore._weber_log_integrand(x, a, nu, mu, kernel_config)
            value = cmath.exp(log_envelope) * bessel
            return np.array([value.real, value.imag])

        epsabs = transform_config.quad_abs_tol * mass
        result, error, info = integrate.quad_vec(
            integrand,
            0.0,
            x_upper,
            epsabs=epsabs,
            epsrel=transform_config.quad_rel_tol,
            limit=transform_config.quad_limit,
            points=(x_peak,),
            full_output=True,
        )
        value = complex(result[0], result[1])
        logger.debug(
            f"Weber 积分 a={a}, ν={nu}, z={z}: 上限 {x_upper:.4g}, 峰值 {x_peak:.4g}, "
            f"误差估计 {error:.3g}, 区间数 {info.intervals.shape[0]}"
        )
        if not info.success or error > 10.0 * max(epsabs, transform_config.quad_rel_tol * abs(value)):
            raise QuadratureError(f"Weber 积分未达到容差: 误差估计 {error:.3g}, {info.message}")
        return value

    # ------------------------------------------------------------------
    # 变换 F_a^(ν)(z)
    # ------------------------------------------------------------------
    @staticmethod
    def laplace_F(evaluator: TransformEvaluator, z: ComplexLike) -> ComplexLike:
        """
        F_a^(ν)(z) = D_ν(a, z) / (z(z - 2(ν+1)))

        Raises:
            DomainError: Re z 不超过有限性横坐标与恒等横坐标中的较大者, 报告两个界
        """
        bound = evaluator.validity_abscissa
        lowest = float(np.min(np.real(z)))
        if lowest <= bound:
            raise DomainError(
                f"Re z = {lowest:.6g} 不在有效区域内: 有限性横坐标 {evaluator.finiteness_abscissa:.6g}, "
                f"恒等横坐标 {evaluator.identity_abscissa:.6g}",
                finiteness_abscissa=evaluator.finiteness_abscissa,
                identity_abscissa=evaluator.identity_abscissa,
                real_part=lowest,
            )
        scalar = np.ndim(z) == 0
        z = complex(z) if scalar else np.asarray(z, dtype=complex)
        nu = evaluator.nu
        weber = TransformCore.weber_D_closed(evaluator.a, nu, z, evaluator.kernel_config)
        return weber / (z * (z - 2.0 * (nu + 1.0)))
