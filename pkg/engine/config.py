# 配置文件 (数值容差, 蒙特卡洛预算, 输出格式等)

import os

from pydantic_settings import BaseSettings, SettingsConfigDict

from shared.constants import (
    KERNEL_CONFIG,
    TRANSFORM_CONFIG,
    INVERSION_CONFIG,
    MC_CONFIG,
)
from shared.schemas import KernelConfig, TransformConfig, InversionConfig, McConfig


class Settings(BaseSettings):
    """应用配置"""

    model_config = SettingsConfigDict(env_file=".env", case_sensitive=True, extra="ignore")

    # 应用基础配置
    APP_NAME: str = "亚式期权Laplace定价引擎"
    APP_VERSION: str = "1.0.0"
    DEBUG: bool = False
    LOG_LEVEL: str = "WARNING"

    # 命令行默认输出格式 (text / json / csv)
    OUTPUT_FORMAT: str = "text"

    # 特殊函数核
    BESSEL_TERM_CAP: int = KERNEL_CONFIG["BESSEL_TERM_CAP"]
    BESSEL_REL_TOL: float = KERNEL_CONFIG["BESSEL_REL_TOL"]
    BESSEL_SERIES_CAP: float = KERNEL_CONFIG["BESSEL_SERIES_CAP"]
    ASYMPTOTIC_TERM_CAP: int = KERNEL_CONFIG["ASYMPTOTIC_TERM_CAP"]
    KUMMER_TERM_CAP: int = KERNEL_CONFIG["KUMMER_TERM_CAP"]
    KUMMER_REL_TOL: float = KERNEL_CONFIG["KUMMER_REL_TOL"]
    KUMMER_ASYMPTOTIC_MIN_X: float = KERNEL_CONFIG["KUMMER_ASYMPTOTIC_MIN_X"]

    # 变换核
    SINGULARITY_RADIUS: float = TRANSFORM_CONFIG["SINGULARITY_RADIUS"]
    QUAD_ABS_TOL: float = TRANSFORM_CONFIG["QUAD_ABS_TOL"]
    QUAD_REL_TOL: float = TRANSFORM_CONFIG["QUAD_REL_TOL"]
    ENVELOPE_CUTOFF: float = TRANSFORM_CONFIG["ENVELOPE_CUTOFF"]
    QUAD_LIMIT: int = TRANSFORM_CONFIG["QUAD_LIMIT"]

    # 数值反演
    INVERSION_ABSCISSA_MARGIN: float = INVERSION_CONFIG["ABSCISSA_MARGIN"]
    INVERSION_TERMS: int = INVERSION_CONFIG["TERMS"]
    INVERSION_EULER_STAGES: int = INVERSION_CONFIG["EULER_STAGES"]
    INVERSION_TARGET_REL_TOL: float = INVERSION_CONFIG["TARGET_REL_TOL"]
    INVERSION_TARGET_ABS_TOL: float = INVERSION_CONFIG["TARGET_ABS_TOL"]
    INVERSION_DAMPING: float = INVERSION_CONFIG["DAMPING"]

    # 蒙特卡洛
    MC_PATHS: int = MC_CONFIG["PATHS"]
    MC_STEPS_PER_UNIT_TIME: int = MC_CONFIG["STEPS_PER_UNIT_TIME"]
    MC_SEED: int = MC_CONFIG["SEED"]
    MC_ANTITHETIC: bool = MC_CONFIG["ANTITHETIC"]
    MC_BLOCK_SIZE: int = MC_CONFIG["BLOCK_SIZE"]
    MC_WORKERS: int = MC_CONFIG["WORKERS"]

    # 基准表并发定价的线程数
    BENCHMARK_WORKERS: int = 4

    def kernel_config(self) -> KernelConfig:
        """构建特殊函数核配置"""
        return KernelConfig(
            bessel_term_cap=self.BESSEL_TERM_CAP,
            bessel_rel_tol=self.BESSEL_REL_TOL,
            bessel_series_cap=self.BESSEL_SERIES_CAP,
            asymptotic_term_cap=self.ASYMPTOTIC_TERM_CAP,
            kummer_term_cap=self.KUMMER_TERM_CAP,
            kummer_rel_tol=self.KUMMER_REL_TOL,
            kummer_asymptotic_min_x=self.KUMMER_ASYMPTOTIC_MIN_X,
        )

    def transform_config(self) -> TransformConfig:
        """构建变换核配置"""
        return TransformConfig(
            singularity_radius=self.SINGULARITY_RADIUS,
            quad_abs_tol=self.QUAD_ABS_TOL,
            quad_rel_tol=self.QUAD_REL_TOL,
            envelope_cutoff=self.ENVELOPE_CUTOFF,
            quad_limit=self.QUAD_LIMIT,
        )

    def inversion_config(self) -> InversionConfig:
        """构建反演配置"""
        return InversionConfig(
            abscissa_margin=self.INVERSION_ABSCISSA_MARGIN,
            terms=self.INVERSION_TERMS,
            euler_stages=self.INVERSION_EULER_STAGES,
            target_rel_tol=self.INVERSION_TARGET_REL_TOL,
            target_abs_tol=self.INVERSION_TARGET_ABS_TOL,
            damping=self.INVERSION_DAMPING,
        )

    def mc_config(self) -> McConfig:
        """构建蒙特卡洛配置"""
        return McConfig(
            paths=self.MC_PATHS,
            steps_per_unit_time=self.MC_STEPS_PER_UNIT_TIME,
            seed=self.MC_SEED,
            antithetic=self.MC_ANTITHETIC,
            block_size=self.MC_BLOCK_SIZE,
            workers=self.MC_WORKERS,
        )


# 开发环境配置
class DevelopmentSettings(Settings):
    DEBUG: bool = True
    LOG_LEVEL: str = "INFO"


# 生产环境配置
class ProductionSettings(Settings):
    DEBUG: bool = False
    LOG_LEVEL: str = "WARNING"


# 测试环境配置 (较小的蒙特卡洛预算)
class TestSettings(Settings):
    MC_PATHS: int = 20000
    MC_STEPS_PER_UNIT_TIME: int = 500
    BENCHMARK_WORKERS: int = 2


def get_settings() -> Settings:
    """根据环境变量获取配置"""
    env = os.getenv("ENVIRONMENT", "production").lower()

    if env == "development":
        return DevelopmentSettings()
    elif env == "test":
        return TestSettings()
    else:
        return ProductionSettings()


# 全局配置实例
settings = get_settings()
