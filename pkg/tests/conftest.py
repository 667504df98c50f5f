# 测试公共配置: 项目路径, 测试环境配置, 数值配置夹具

import os
import sys

os.environ.setdefault("ENVIRONMENT", "test")

# 添加项目根目录到Python路径
project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, project_root)

import mpmath
import pytest

from shared.schemas import InversionConfig, KernelConfig, McConfig, TransformConfig

mpmath.mp.dps = 30


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="运行标记为 slow 的验收测试")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: 完整网格与完整蒙特卡洛预算的验收测试")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="需要 --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def kernel_config() -> KernelConfig:
    return KernelConfig()


@pytest.fixture
def transform_config() -> TransformConfig:
    return TransformConfig()


@pytest.fixture
def inversion_config() -> InversionConfig:
    return InversionConfig()


@pytest.fixture
def fast_mc() -> McConfig:
    """较小的蒙特卡洛预算, 固定种子"""
    return McConfig(paths=20000, steps_per_unit_time=2000, seed=20240611, block_size=5000)
