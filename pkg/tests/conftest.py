"""测试公共配置"""
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: 长时间数值验收测试（pytest -m \"not slow\" 跳过）")


@pytest.fixture
def small_grid():
    from pde_solver import Grid1D
    return Grid1D(-20.0, 20.0, 201)
