"""
实验室异常模块

所有可预期的失败都以 LabError 的子类抛出，携带 CLI 退出码和可序列化的附加信息:
- 1: 未预期的内部错误
- 2: 参数/配置校验失败
- 3: 数值计算失败（发散、边界污染）
- 4: 数据不足（波前未形成、快照太少）
"""

from typing import Any, Dict, Optional

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_INSUFFICIENT_DATA = 4


class LabError(Exception):
    """实验室错误基类"""

    exit_code = EXIT_NUMERICAL

    def __init__(self, message: str, exit_code: Optional[int] = None,
                 payload: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        if exit_code is not None:
            self.exit_code = exit_code
        self.payload = payload or {}

    def to_dict(self) -> Dict[str, Any]:
        """机器可读的错误描述"""
        data = {
            'error': self.message,
            'type': type(self).__name__,
            'code': self.exit_code,
        }
        data.update(self.payload)
        return data


class ConfigError(LabError):
    """配置或参数不合法"""
    exit_code = EXIT_VALIDATION


class InvalidDisturbanceError(ConfigError):
    """初始扰动不合法（振幅为零、宽度非正、中心越界）"""


class InvalidInsetError(ConfigError):
    """起始角测量点落在图案之外"""


class NumericalError(LabError):
    """数值计算失败"""
    exit_code = EXIT_NUMERICAL


class IntegrationDivergedError(NumericalError):
    """常微分方程积分出现非有限值"""


class SolverDivergedError(NumericalError):
    """PDE 时间推进出现非有限值"""


class BoundaryContaminationError(NumericalError):
    """图案到达计算域边界，无界区域假设不再成立"""


class ProfileDivergedError(NumericalError):
    """行波剖面积分发散"""


class InsufficientDataError(LabError):
    """数据不足，无法拟合"""
    exit_code = EXIT_INSUFFICIENT_DATA


class NoFrontError(InsufficientDataError):
    """快照中没有任何节点超过阈值（图案尚未形成）"""
