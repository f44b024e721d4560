"""
极坐标变换模块

r² = u² + v², tanθ = v/u，θ 沿 x 方向展开。
r 低于 r_floor 的节点上 θ 无定义，标记为无效并打断展开。
"""

from dataclasses import dataclass
from typing import List, Sequence
import logging

import numpy as np
import pandas as pd

from errors import ConfigError
from pde_solver import FieldState, Grid1D

logger = logging.getLogger(__name__)

DEFAULT_R_FLOOR = 1e-4


@dataclass(frozen=True, eq=False)
class PolarField:
    """(r, θ) 场，theta_valid 为 False 的节点相位无意义"""
    grid: Grid1D
    t: float
    r: np.ndarray
    theta: np.ndarray
    theta_valid: np.ndarray

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            't': self.t,
            'x': self.x,
            'r': self.r,
            'theta': self.theta,
            'theta_valid': self.theta_valid,
        })


def unwrap_valid(theta: np.ndarray, valid: np.ndarray) -> np.ndarray:
    """
    按连续有效段分别展开相位

    每一段从段内第一个节点起锚，段间互不影响；无效节点保留原始 atan2 值。
    """
    out = theta.copy()
    if not valid.any():
        return out
    # 找出有效段的起止
    edges = np.diff(np.concatenate([[0], valid.astype(np.int8), [0]]))
    starts = np.flatnonzero(edges == 1)
    stops = np.flatnonzero(edges == -1)
    for s, e in zip(starts, stops):
        out[s:e] = np.unwrap(theta[s:e])
    return out


def to_polar(state: FieldState, r_floor: float = DEFAULT_R_FLOOR) -> PolarField:
    """
    将 FieldState 转换为极坐标

    Args:
        state: 笛卡尔场
        r_floor: θ 有效的最小半径

    Returns:
        PolarField
    """
    if not r_floor > 0:
        raise ConfigError(f"r_floor 必须为正: {r_floor}")
    r = np.hypot(state.u, state.v)
    raw = np.arctan2(state.v, state.u)
    valid = r >= r_floor
    theta = unwrap_valid(raw, valid)
    return PolarField(grid=state.grid, t=state.t, r=r, theta=theta, theta_valid=valid)


def from_polar(pf: PolarField) -> FieldState:
    """逆变换 u = r cosθ, v = r sinθ"""
    u = pf.r * np.cos(pf.theta)
    v = pf.r * np.sin(pf.theta)
    return FieldState(grid=pf.grid, t=pf.t, u=u, v=v)


def transform_snapshots(snapshots: Sequence[FieldState], r_floor: float = DEFAULT_R_FLOOR) -> List[PolarField]:
    """批量转换快照"""
    fields = [to_polar(s, r_floor) for s in snapshots]
    logger.debug(f"极坐标变换完成: {len(fields)} 个快照")
    return fields


def transition_width(pf: PolarField, low: float = 0.1, high: float = 0.9) -> float:
    """
    波前过渡区 (r 从 low 到 high) 宽度占图案宽度的比例，两侧取较大者

    图案占据区间为 r > low 的最外侧节点之间。
    """
    above_low = np.flatnonzero(pf.r > low)
    above_high = np.flatnonzero(pf.r > high)
    if above_low.size == 0 or above_high.size == 0:
        return float('nan')
    h = pf.grid.h
    occupied = (above_low[-1] - above_low[0] + 1) * h
    right = (above_low[-1] - above_high[-1]) * h
    left = (above_high[0] - above_low[0]) * h
    return max(left, right) / occupied
