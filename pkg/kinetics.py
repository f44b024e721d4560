"""
λ-ω 反应动力学模块

提供:
- 反应项 f = -v + u(1-u²-v²), g = u + v(1-u²-v²)
- 极坐标约化 dr/dt = r(1-r²), dθ/dt = 1
- 固定步长四阶 Runge-Kutta 相图积分器
"""

from dataclasses import dataclass
from typing import List, NamedTuple, Sequence, Tuple
import logging

import numpy as np
import pandas as pd

from errors import ConfigError, IntegrationDivergedError

logger = logging.getLogger(__name__)


class CartesianPoint(NamedTuple):
    """(u, v) 浓度偏差，可以是标量也可以是同形数组"""
    u: float
    v: float


class PolarPoint(NamedTuple):
    """(r, θ)，θ 不做 2π 折叠"""
    r: float
    theta: float


@dataclass(frozen=True)
class OdeTrajectory:
    """相图轨迹: times 严格递增，points 形状为 (len(times), 2)"""
    times: np.ndarray
    points: np.ndarray

    def __post_init__(self):
        if len(self.times) != len(self.points):
            raise ValueError("times 与 points 长度不一致")

    @property
    def u(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def v(self) -> np.ndarray:
        return self.points[:, 1]

    @property
    def radius(self) -> np.ndarray:
        return np.hypot(self.u, self.v)

    @property
    def phase(self) -> np.ndarray:
        """沿时间展开的相位，只有差值有意义"""
        return np.unwrap(np.arctan2(self.v, self.u))

    def to_frame(self) -> pd.DataFrame:
        """转换为 t, u, v, r, theta 列的 DataFrame"""
        return pd.DataFrame({
            't': self.times,
            'u': self.u,
            'v': self.v,
            'r': self.radius,
            'theta': self.phase,
        })


def reaction_terms(point: Sequence) -> Tuple[np.ndarray, np.ndarray]:
    """
    计算 λ-ω 反应项

    Args:
        point: (u, v)，标量或数组

    Returns:
        (f, g)
    """
    u, v = point
    lam = 1.0 - (u * u + v * v)
    f = -v + u * lam
    g = u + v * lam
    return f, g


def polar_rhs(point: Sequence) -> Tuple[np.ndarray, np.ndarray]:
    """极坐标下的右端项 (dr/dt, dθ/dt)；角速度恒为 1"""
    r, theta = point
    dr_dt = r * (1.0 - r * r)
    dtheta_dt = np.ones_like(theta, dtype=float) if np.ndim(theta) else 1.0
    return dr_dt, dtheta_dt


def _rk4_step(state: np.ndarray, dt: float) -> np.ndarray:
    def rhs(y):
        f, g = reaction_terms(y)
        return np.array([f, g])

    k1 = rhs(state)
    k2 = rhs(state + 0.5 * dt * k1)
    k3 = rhs(state + 0.5 * dt * k2)
    k4 = rhs(state + dt * k3)
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_ode(start: Sequence, dt: float, t_end: float) -> OdeTrajectory:
    """
    固定步长 RK4 积分反应 ODE

    Args:
        start: 初始点 (u, v)
        dt: 时间步长
        t_end: 积分时长

    Returns:
        OdeTrajectory，最后时刻不早于 t_end - dt
    """
    if dt <= 0:
        raise ConfigError(f"时间步长必须为正: dt={dt}")
    if t_end <= dt:
        raise ConfigError(f"积分时长必须大于步长: t_end={t_end}, dt={dt}")

    n_steps = int(np.ceil(t_end / dt - 1e-9))
    times = np.arange(n_steps + 1) * dt
    points = np.empty((n_steps + 1, 2))
    points[0] = np.asarray(start, dtype=float)

    state = points[0].copy()
    for i in range(1, n_steps + 1):
        state = _rk4_step(state, dt)
        if not np.all(np.isfinite(state)):
            t_fail = float(times[i])
            raise IntegrationDivergedError(
                f"ODE 积分在 t={t_fail:.6g} 发散",
                payload={'t': t_fail, 'start': [float(s) for s in points[0]]}
            )
        points[i] = state

    logger.debug(f"ODE 积分完成: 起点={tuple(points[0])}, 步数={n_steps}")
    return OdeTrajectory(times=times, points=points)


def phase_portrait(starts: Sequence[Sequence], dt: float = 0.01, t_end: float = 30.0) -> List[OdeTrajectory]:
    """对多个起点分别积分，构成相图"""
    trajectories = []
    for start in starts:
        trajectories.append(integrate_ode(start, dt, t_end))
    logger.info(f"相图积分完成: {len(trajectories)} 条轨迹")
    return trajectories


def portrait_to_frame(trajectories: Sequence[OdeTrajectory]) -> pd.DataFrame:
    """多条轨迹合并为一张表；多于一条时加 trajectory 列"""
    if len(trajectories) == 1:
        return trajectories[0].to_frame()
    frames = []
    for idx, traj in enumerate(trajectories):
        df = traj.to_frame()
        df.insert(0, 'trajectory', idx)
        frames.append(df)
    return pd.concat(frames, ignore_index=True)
