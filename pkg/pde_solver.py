"""
反应-扩散-对流方程求解模块

线方法 (method of lines) 求解:
    u_t = ε₁ u_xx - a_u u_x + f(u, v)
    v_t = ε₂ v_xx - a_v v_x + g(u, v)

对流系数 (a_u, a_v) 取决于坐标系:
- original:     (p, q)
- reduced:      (0, γ),    γ = q - p，随 u 的对流移动
- flow_centred: (-γ̂, γ̂),  γ̂ = (q - p)/2，随平均流速 (p+q)/2 移动

空间二阶中心差分，零导数边界（镜像虚节点），时间方向显式四阶 Runge-Kutta。
"""

from dataclasses import dataclass, replace
from datetime import datetime
from typing import List, Optional, Tuple
import logging
import math

import numpy as np

from errors import (
    BoundaryContaminationError,
    ConfigError,
    InvalidDisturbanceError,
    SolverDivergedError,
)
from kinetics import reaction_terms

logger = logging.getLogger(__name__)

FRAMES = ('original', 'reduced', 'flow_centred')
SPECIES = ('u_only', 'v_only', 'both')


@dataclass(frozen=True)
class SystemParams:
    """扩散、对流系数及所在坐标系"""
    eps1: float
    eps2: float
    p: float = 0.0
    q: float = 0.0
    frame: str = 'reduced'

    def __post_init__(self):
        if not (self.eps1 > 0 and self.eps2 > 0):
            raise ConfigError(f"扩散系数必须为正: eps1={self.eps1}, eps2={self.eps2}")
        if not all(math.isfinite(x) for x in (self.eps1, self.eps2, self.p, self.q)):
            raise ConfigError("参数必须为有限值")
        if self.frame not in FRAMES:
            raise ConfigError(f"不支持的坐标系: {self.frame}，支持: {', '.join(FRAMES)}")

    @classmethod
    def reduced(cls, gamma: float, eps1: float = 1.0, eps2: float = 1.0) -> 'SystemParams':
        """由 γ 直接构造约化坐标系参数 (p=0, q=γ)"""
        return cls(eps1=eps1, eps2=eps2, p=0.0, q=gamma, frame='reduced')

    @property
    def gamma(self) -> float:
        return self.q - self.p

    @property
    def gamma_bar(self) -> float:
        return self.gamma / math.sqrt(self.eps1)

    @property
    def eps_bar(self) -> float:
        return self.eps2 / self.eps1 - 1.0

    @property
    def gamma_hat(self) -> float:
        return 0.5 * (self.q - self.p)

    def convection(self) -> Tuple[float, float]:
        """当前坐标系下 u、v 的对流速度"""
        if self.frame == 'original':
            return self.p, self.q
        if self.frame == 'reduced':
            return 0.0, self.gamma
        return -self.gamma_hat, self.gamma_hat

    def drift(self, frame: Optional[str] = None) -> float:
        """坐标系原点相对原始坐标系的移动速度"""
        frame = frame or self.frame
        if frame == 'original':
            return 0.0
        if frame == 'reduced':
            return self.p
        if frame == 'flow_centred':
            return 0.5 * (self.p + self.q)
        raise ConfigError(f"不支持的坐标系: {frame}")

    def with_frame(self, frame: str) -> 'SystemParams':
        return replace(self, frame=frame)

    def mirrored(self) -> 'SystemParams':
        """空间反射 ξ → -ξ 对应 (p, q) → (-p, -q)"""
        return replace(self, p=-self.p, q=-self.q)

    def normalised(self) -> Tuple['SystemParams', bool]:
        """
        规范化方向: p < 0 时做 (p, q, ξ) → (-p, -q, -ξ)

        Returns:
            (规范化后的参数, 是否做了空间反射)
        """
        if self.p < 0:
            return self.mirrored(), True
        return self, False

    def to_dict(self) -> dict:
        return {
            'frame': self.frame,
            'eps1': self.eps1,
            'eps2': self.eps2,
            'p': self.p,
            'q': self.q,
            'gamma': self.gamma,
            'gamma_bar': self.gamma_bar,
            'eps_bar': self.eps_bar,
            'gamma_hat': self.gamma_hat,
        }


@dataclass(frozen=True)
class Grid1D:
    """均匀一维网格"""
    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ConfigError(f"网格范围不合法: [{self.x_min}, {self.x_max}]")
        if self.n < 3:
            raise ConfigError(f"网格节点数至少为 3: n={self.n}")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n)

    def nearest_index(self, position: float) -> int:
        idx = int(round((position - self.x_min) / self.h))
        return min(max(idx, 0), self.n - 1)

    def contains(self, position: float) -> bool:
        return self.x_min <= position <= self.x_max


@dataclass(frozen=True, eq=False)
class FieldState:
    """某一时刻两组分的场"""
    grid: Grid1D
    t: float
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        if len(self.u) != self.grid.n or len(self.v) != self.grid.n:
            raise ValueError(f"场长度与网格不一致: {len(self.u)}, {len(self.v)} vs {self.grid.n}")

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.u)) and np.all(np.isfinite(self.v)))


@dataclass(frozen=True)
class DisturbanceSpec:
    """初始点扰动: 高斯包"""
    center: float = 0.0
    amplitude: float = 0.01
    width: float = 1.0
    species: str = 'both'

    def __post_init__(self):
        if self.amplitude == 0 or not math.isfinite(self.amplitude):
            raise InvalidDisturbanceError(f"扰动振幅不能为零: amplitude={self.amplitude}")
        if not self.width > 0:
            raise InvalidDisturbanceError(f"扰动宽度必须为正: width={self.width}")
        if self.species not in SPECIES:
            raise InvalidDisturbanceError(f"不支持的扰动组分: {self.species}，支持: {', '.join(SPECIES)}")


def build_initial_state(grid: Grid1D, d: Optional[DisturbanceSpec]) -> FieldState:
    """
    构造初始场: 稳态 (0, 0) 加一个高斯扰动

    高斯中心对齐到最近的网格节点，使该节点上的值恰为振幅。
    d 为 None 时返回全零场。
    """
    x = grid.x
    u = np.zeros(grid.n)
    v = np.zeros(grid.n)
    if d is None:
        return FieldState(grid=grid, t=0.0, u=u, v=v)

    if not grid.contains(d.center):
        raise InvalidDisturbanceError(
            f"扰动中心 {d.center} 不在网格 [{grid.x_min}, {grid.x_max}] 内",
            payload={'center': d.center}
        )

    x0 = x[grid.nearest_index(d.center)]
    bump = d.amplitude * np.exp(-0.5 * ((x - x0) / d.width) ** 2)
    if d.species in ('u_only', 'both'):
        u = bump.copy()
    if d.species in ('v_only', 'both'):
        v = bump.copy()
    return FieldState(grid=grid, t=0.0, u=u, v=v)


class MethodOfLinesSolver:
    """线方法求解器（单次运行单线程，快照不可变）"""

    DIFFUSIVE_FACTOR = 0.5
    REACTION_DT = 0.1
    SAFETY = 0.4

    def __init__(self, params: SystemParams, grid: Grid1D,
                 contamination_threshold: Optional[float] = 1e-3,
                 contamination_nodes: int = 5):
        """
        初始化求解器

        Args:
            params: 系统参数
            grid: 空间网格
            contamination_threshold: 边界污染阈值，None 表示不检查
            contamination_nodes: 边界检查的节点宽度
        """
        self.params = params
        self.grid = grid
        self.contamination_threshold = contamination_threshold
        self.contamination_nodes = contamination_nodes

        self._h = grid.h
        self._a_u, self._a_v = params.convection()

    def stable_dt(self) -> float:
        """扩散、对流、反应三个稳定性上界取最小，再乘安全系数"""
        h = self._h
        p = self.params
        diffusive = h * h / (2.0 * max(p.eps1, p.eps2))
        advective = h / max(abs(p.p), abs(p.q), abs(p.gamma), 1e-12)
        return self.SAFETY * min(diffusive, advective, self.REACTION_DT)

    def _spatial(self, w: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        # 镜像虚节点: w[-1] = w[1], w[n] = w[n-2]
        padded = np.pad(w, 1, mode='reflect')
        lap = (padded[2:] - 2.0 * w + padded[:-2]) / (self._h * self._h)
        grad = (padded[2:] - padded[:-2]) / (2.0 * self._h)
        return lap, grad

    def rhs_arrays(self, u: np.ndarray, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        lap_u, grad_u = self._spatial(u)
        lap_v, grad_v = self._spatial(v)
        f, g = reaction_terms((u, v))
        du = self.params.eps1 * lap_u - self._a_u * grad_u + f
        dv = self.params.eps2 * lap_v - self._a_v * grad_v + g
        return du, dv

    def rhs(self, state: FieldState) -> Tuple[np.ndarray, np.ndarray]:
        return self.rhs_arrays(state.u, state.v)

    def step(self, state: FieldState, dt: float) -> FieldState:
        """一步 RK4，返回新的状态，不修改输入"""
        u, v = state.u, state.v
        k1u, k1v = self.rhs_arrays(u, v)
        k2u, k2v = self.rhs_arrays(u + 0.5 * dt * k1u, v + 0.5 * dt * k1v)
        k3u, k3v = self.rhs_arrays(u + 0.5 * dt * k2u, v + 0.5 * dt * k2v)
        k4u, k4v = self.rhs_arrays(u + dt * k3u, v + dt * k3v)
        new_u = u + (dt / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        new_v = v + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)

        t_new = state.t + dt
        bad = ~(np.isfinite(new_u) & np.isfinite(new_v))
        if bad.any():
            node = int(np.argmax(bad))
            raise SolverDivergedError(
                f"求解在 t={t_new:.6g} 节点 {node} 发散",
                payload={'t': t_new, 'node': node, 'x': float(self.grid.x[node])}
            )
        return FieldState(grid=state.grid, t=t_new, u=new_u, v=new_v)

    def check_boundary(self, state: FieldState) -> None:
        """边界附近出现图案即判定为污染"""
        if self.contamination_threshold is None:
            return
        k = self.contamination_nodes
        edges = np.concatenate([state.u[:k], state.u[-k:], state.v[:k], state.v[-k:]])
        peak = float(np.max(np.abs(edges)))
        if peak > self.contamination_threshold:
            raise BoundaryContaminationError(
                f"t={state.t:.6g} 时边界附近幅值 {peak:.3g} 超过阈值 {self.contamination_threshold}，"
                f"请增大计算域或缩短 t_end",
                payload={'t': state.t, 'peak': peak}
            )

    def advance(self, state: FieldState, duration: float) -> FieldState:
        """推进 duration 时长，步长取不超过稳定上界的等分"""
        if duration <= 0:
            return state
        dt_max = self.stable_dt()
        n_steps = max(1, int(math.ceil(duration / dt_max - 1e-9)))
        dt = duration / n_steps
        t_target = state.t + duration
        for _ in range(n_steps):
            state = self.step(state, dt)
        # 消除累积舍入，保证快照时刻精确
        return FieldState(grid=state.grid, t=t_target, u=state.u, v=state.v)

    def simulate(self, d: Optional[DisturbanceSpec], t_end: float,
                 snapshot_every: float) -> List[FieldState]:
        """
        从扰动初值推进到 t_end

        Args:
            d: 初始扰动，None 表示全零初值
            t_end: 终止时间
            snapshot_every: 快照间隔

        Returns:
            快照列表（含 t=0 与 t=t_end）
        """
        if not t_end > 0:
            raise ConfigError(f"t_end 必须为正: {t_end}")
        if not snapshot_every > 0:
            raise ConfigError(f"snapshot_every 必须为正: {snapshot_every}")

        start_time = datetime.now()
        logger.info(
            f"开始模拟: frame={self.params.frame}, eps1={self.params.eps1}, eps2={self.params.eps2}, "
            f"gamma={self.params.gamma}, n={self.grid.n}, t_end={t_end}, dt≤{self.stable_dt():.3g}"
        )

        state = build_initial_state(self.grid, d)
        snapshots = [state]

        n_snap = int(math.floor(t_end / snapshot_every + 1e-9))
        targets = [k * snapshot_every for k in range(1, n_snap + 1)]
        if not targets or t_end - targets[-1] > 1e-9 * max(1.0, t_end):
            targets.append(t_end)

        for target in targets:
            state = self.advance(state, target - state.t)
            self.check_boundary(state)
            snapshots.append(state)
            logger.debug(f"  快照 t={state.t:.4g}, max|u|={np.max(np.abs(state.u)):.4g}")

        elapsed = (datetime.now() - start_time).total_seconds()
        logger.info(f"模拟完成: {len(snapshots)} 个快照，耗时 {elapsed:.2f}秒")
        return snapshots


def rhs(state: FieldState, params: SystemParams) -> Tuple[np.ndarray, np.ndarray]:
    """快捷函数: 计算时间导数"""
    return MethodOfLinesSolver(params, state.grid).rhs(state)


def step(state: FieldState, params: SystemParams, dt: float) -> FieldState:
    """快捷函数: 推进一步"""
    return MethodOfLinesSolver(params, state.grid).step(state, dt)


def stable_dt(grid: Grid1D, params: SystemParams) -> float:
    """快捷函数: 稳定时间步长"""
    return MethodOfLinesSolver(params, grid).stable_dt()


def simulate(params: SystemParams, grid: Grid1D, d: Optional[DisturbanceSpec],
             t_end: float, snapshot_every: float,
             contamination_threshold: Optional[float] = 1e-3,
             contamination_nodes: int = 5) -> List[FieldState]:
    """快捷函数: 完整模拟"""
    solver = MethodOfLinesSolver(params, grid, contamination_threshold, contamination_nodes)
    return solver.simulate(d, t_end, snapshot_every)
