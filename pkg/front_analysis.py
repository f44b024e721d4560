"""
波前分析模块

在极坐标快照上定位左右波前，最小二乘拟合波速，测量起始角和图案中心线漂移。
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple
import logging
import math

import numpy as np
from scipy import stats

from errors import ConfigError, InsufficientDataError, InvalidInsetError, NoFrontError
from pde_solver import SystemParams
from polar import PolarField

logger = logging.getLogger(__name__)

SIDES = ('left', 'right')
MIN_TRACE_POINTS = 4
MIN_FIT_POINTS = 3


@dataclass(frozen=True, eq=False)
class FrontTrace:
    """左右波前位置的时间序列"""
    times: np.ndarray
    left_pos: np.ndarray
    right_pos: np.ndarray
    threshold: float
    skipped_times: Tuple[float, ...] = ()

    def __post_init__(self):
        if not (len(self.times) == len(self.left_pos) == len(self.right_pos)):
            raise ValueError("FrontTrace 各数组长度不一致")

    def positions(self, side: str) -> np.ndarray:
        _check_side(side)
        return self.left_pos if side == 'left' else self.right_pos

    @property
    def centre(self) -> np.ndarray:
        return 0.5 * (self.left_pos + self.right_pos)

    @property
    def width(self) -> np.ndarray:
        return self.right_pos - self.left_pos


@dataclass(frozen=True)
class SpeedEstimate:
    """拟合得到的速度及其标准误差"""
    speed: float
    stderr: float
    window: Tuple[float, float]
    n_points: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'speed': self.speed,
            'stderr': self.stderr,
            'window': list(self.window),
            'n_points': self.n_points,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SpeedEstimate':
        return cls(
            speed=float(data['speed']),
            stderr=float(data['stderr']),
            window=tuple(data['window']),
            n_points=int(data.get('n_points', 0)),
        )


@dataclass
class SpeedReport:
    """一次运行的完整测量结果"""
    left: SpeedEstimate
    right: SpeedEstimate
    left_onset_angle: float
    right_onset_angle: float
    centreline_speed: SpeedEstimate
    params: SystemParams
    centreline_angle: Optional[float] = None
    threshold: float = 0.5
    predictions: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'params': self.params.to_dict(),
            'threshold': self.threshold,
            'left': self.left.to_dict(),
            'right': self.right.to_dict(),
            'left_onset_angle': self.left_onset_angle,
            'right_onset_angle': self.right_onset_angle,
            'centreline_speed': self.centreline_speed.to_dict(),
            'centreline_angle': self.centreline_angle,
            'predictions': self.predictions,
        }


def _check_side(side: str) -> None:
    if side not in SIDES:
        raise ConfigError(f"side 只能是 left 或 right: {side}")


def mod_pi(angle: float) -> float:
    """角度折叠到 [0, π)"""
    a = float(np.mod(angle, math.pi))
    return 0.0 if a >= math.pi else a


def angle_distance_mod_pi(a: float, b: float) -> float:
    """模 π 意义下的角距离，取值 [0, π/2]"""
    d = mod_pi(a - b)
    return min(d, math.pi - d)


def detect_fronts(pf: PolarField, threshold: float = 0.5) -> Tuple[float, float]:
    """
    定位左右波前

    取 r = threshold 的最外侧穿越点，在相邻节点间线性插值；
    内部的小幅波纹即使再次穿越阈值也不影响结果。

    Args:
        pf: 极坐标场
        threshold: r 的阈值，(0, 1)

    Returns:
        (左波前位置, 右波前位置)
    """
    if not 0 < threshold < 1:
        raise ConfigError(f"阈值必须在 (0, 1) 内: {threshold}")
    r = pf.r
    above = np.flatnonzero(r > threshold)
    if above.size == 0:
        raise NoFrontError(
            f"t={pf.t:.4g} 时没有节点超过阈值 {threshold}，图案尚未形成",
            payload={'t': pf.t, 'threshold': threshold}
        )

    x = pf.x
    h = pf.grid.h

    i = int(above[-1])
    if i == len(r) - 1:
        right = float(x[i])
    else:
        right = float(x[i] + (r[i] - threshold) / (r[i] - r[i + 1]) * h)

    j = int(above[0])
    if j == 0:
        left = float(x[j])
    else:
        left = float(x[j] - (r[j] - threshold) / (r[j] - r[j - 1]) * h)

    return left, right


def build_trace(snapshots: Sequence[PolarField], threshold: float = 0.5) -> FrontTrace:
    """
    逐快照定位波前，构成时间序列

    尚未形成波前的快照被跳过并记录。
    """
    times, lefts, rights, skipped = [], [], [], []
    for pf in snapshots:
        try:
            left, right = detect_fronts(pf, threshold)
        except NoFrontError:
            skipped.append(float(pf.t))
            continue
        times.append(float(pf.t))
        lefts.append(left)
        rights.append(right)

    if len(times) < MIN_TRACE_POINTS:
        raise InsufficientDataError(
            f"可检测到波前的快照只有 {len(times)} 个（至少需要 {MIN_TRACE_POINTS} 个），请增大 t_end",
            payload={'detected': len(times), 'skipped': len(skipped)}
        )
    if skipped:
        logger.debug(f"跳过 {len(skipped)} 个未形成波前的快照")

    return FrontTrace(
        times=np.asarray(times),
        left_pos=np.asarray(lefts),
        right_pos=np.asarray(rights),
        threshold=threshold,
        skipped_times=tuple(skipped),
    )


def fit_trailing(times: np.ndarray, values: np.ndarray, window_fraction: float = 0.5) -> SpeedEstimate:
    """对末尾 window_fraction 时间段做最小二乘直线拟合"""
    if not 0 < window_fraction <= 1:
        raise ConfigError(f"拟合窗口比例必须在 (0, 1] 内: {window_fraction}")
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.size == 0:
        raise InsufficientDataError("没有可拟合的数据点")

    t_last = times[-1]
    t_start = t_last - window_fraction * (t_last - times[0])
    mask = times >= t_start - 1e-12
    if mask.sum() < MIN_FIT_POINTS:
        raise InsufficientDataError(
            f"拟合窗口内只有 {int(mask.sum())} 个点（至少需要 {MIN_FIT_POINTS} 个）",
            payload={'window': [float(t_start), float(t_last)]}
        )

    fit = stats.linregress(times[mask], values[mask])
    stderr = float(fit.stderr) if np.isfinite(fit.stderr) else 0.0
    return SpeedEstimate(
        speed=float(fit.slope),
        stderr=abs(stderr),
        window=(float(times[mask][0]), float(t_last)),
        n_points=int(mask.sum()),
    )


def estimate_speed(trace: FrontTrace, side: str, window_fraction: float = 0.5) -> SpeedEstimate:
    """拟合某一侧波前速度（丢弃初始暂态，只用末尾窗口）"""
    return fit_trailing(trace.times, trace.positions(side), window_fraction)


def centreline_speed(trace: FrontTrace, window_fraction: float = 0.5) -> SpeedEstimate:
    """拟合左右波前中点的漂移速度"""
    return fit_trailing(trace.times, trace.centre, window_fraction)


def onset_angle(pf: PolarField, front: float, side: str, inset: float = 2.0) -> float:
    """
    波前内侧 inset 处的相位 (mod π)

    Args:
        pf: 极坐标场
        front: 波前位置
        side: left / right
        inset: 向图案内部偏移的距离

    Returns:
        θ mod π，取值 [0, π)
    """
    _check_side(side)
    if not inset > 0:
        raise InvalidInsetError(f"inset 必须为正: {inset}")
    position = front - inset if side == 'right' else front + inset
    if not pf.grid.contains(position):
        raise InvalidInsetError(
            f"测量点 {position:.4g} 在网格之外",
            payload={'position': position, 'side': side}
        )
    idx = pf.grid.nearest_index(position)
    if not pf.theta_valid[idx]:
        raise InvalidInsetError(
            f"测量点 {position:.4g} 不在图案内（r={pf.r[idx]:.3g}）",
            payload={'position': position, 'side': side}
        )
    return mod_pi(pf.theta[idx])


def centreline_angle(pf: PolarField, left: float, right: float) -> Optional[float]:
    """图案中心处的相位 (mod π)；中心节点无效时返回 None"""
    idx = pf.grid.nearest_index(0.5 * (left + right))
    if not pf.theta_valid[idx]:
        return None
    return mod_pi(pf.theta[idx])


def threshold_sensitivity(snapshots: Sequence[PolarField], thresholds: Sequence[float] = (0.3, 0.7),
                          window_fraction: float = 0.5) -> Dict[str, Any]:
    """
    不同阈值下的波速比较

    Returns:
        每侧的速度列表与相对离散度 (max-min)/|mean|
    """
    speeds: Dict[str, List[float]] = {'left': [], 'right': []}
    for threshold in thresholds:
        trace = build_trace(snapshots, threshold)
        for side in SIDES:
            speeds[side].append(estimate_speed(trace, side, window_fraction).speed)

    result: Dict[str, Any] = {'thresholds': list(thresholds)}
    for side in SIDES:
        values = np.asarray(speeds[side])
        mean = float(np.mean(values))
        spread = float(np.ptp(values) / abs(mean)) if mean != 0 else float('inf')
        result[side] = {'speeds': values.tolist(), 'relative_spread': spread}
    return result
