"""
理论预测模块

行波分析给出的闭式波速估计:
- simple:       ±2√ε₁（Fisher 最小波速）
- general(θ):   γ sin²θ ± 2√(ε₁cos²θ + ε₂sin²θ)
- small_param:  γ/2 ± √2·√(ε₁+ε₂)（sin²θ 取平均值 1/2）
- large_param:  -2√ε₁, γ + 2√ε₂（传播范围最大化，γ<0 时镜像）

以上均先在约化坐标系 (随 u 的对流移动) 中计算，再平移到参数所在坐标系。
另含行波 ODE 相平面验证、绝对/对流不稳定性判定及流中心坐标系下的波速。
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple
import logging
import math

import numpy as np
from scipy import integrate

from errors import ConfigError, ProfileDivergedError
from pde_solver import FRAMES, SystemParams

logger = logging.getLogger(__name__)

REGIMES = ('simple', 'small_param', 'large_param', 'general')
REGIME_THRESHOLD = 2.0
DEFAULT_ZERO_TOLERANCE = 1e-3


@dataclass(frozen=True)
class Prediction:
    """左右波速预测"""
    left_speed: float
    right_speed: float
    regime: str
    frame: str
    theta: Optional[float] = None

    def in_frame(self, params: SystemParams, frame: str) -> 'Prediction':
        """换算到另一个坐标系: 先回到原始坐标系，再减去目标坐标系的漂移"""
        if frame not in FRAMES:
            raise ConfigError(f"不支持的坐标系: {frame}")
        shift = params.drift(self.frame) - params.drift(frame)
        return Prediction(
            left_speed=self.left_speed + shift,
            right_speed=self.right_speed + shift,
            regime=self.regime,
            frame=frame,
            theta=self.theta,
        )

    def speed(self, side: str) -> float:
        return self.left_speed if side == 'left' else self.right_speed

    def to_dict(self) -> Dict[str, Any]:
        data = {
            'left_speed': self.left_speed,
            'right_speed': self.right_speed,
            'regime': self.regime,
            'frame': self.frame,
        }
        if self.theta is not None:
            data['theta'] = self.theta
        return data


@dataclass(frozen=True, eq=False)
class WaveProfile:
    """行波剖面 R(z)，z = y - c t"""
    z: np.ndarray
    R: np.ndarray
    dR: np.ndarray
    c: float
    stays_positive: bool
    zero_crossing: Optional[float] = None


@dataclass
class ConvectiveReport:
    """对流不稳定性条件的逐条评估"""
    regime: str
    frame: str
    conditions: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    verdict: str = 'absolute'

    def to_dict(self) -> Dict[str, Any]:
        return {
            'regime': self.regime,
            'frame': self.frame,
            'conditions': self.conditions,
            'verdict': self.verdict,
        }


def _reduced(left: float, right: float, regime: str, params: SystemParams,
             theta: Optional[float] = None) -> Prediction:
    """约化坐标系下的结果平移到参数所在坐标系"""
    base = Prediction(left_speed=left, right_speed=right, regime=regime, frame='reduced', theta=theta)
    return base.in_frame(params, params.frame)


def to_scaled_speed(c: float, params: SystemParams) -> float:
    """c̄ = c / √ε₁"""
    return c / math.sqrt(params.eps1)


def from_scaled_speed(c_bar: float, params: SystemParams) -> float:
    """c = c̄ · √ε₁"""
    return c_bar * math.sqrt(params.eps1)


# ---------------------------------------------------------------------------
# 行波剖面
# ---------------------------------------------------------------------------

def saddle_eigenvalues(c: float) -> Tuple[float, float]:
    """R=1 处线性化 η'' + cη' - 2η = 0 的特征值 (不稳定, 稳定)"""
    root = math.sqrt(c * c + 8.0)
    return (-c + root) / 2.0, (-c - root) / 2.0


def travelling_wave_profile(c: float, z_max: float = 100.0, perturbation: float = 1e-6,
                            absorb_radius: float = 1e-9) -> WaveProfile:
    """
    积分行波方程 R'' + cR' + R(1-R²) = 0

    从鞍点 R=1 沿不稳定特征方向出发，朝原点积分；记录 R 是否始终为正。

    Args:
        c: 波速（不能为零）
        z_max: 积分长度
        perturbation: 离开鞍点的初始扰动大小
        absorb_radius: 相平面上到原点距离小于此值即视为到达原点

    Returns:
        WaveProfile
    """
    if c == 0 or not math.isfinite(c):
        raise ConfigError(f"波速不能为零: c={c}")
    if not z_max > 0:
        raise ConfigError(f"z_max 必须为正: {z_max}")

    lam, _ = saddle_eigenvalues(c)

    def ode(z, y):
        R, dR = y
        return [dR, -c * dR - R * (1.0 - R * R)]

    def crossing(z, y):
        return y[0]
    crossing.terminal = True
    crossing.direction = -1

    def absorbed(z, y):
        return math.hypot(y[0], y[1]) - absorb_radius
    absorbed.terminal = True
    absorbed.direction = -1

    def blowup(z, y):
        return abs(y[0]) - 10.0
    blowup.terminal = True

    y0 = [1.0 - perturbation, -perturbation * lam]
    sol = integrate.solve_ivp(
        ode, (0.0, z_max), y0,
        method='DOP853', rtol=1e-10, atol=1e-14, max_step=0.5,
        events=[crossing, absorbed, blowup],
    )

    if sol.status == -1 or len(sol.t_events[2]) > 0 or not np.all(np.isfinite(sol.y)):
        raise ProfileDivergedError(
            f"行波剖面积分发散: c={c}, {sol.message}",
            payload={'c': c}
        )

    crossed = len(sol.t_events[0]) > 0
    zero_at = float(sol.t_events[0][0]) if crossed else None
    R = sol.y[0]
    stays_positive = (not crossed) and bool(np.all(R > 0))
    logger.debug(f"行波剖面: c={c}, 终点 z={sol.t[-1]:.3g}, R>0: {stays_positive}")
    return WaveProfile(z=sol.t, R=R, dR=sol.y[1], c=c,
                       stays_positive=stays_positive, zero_crossing=zero_at)


# ---------------------------------------------------------------------------
# 波速估计
# ---------------------------------------------------------------------------

def simple_speed(params: SystemParams) -> Prediction:
    """Fisher 最小波速 ±2√ε₁"""
    c = 2.0 * math.sqrt(params.eps1)
    return _reduced(-c, c, 'simple', params)


def general_speed(theta: float, params: SystemParams) -> Prediction:
    """固定起始角 θ 下的两支波速"""
    s2 = math.sin(theta) ** 2
    c2 = math.cos(theta) ** 2
    drift = params.gamma * s2
    spread = 2.0 * math.sqrt(params.eps1 * c2 + params.eps2 * s2)
    return _reduced(drift - spread, drift + spread, 'general', params, theta=theta)


def small_param_speed(params: SystemParams) -> Prediction:
    """小参数估计 γ/2 ± √(2(ε₁+ε₂))"""
    spread = math.sqrt(2.0 * (params.eps1 + params.eps2))
    centre = 0.5 * params.gamma
    return _reduced(centre - spread, centre + spread, 'small_param', params)


def large_param_speed(params: SystemParams) -> Prediction:
    """
    大参数估计（传播范围最大化）

    γ ≥ 0: (-2√ε₁, γ + 2√ε₂)；γ < 0 时两组分角色互换: (γ - 2√ε₂, 2√ε₁)
    """
    s1 = 2.0 * math.sqrt(params.eps1)
    s2 = 2.0 * math.sqrt(params.eps2)
    gamma = params.gamma
    if gamma >= 0:
        return _reduced(-s1, gamma + s2, 'large_param', params)
    return _reduced(gamma - s2, s1, 'large_param', params)


def regime(params: SystemParams) -> str:
    """|γ̄| > 2 为大参数区，边界归入小参数区"""
    return 'large_param' if abs(params.gamma_bar) > REGIME_THRESHOLD else 'small_param'


def regime_speed(params: SystemParams) -> Prediction:
    """按 regime 选用的估计"""
    if regime(params) == 'large_param':
        return large_param_speed(params)
    return small_param_speed(params)


def speed_ranges(params: SystemParams) -> Dict[str, Any]:
    """
    起始角固定时波速的可取范围

    右: [2√ε₁, γ + 2√ε₂]，左: [-2√ε₁, γ - 2√ε₂]（约化坐标系，再平移到参数坐标系）
    """
    s1 = 2.0 * math.sqrt(params.eps1)
    s2 = 2.0 * math.sqrt(params.eps2)
    shift = params.drift('reduced') - params.drift(params.frame)
    right = (s1 + shift, params.gamma + s2 + shift)
    left = (-s1 + shift, params.gamma - s2 + shift)
    return {
        'frame': params.frame,
        'right': list(right),
        'left': list(left),
        'ordered': right[1] > right[0],
    }


def classify_instability(left: float, right: float, tolerance: float = DEFAULT_ZERO_TOLERANCE) -> str:
    """
    左右波速异号为绝对不稳定，同号为对流不稳定

    任一速度的绝对值低于 tolerance 时无法判定，返回 'indeterminate'。
    """
    if abs(left) < tolerance or abs(right) < tolerance:
        return 'indeterminate'
    if math.copysign(1.0, left) != math.copysign(1.0, right):
        return 'absolute'
    return 'convective'


def _inequality(lhs: float, rhs: float, tol: float) -> Dict[str, Any]:
    margin = lhs - rhs
    scale = tol * max(1.0, abs(rhs))
    return {
        'lhs': lhs,
        'rhs': rhs,
        'holds': margin > scale,
        'borderline': abs(margin) <= scale,
    }


def convective_conditions(params: SystemParams, tol: float = 1e-12) -> ConvectiveReport:
    """
    逐条评估对流不稳定性条件

    - small_reduced:  γ² > 8(ε₁+ε₂)
    - small_original: (p+q)² > 8(ε₁+ε₂)
    - large_original: q > p > 2√ε₁ 或 p > q > 2√ε₂
    - large_reduced:  大参数区约化坐标系下左右波速恒异号，永不成立
    """
    bound = 8.0 * (params.eps1 + params.eps2)
    conditions = {
        'small_reduced': _inequality(params.gamma ** 2, bound, tol),
        'small_original': _inequality((params.p + params.q) ** 2, bound, tol),
    }

    s1 = 2.0 * math.sqrt(params.eps1)
    s2 = 2.0 * math.sqrt(params.eps2)
    margin = max(min(params.q - params.p, params.p - s1),
                 min(params.p - params.q, params.q - s2))
    conditions['large_original'] = {
        'margin': margin,
        'holds': margin > tol,
        'borderline': abs(margin) <= tol,
    }
    conditions['large_reduced'] = {'holds': False, 'borderline': False}

    current = regime(params)
    report = ConvectiveReport(regime=current, frame=params.frame, conditions=conditions)

    if params.frame == 'flow_centred':
        # 流中心坐标系下两支波速恒异号
        report.verdict = 'absolute'
        return report

    prefix = 'small' if current == 'small_param' else 'large'
    suffix = 'original' if params.frame == 'original' else 'reduced'
    applicable = conditions[f'{prefix}_{suffix}']
    if applicable['borderline']:
        report.verdict = 'borderline'
    elif applicable['holds']:
        report.verdict = 'convective'
    else:
        report.verdict = 'absolute'
    return report


def flow_centred_speeds(params: SystemParams) -> Prediction:
    """流中心坐标系 (随 (p+q)/2 移动) 下按 regime 选用的波速"""
    return regime_speed(params).in_frame(params, 'flow_centred')


def single_species_speeds(params: SystemParams) -> Dict[str, Any]:
    """
    单组分波速候选（流中心坐标系）

    u 方程对流为 +γ̂u_x，v 方程为 -γ̂v_x；每个组分各自给出 Fisher 波速，
    最大化原则取最外侧的左右候选，并记录驱动该侧的组分。
    """
    gh = params.gamma_hat
    s1 = 2.0 * math.sqrt(params.eps1)
    s2 = 2.0 * math.sqrt(params.eps2)
    candidates = {
        'u': {'left': -gh - s1, 'right': -gh + s1},
        'v': {'left': gh - s2, 'right': gh + s2},
    }
    right_species = max(candidates, key=lambda k: candidates[k]['right'])
    left_species = min(candidates, key=lambda k: candidates[k]['left'])
    return {
        'frame': 'flow_centred',
        'candidates': candidates,
        'left_speed': candidates[left_species]['left'],
        'right_speed': candidates[right_species]['right'],
        'left_species': left_species,
        'right_species': right_species,
    }


def estimate_intersection(params: SystemParams, side: str = 'right') -> float:
    """
    小、大参数估计相交处的 γ（固定 ε₁, ε₂）

    右: γ/2 + √(2(ε₁+ε₂)) = γ + 2√ε₂；左: γ/2 - √(2(ε₁+ε₂)) = -2√ε₁
    """
    root = math.sqrt(2.0 * (params.eps1 + params.eps2))
    if side == 'right':
        return 2.0 * (root - 2.0 * math.sqrt(params.eps2))
    if side == 'left':
        return 2.0 * (root - 2.0 * math.sqrt(params.eps1))
    raise ConfigError(f"side 只能是 left 或 right: {side}")


def averaging_discrepancy(params: SystemParams) -> Dict[str, float]:
    """
    general_speed 在 θ∈[0, π) 上的真实平均值与 sin²θ≈1/2 代入结果的差

    ε̄ = 0 时二者在积分误差内相等；ε̄ ≠ 0 时只记录差值。
    """
    def branch(theta, sign):
        s2 = math.sin(theta) ** 2
        c2 = 1.0 - s2
        return params.gamma * s2 + sign * 2.0 * math.sqrt(params.eps1 * c2 + params.eps2 * s2)

    left_avg = integrate.quad(branch, 0.0, math.pi, args=(-1.0,))[0] / math.pi
    right_avg = integrate.quad(branch, 0.0, math.pi, args=(1.0,))[0] / math.pi
    small = small_param_speed(params.with_frame('reduced'))
    return {
        'left_average': left_avg,
        'right_average': right_avg,
        'left_small_param': small.left_speed,
        'right_small_param': small.right_speed,
        'left_discrepancy': left_avg - small.left_speed,
        'right_discrepancy': right_avg - small.right_speed,
    }


def predict_all(params: SystemParams, tolerance: float = DEFAULT_ZERO_TOLERANCE) -> Dict[str, Any]:
    """
    汇总全部理论预测

    Returns:
        各估计、regime、按 regime 选用估计的不稳定性分类、对流条件、流中心坐标系波速
    """
    current = regime(params)
    selected = regime_speed(params)
    normalised, mirrored = params.normalised()
    return {
        'params': params.to_dict(),
        'regime': current,
        'simple': simple_speed(params).to_dict(),
        'small_param': small_param_speed(params).to_dict(),
        'large_param': large_param_speed(params).to_dict(),
        'selected': selected.to_dict(),
        'classification': classify_instability(selected.left_speed, selected.right_speed, tolerance),
        'convective_conditions': convective_conditions(params).to_dict(),
        'flow_centred': flow_centred_speeds(params).to_dict(),
        'single_species': single_species_speeds(params),
        'speed_ranges': speed_ranges(params),
        'intersection': {
            'left': estimate_intersection(params, 'left'),
            'right': estimate_intersection(params, 'right'),
        },
        'normalised': {'params': normalised.to_dict(), 'mirrored': mirrored},
    }
