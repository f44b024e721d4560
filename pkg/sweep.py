#!/usr/bin/env python3
"""参数扫描模块 - 在 (γ, ε) 网格上比较实测波速与理论估计"""

import math
import os
import sys
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from errors import BoundaryContaminationError, ConfigError, LabError
from front_analysis import SpeedEstimate
from main import FrontSpeedAnalyzer
from pde_solver import SystemParams
from run_config import RunConfig
from services.cache import RunCache
from theory import (
    classify_instability,
    estimate_intersection,
    flow_centred_speeds,
    large_param_speed,
    regime,
    simple_speed,
    small_param_speed,
)

logger = logging.getLogger(__name__)

# 默认扫描网格
DEFAULT_GAMMAS = tuple(np.round(np.arange(0.0, 6.0 + 1e-9, 0.5), 10))
DEFAULT_EPS = (0.25, 0.5, 1.0, 2.0, 4.0)

CSV_COLUMNS = [
    'gamma', 'eps',
    'measured_left', 'measured_left_stderr',
    'measured_right', 'measured_right_stderr',
    'pred_small_left', 'pred_small_right',
    'pred_large_left', 'pred_large_right',
    'regime', 'classification', 'boundary_contaminated', 'error',
]


@dataclass(frozen=True)
class SweepSpec:
    """扫描规格: ε₁ 固定，ε = ε₂/ε₁"""
    gamma_values: Tuple[float, ...]
    eps_ratio_values: Tuple[float, ...]
    template: RunConfig
    eps1: float = 1.0

    def __post_init__(self):
        if len(self.gamma_values) == 0:
            raise ConfigError("gamma 取值列表不能为空")
        if len(self.eps_ratio_values) == 0:
            raise ConfigError("eps 取值列表不能为空")
        if any(not e > 0 for e in self.eps_ratio_values):
            raise ConfigError(f"eps 取值必须为正: {list(self.eps_ratio_values)}")
        if not self.eps1 > 0:
            raise ConfigError(f"eps1 必须为正: {self.eps1}")

    def pairs(self) -> List[Tuple[float, float]]:
        return [(float(g), float(e)) for e in self.eps_ratio_values for g in self.gamma_values]


@dataclass
class SweepRow:
    """一组 (γ, ε) 的测量与预测"""
    gamma: float
    eps: float
    measured_left: Optional[SpeedEstimate] = None
    measured_right: Optional[SpeedEstimate] = None
    predicted: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    regime: str = ''
    classification: Optional[str] = None
    boundary_contaminated: bool = False
    error: Optional[str] = None
    t_end: Optional[float] = None

    @property
    def ok(self) -> bool:
        return self.error is None and self.measured_left is not None and self.measured_right is not None

    def measured(self, side: str) -> Optional[float]:
        est = self.measured_left if side == 'left' else self.measured_right
        return est.speed if est is not None else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'gamma': self.gamma,
            'eps': self.eps,
            'measured_left': self.measured_left.to_dict() if self.measured_left else None,
            'measured_right': self.measured_right.to_dict() if self.measured_right else None,
            'predicted': self.predicted,
            'regime': self.regime,
            'classification': self.classification,
            'boundary_contaminated': self.boundary_contaminated,
            'error': self.error,
            't_end': self.t_end,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SweepRow':
        left = data.get('measured_left')
        right = data.get('measured_right')
        return cls(
            gamma=float(data['gamma']),
            eps=float(data['eps']),
            measured_left=SpeedEstimate.from_dict(left) if left else None,
            measured_right=SpeedEstimate.from_dict(right) if right else None,
            predicted=data.get('predicted', {}),
            regime=data.get('regime', ''),
            classification=data.get('classification'),
            boundary_contaminated=bool(data.get('boundary_contaminated', False)),
            error=data.get('error'),
            t_end=data.get('t_end'),
        )

    def to_record(self) -> Dict[str, Any]:
        """CSV 一行"""
        small = self.predicted.get('small_param', {})
        large = self.predicted.get('large_param', {})
        return {
            'gamma': self.gamma,
            'eps': self.eps,
            'measured_left': self.measured_left.speed if self.measured_left else None,
            'measured_left_stderr': self.measured_left.stderr if self.measured_left else None,
            'measured_right': self.measured_right.speed if self.measured_right else None,
            'measured_right_stderr': self.measured_right.stderr if self.measured_right else None,
            'pred_small_left': small.get('left_speed'),
            'pred_small_right': small.get('right_speed'),
            'pred_large_left': large.get('left_speed'),
            'pred_large_right': large.get('right_speed'),
            'regime': self.regime,
            'classification': self.classification,
            'boundary_contaminated': self.boundary_contaminated,
            'error': self.error,
        }


def row_params(gamma: float, eps: float, eps1: float = 1.0) -> SystemParams:
    """约化坐标系参数: ε₂ = ε·ε₁"""
    return SystemParams.reduced(gamma, eps1=eps1, eps2=eps * eps1)


def predictions_for(params: SystemParams) -> Dict[str, Dict[str, Any]]:
    return {
        'simple': simple_speed(params).to_dict(),
        'small_param': small_param_speed(params).to_dict(),
        'large_param': large_param_speed(params).to_dict(),
        'flow_centred': flow_centred_speeds(params).to_dict(),
    }


def run_row(gamma: float, eps: float, template: RunConfig, eps1: float = 1.0) -> SweepRow:
    """
    运行单组参数

    边界污染时 t_end 减半重试一次；其余失败（包括未预期的异常）记录在行内，不中断扫描。
    """
    params = row_params(gamma, eps, eps1)
    row = SweepRow(gamma=gamma, eps=eps, predicted=predictions_for(params), regime=regime(params))
    analyzer = FrontSpeedAnalyzer(template.analysis)

    t_end = template.t_end
    for attempt in range(2):
        row.t_end = t_end
        try:
            snapshots = analyzer.simulate(params, template.grid, template.disturbance,
                                          t_end, template.snapshot_every)
            report = analyzer.analyze(snapshots, params)
        except BoundaryContaminationError as e:
            row.boundary_contaminated = True
            row.error = e.message
            if attempt == 0:
                t_end = 0.5 * t_end
                logger.warning(f"γ={gamma}, ε={eps} 边界污染，t_end 减半为 {t_end} 后重试")
                continue
            break
        except LabError as e:
            row.error = e.message
            break
        except Exception as e:
            logger.exception(f"γ={gamma}, ε={eps} 出现未预期错误")
            row.error = f"{type(e).__name__}: {e}"
            break
        else:
            row.boundary_contaminated = False
            row.error = None
            row.measured_left = report.left
            row.measured_right = report.right
            row.classification = classify_instability(
                report.left.speed, report.right.speed, template.analysis.zero_tolerance
            )
            break

    if row.error:
        logger.error(f"✗ γ={gamma}, ε={eps} 失败: {row.error}")
    else:
        logger.info(f"✓ γ={gamma}, ε={eps}: 左 {row.measured('left'):.4f}，右 {row.measured('right'):.4f}")
    return row


def _cache_params(gamma: float, eps: float, spec: SweepSpec) -> Dict[str, Any]:
    return {'gamma': gamma, 'eps': eps, 'eps1': spec.eps1, 'template': spec.template.to_dict()}


def run_sweep(spec: SweepSpec, jobs: int = 1, cache: Optional[RunCache] = None) -> List[SweepRow]:
    """
    执行参数扫描

    Args:
        spec: 扫描规格
        jobs: 并行进程数，1 表示串行
        cache: 磁盘行结果缓存，None 表示不缓存；只缓存成功的行

    Returns:
        与 spec.pairs() 同序的 SweepRow 列表
    """
    if jobs < 1:
        raise ConfigError(f"jobs 必须至少为 1: {jobs}")

    start_time = datetime.now()
    pairs = spec.pairs()
    logger.info(f"开始参数扫描: {len(spec.gamma_values)} 个 γ × {len(spec.eps_ratio_values)} 个 ε，jobs={jobs}")

    rows: List[Optional[SweepRow]] = [None] * len(pairs)
    pending = []
    for idx, (gamma, eps) in enumerate(pairs):
        cached = cache.get('sweep_row', **_cache_params(gamma, eps, spec)) if cache is not None else None
        if cached is not None:
            rows[idx] = SweepRow.from_dict(cached)
        else:
            pending.append(idx)
    if cache is not None and len(pending) < len(pairs):
        logger.info(f"复用 {len(pairs) - len(pending)} 行缓存结果")

    if jobs == 1 or len(pending) <= 1:
        for idx in pending:
            gamma, eps = pairs[idx]
            logger.info(f"({idx + 1}/{len(pairs)}) γ={gamma}, ε={eps}")
            rows[idx] = run_row(gamma, eps, spec.template, spec.eps1)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {
                idx: pool.submit(run_row, pairs[idx][0], pairs[idx][1], spec.template, spec.eps1)
                for idx in pending
            }
            for idx, future in futures.items():
                rows[idx] = future.result()

    if cache is not None:
        for idx in pending:
            if rows[idx].ok:
                gamma, eps = pairs[idx]
                cache.set('sweep_row', rows[idx].to_dict(), **_cache_params(gamma, eps, spec))

    elapsed = (datetime.now() - start_time).total_seconds()
    failed = sum(1 for r in rows if not r.ok)
    logger.info(f"参数扫描完成: {len(rows)} 行，失败 {failed} 行，耗时 {elapsed:.2f}秒")
    return rows


def _relative_error(measured: float, predicted: float) -> float:
    if abs(predicted) < 1e-12:
        return abs(measured - predicted)
    return abs(measured - predicted) / abs(predicted)


def compare(rows: Sequence[SweepRow]) -> Dict[str, Any]:
    """
    实测与按 regime 选用的估计比较

    Returns:
        每行的相对误差，以及每侧的最大/平均相对误差
    """
    per_row = []
    errors: Dict[str, List[float]] = {'left': [], 'right': []}
    for row in rows:
        if not row.ok:
            per_row.append({'gamma': row.gamma, 'eps': row.eps, 'error': row.error})
            continue
        selected = row.predicted[row.regime]
        entry = {'gamma': row.gamma, 'eps': row.eps, 'regime': row.regime}
        for side in ('left', 'right'):
            err = _relative_error(row.measured(side), selected[f'{side}_speed'])
            entry[f'{side}_relative_error'] = err
            errors[side].append(err)
        per_row.append(entry)

    valid = len(errors['right'])
    summary: Dict[str, Any] = {
        'valid_rows': valid,
        'failed_rows': len(rows) - valid,
        'flagged': valid == 0,
        'rows': per_row,
    }
    for side in ('left', 'right'):
        values = errors[side]
        summary[side] = {
            'max_relative_error': max(values) if values else None,
            'mean_relative_error': float(np.mean(values)) if values else None,
        }
    if valid == 0:
        logger.warning("没有成功的扫描行，比较结果无效")
    return summary


def _estimate_errors(row: SweepRow, side: str) -> Tuple[float, float]:
    """(|实测 − 小参数估计|, |实测 − 大参数估计|)"""
    measured = row.measured(side)
    small = abs(measured - row.predicted['small_param'][f'{side}_speed'])
    large = abs(measured - row.predicted['large_param'][f'{side}_speed'])
    return small, large


def _error_margin(row: SweepRow, side: str) -> float:
    """正值表示大参数估计更近"""
    small, large = _estimate_errors(row, side)
    return small - large


def better_estimate(row: SweepRow, side: str = 'right') -> Optional[str]:
    """更接近实测值的估计；在浮点舍入范围内相等时归入小参数估计"""
    if not row.ok:
        return None
    small, large = _estimate_errors(row, side)
    if math.isclose(small, large, rel_tol=1e-9, abs_tol=1e-12):
        return 'small_param'
    return 'large_param' if large < small else 'small_param'


def regime_switch(rows: Sequence[SweepRow], eps: float, side: str = 'right',
                  eps1: float = 1.0) -> Dict[str, Any]:
    """
    固定 ε 时沿 γ 方向的估计切换

    switch_gamma 是大参数估计首次更优的网格点；interpolated_switch_gamma 在它与前一个
    网格点之间对误差差值做线性插值。intersection 是两种估计相交处的 γ，
    intersection_distance 记录网格切换点与它的距离。

    Returns:
        gammas, labels, 切换次数, 切换 γ, 估计交点及距离
    """
    selected = sorted((r for r in rows if abs(r.eps - eps) < 1e-12 and r.ok), key=lambda r: r.gamma)
    gammas = [r.gamma for r in selected]
    labels = [better_estimate(r, side) for r in selected]
    switches = sum(1 for a, b in zip(labels, labels[1:]) if a != b)

    first = next((i for i, lab in enumerate(labels) if lab == 'large_param'), None)
    switch_gamma = gammas[first] if first is not None else None
    interpolated = switch_gamma
    if first is not None and first > 0:
        lo, hi = selected[first - 1], selected[first]
        d_lo, d_hi = _error_margin(lo, side), _error_margin(hi, side)
        if d_hi > d_lo:
            interpolated = lo.gamma + (hi.gamma - lo.gamma) * (0.0 - d_lo) / (d_hi - d_lo)
            interpolated = min(max(interpolated, lo.gamma), hi.gamma)

    intersection = estimate_intersection(row_params(0.0, eps, eps1), side)
    distance = abs(switch_gamma - intersection) if switch_gamma is not None else None
    return {
        'eps': eps,
        'side': side,
        'gammas': gammas,
        'labels': labels,
        'switches': switches,
        'switch_gamma': switch_gamma,
        'interpolated_switch_gamma': interpolated,
        'intersection': intersection,
        'intersection_distance': distance,
    }


def rows_to_frame(rows: Sequence[SweepRow]) -> pd.DataFrame:
    """CSV 输出表"""
    return pd.DataFrame([r.to_record() for r in rows], columns=CSV_COLUMNS)
