#!/usr/bin/env python3
"""
λ-ω 对流反应扩散数值实验室主程序

整合模拟、极坐标变换、波前追踪、波速拟合、起始角测量和理论预测
子命令: simulate, phase-portrait, transform, analyze, predict, sweep
"""

import os
import sys
import logging
from datetime import datetime
from typing import Optional, Sequence

# 添加当前目录到路径
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from errors import InvalidInsetError
from front_analysis import (
    SpeedReport,
    build_trace,
    centreline_angle,
    centreline_speed,
    detect_fronts,
    estimate_speed,
    onset_angle,
)
from pde_solver import DisturbanceSpec, FieldState, Grid1D, MethodOfLinesSolver, SystemParams
from polar import transform_snapshots
from run_config import AnalysisSettings, RunConfig, SolverDefaults
from theory import predict_all

logger = logging.getLogger(__name__)


class FrontSpeedAnalyzer:
    """波前速度分析器: 模拟 → 极坐标 → 波前 → 波速 → 起始角 → 理论对照"""

    def __init__(self, settings: Optional[AnalysisSettings] = None,
                 contamination_threshold: Optional[float] = SolverDefaults.CONTAMINATION_THRESHOLD):
        """
        初始化分析器

        Args:
            settings: 波前分析参数
            contamination_threshold: 边界污染阈值，None 表示不检查
        """
        self.settings = settings or AnalysisSettings()
        self.contamination_threshold = contamination_threshold

    def simulate(self, params: SystemParams, grid: Grid1D, disturbance: Optional[DisturbanceSpec],
                 t_end: float, snapshot_every: float) -> Sequence[FieldState]:
        solver = MethodOfLinesSolver(
            params, grid,
            contamination_threshold=self.contamination_threshold,
            contamination_nodes=SolverDefaults.CONTAMINATION_NODES,
        )
        return solver.simulate(disturbance, t_end, snapshot_every)

    def simulate_config(self, config: RunConfig) -> Sequence[FieldState]:
        return self.simulate(config.params, config.grid, config.disturbance,
                             config.t_end, config.snapshot_every)

    def analyze(self, snapshots: Sequence[FieldState], params: SystemParams) -> SpeedReport:
        """
        执行完整的测量流程

        Args:
            snapshots: 时间顺序的快照
            params: 产生这些快照的系统参数

        Returns:
            SpeedReport，附带理论预测
        """
        s = self.settings
        start_time = datetime.now()

        logger.info("1/5 极坐标变换...")
        fields = transform_snapshots(snapshots, s.r_floor)

        logger.info("2/5 波前追踪...")
        trace = build_trace(fields, s.threshold)
        logger.info(f"  检测到 {len(trace.times)} 个快照的波前，跳过 {len(trace.skipped_times)} 个")

        logger.info("3/5 波速拟合...")
        left = estimate_speed(trace, 'left', s.window)
        right = estimate_speed(trace, 'right', s.window)
        centre = centreline_speed(trace, s.window)
        logger.info(f"  左波速 {left.speed:.4f} ± {left.stderr:.2g}，右波速 {right.speed:.4f} ± {right.stderr:.2g}")

        logger.info("4/5 起始角测量...")
        final = fields[-1]
        left_front, right_front = detect_fronts(final, s.threshold)
        left_angle = self._safe_onset(final, left_front, 'left')
        right_angle = self._safe_onset(final, right_front, 'right')
        centre_angle = centreline_angle(final, left_front, right_front)

        logger.info("5/5 理论预测...")
        predictions = predict_all(params, s.zero_tolerance)

        report = SpeedReport(
            left=left,
            right=right,
            left_onset_angle=left_angle,
            right_onset_angle=right_angle,
            centreline_speed=centre,
            params=params,
            centreline_angle=centre_angle,
            threshold=s.threshold,
            predictions=predictions,
        )

        elapsed = (datetime.now() - start_time).total_seconds()
        logger.info(f"分析完成! 耗时: {elapsed:.2f}秒")
        return report

    def _safe_onset(self, field, front: float, side: str) -> Optional[float]:
        try:
            return onset_angle(field, front, side, self.settings.inset)
        except InvalidInsetError as e:
            logger.warning(f"{side} 起始角无法测量: {e.message}")
            return None

    def run(self, config: RunConfig) -> SpeedReport:
        """模拟并分析"""
        snapshots = self.simulate_config(config)
        return self.analyze(snapshots, config.params)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """主函数"""
    import argparse
    from commands import register_commands

    parser = argparse.ArgumentParser(description="λ-ω 对流反应扩散数值实验室")
    parser.add_argument('-v', '--verbose', action='store_true', help='输出调试日志')
    parser.add_argument('-q', '--quiet', action='store_true', help='只输出警告和错误')
    subparsers = parser.add_subparsers(dest='command', required=True)
    register_commands(subparsers)

    args = parser.parse_args(argv)

    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING

    # 配置日志
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    # 返回退出码
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
