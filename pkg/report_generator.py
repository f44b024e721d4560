"""
波速分析报告生成模块

把 SpeedReport 与理论预测整理成文本报告，包含参数、实测波速、起始角、理论对照和不稳定性分类
"""

from typing import Any, Dict, List, Optional
from datetime import datetime
import math
import logging

from front_analysis import SpeedReport, mod_pi

logger = logging.getLogger(__name__)

WIDTH = 70

REGIME_NAMES = {
    'simple': '简单估计 (p ± 2√ε₁)',
    'small_param': '小参数估计',
    'large_param': '大参数估计',
}

CLASSIFICATION_NAMES = {
    'absolute': '绝对不稳定',
    'convective': '对流不稳定',
    'indeterminate': '无法判定',
    'borderline': '临界',
}


class SpeedReportGenerator:
    """波速分析报告生成器"""

    def generate_text_report(self, report: SpeedReport, predictions: Optional[Dict[str, Any]] = None) -> str:
        """
        生成完整的文本报告

        Args:
            report: 实测结果
            predictions: predict_all 的输出，缺省时使用 report.predictions

        Returns:
            报告文本
        """
        predictions = predictions if predictions is not None else report.predictions
        lines = []

        lines.append("=" * WIDTH)
        lines.append("【λ-ω 对流反应扩散波速分析报告】".center(WIDTH))
        lines.append(f"生成时间: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}".center(WIDTH))
        lines.append("=" * WIDTH)
        lines.append("")

        # 1. 系统参数
        lines.extend(self._params_section(report))
        lines.append("")

        # 2. 实测波速
        lines.extend(self._measured_section(report))
        lines.append("")

        # 3. 起始角
        lines.extend(self._angle_section(report))
        lines.append("")

        if predictions:
            # 4. 理论预测
            lines.extend(self._prediction_section(predictions))
            lines.append("")

            # 5. 实测与预测对照
            lines.extend(self._comparison_section(report, predictions))
            lines.append("")

            # 6. 不稳定性分类
            lines.extend(self._instability_section(predictions))

        return '\n'.join(lines)

    def _header(self, title: str) -> List[str]:
        return [
            "┏" + "━" * (WIDTH - 2) + "┓",
            "┃" + f" 【{title}】 ".center(WIDTH - 4) + "┃",
            "┗" + "━" * (WIDTH - 2) + "┛",
            "",
        ]

    def _params_section(self, report: SpeedReport) -> List[str]:
        p = report.params
        lines = self._header("系统参数")
        lines.append(f"  坐标系: {p.frame}")
        lines.append(f"  ε₁ = {p.eps1:g}, ε₂ = {p.eps2:g}, p = {p.p:g}, q = {p.q:g}")
        lines.append(f"  γ = {p.gamma:g}, γ̄ = {p.gamma_bar:.4f}, ε̄ = {p.eps_bar:.4f}, γ̂ = {p.gamma_hat:.4f}")
        lines.append(f"  波前阈值: r = {report.threshold:g}")
        return lines

    def _measured_section(self, report: SpeedReport) -> List[str]:
        lines = self._header("实测波速")
        for name, est in (('左波前', report.left), ('右波前', report.right), ('中线', report.centreline_speed)):
            lines.append(
                f"  {name}: {est.speed:+.4f} ± {est.stderr:.2g}"
                f"  (拟合窗口 t ∈ [{est.window[0]:g}, {est.window[1]:g}], {est.n_points} 点)"
            )
        return lines

    def _format_angle(self, angle: Optional[float]) -> str:
        if angle is None:
            return "无法测量"
        return f"{mod_pi(angle):.4f} rad (mod π)，约 {math.degrees(mod_pi(angle)):.1f}°"

    def _angle_section(self, report: SpeedReport) -> List[str]:
        lines = self._header("起始角")
        lines.append(f"  左波前: {self._format_angle(report.left_onset_angle)}")
        lines.append(f"  右波前: {self._format_angle(report.right_onset_angle)}")
        lines.append(f"  中心:   {self._format_angle(report.centreline_angle)}")
        return lines

    def _prediction_section(self, predictions: Dict[str, Any]) -> List[str]:
        lines = self._header("理论预测")
        current = predictions.get('regime')
        for key, name in REGIME_NAMES.items():
            pred = predictions.get(key)
            if not pred:
                continue
            mark = " ← 当前区间" if key == current else ""
            lines.append(f"  {name}: 左 {pred['left_speed']:+.4f}，右 {pred['right_speed']:+.4f}{mark}")
        flow = predictions.get('flow_centred')
        if flow:
            lines.append(f"  流中心坐标系: 左 {flow['left_speed']:+.4f}，右 {flow['right_speed']:+.4f}")
        intersection = predictions.get('intersection')
        if intersection:
            lines.append(f"  估计相交处 γ: 左 {intersection['left']:.4f}，右 {intersection['right']:.4f}")
        return lines

    def _comparison_section(self, report: SpeedReport, predictions: Dict[str, Any]) -> List[str]:
        lines = self._header("实测与预测对照")
        selected = predictions.get('selected')
        if not selected:
            lines.append("  无可用预测")
            return lines
        for side, est in (('left', report.left), ('right', report.right)):
            predicted = selected[f'{side}_speed']
            if abs(predicted) > 1e-12:
                err = abs(est.speed - predicted) / abs(predicted)
                err_text = f"相对误差 {err * 100:.2f}%"
            else:
                err_text = f"绝对误差 {abs(est.speed - predicted):.4f}"
            name = '左' if side == 'left' else '右'
            lines.append(f"  {name}: 实测 {est.speed:+.4f}，预测 {predicted:+.4f}，{err_text}")
        return lines

    def _instability_section(self, predictions: Dict[str, Any]) -> List[str]:
        lines = self._header("不稳定性分类")
        classification = predictions.get('classification')
        lines.append(f"  按预测波速符号: {CLASSIFICATION_NAMES.get(classification, classification)}")
        conditions = predictions.get('convective_conditions')
        if conditions:
            verdict = conditions.get('verdict')
            lines.append(f"  按对流条件: {CLASSIFICATION_NAMES.get(verdict, verdict)}")
            for name, cond in conditions.get('conditions', {}).items():
                status = '成立' if cond.get('holds') else '不成立'
                if cond.get('borderline'):
                    status = '临界'
                lines.append(f"    {name}: {status}")
        return lines


def generate_text_report(report: SpeedReport, predictions: Optional[Dict[str, Any]] = None) -> str:
    """生成文本报告"""
    return SpeedReportGenerator().generate_text_report(report, predictions)
