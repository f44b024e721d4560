"""文本报告生成测试"""
import math

import pytest

from front_analysis import SpeedEstimate, SpeedReport
from pde_solver import SystemParams
from report_generator import CLASSIFICATION_NAMES, SpeedReportGenerator, generate_text_report
from theory import predict_all


def _report(gamma=5.0, left=-1.9, right=6.8, right_angle=math.pi / 2 + math.pi, with_predictions=True):
    params = SystemParams.reduced(gamma)
    return SpeedReport(
        left=SpeedEstimate(left, 0.01, (10.0, 20.0), 21),
        right=SpeedEstimate(right, 0.02, (10.0, 20.0), 21),
        left_onset_angle=0.02,
        right_onset_angle=right_angle,
        centreline_speed=SpeedEstimate(0.5 * (left + right), 0.01, (10.0, 20.0), 21),
        params=params,
        centreline_angle=None,
        predictions=predict_all(params) if with_predictions else {},
    )


def test_report_sections():
    """测试报告包含全部章节"""
    text = generate_text_report(_report())
    for title in ('系统参数', '实测波速', '起始角', '理论预测', '实测与预测对照', '不稳定性分类'):
        assert f"【{title}】" in text


def test_report_marks_current_regime():
    """测试当前 regime 被标记"""
    text = generate_text_report(_report(gamma=5.0))
    marked = [line for line in text.splitlines() if '当前区间' in line]
    assert len(marked) == 1
    assert '大参数估计' in marked[0]


def test_report_relative_errors():
    """测试相对误差计算"""
    text = generate_text_report(_report(left=-1.9, right=6.8))
    assert '相对误差 5.00%' in text
    assert '相对误差 2.86%' in text


def test_report_zero_prediction_uses_absolute_error():
    """测试预测为零时改用绝对误差"""
    # γ = 2 时大参数估计左波速 γ - 2 = 0，但 |γ̄| = 2 仍属小参数区
    report = _report(gamma=2.0, left=0.05, right=4.2)
    predictions = dict(report.predictions, selected={'left_speed': 0.0, 'right_speed': 4.0})
    text = SpeedReportGenerator().generate_text_report(report, predictions)
    assert '绝对误差 0.0500' in text


def test_report_angles_mod_pi():
    """测试起始角按 mod π 输出，无效时注明"""
    text = generate_text_report(_report(right_angle=math.pi / 2 + math.pi))
    assert '1.5708 rad' in text
    assert '90.0°' in text
    assert '无法测量' in text


def test_report_instability():
    """测试不稳定性分类文本"""
    text = generate_text_report(_report())
    assert f"按预测波速符号: {CLASSIFICATION_NAMES['absolute']}" in text
    assert 'large_reduced: 不成立' in text


def test_report_without_predictions():
    """测试没有预测时只输出实测部分"""
    text = generate_text_report(_report(with_predictions=False))
    assert '【实测波速】' in text
    assert '【理论预测】' not in text


@pytest.mark.parametrize("gamma,name", [(0.0, '小参数估计'), (5.0, '大参数估计')])
def test_report_lists_all_estimates(gamma, name):
    """测试列出简单/小/大参数估计和流中心估计"""
    text = generate_text_report(_report(gamma=gamma))
    assert name in text
    assert '简单估计' in text
    assert '流中心坐标系' in text
