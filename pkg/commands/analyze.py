"""analyze 子命令 - 快照 → 极坐标 → 波前 → 波速 → 起始角 → 理论对照"""
from dataclasses import replace
import logging
import os

import pandas as pd

from commands.utils import handle_lab_error, print_json
from errors import EXIT_OK, ConfigError, InsufficientDataError
from main import FrontSpeedAnalyzer
from report_generator import generate_text_report
from run_config import SolverDefaults, load_run_config, parse_run_config
from snapshot_io import read_run_config_dict, read_snapshots, write_json

logger = logging.getLogger(__name__)

INSUFFICIENT_HINT = '增大 t_end，让图案长到足够多的快照中都能检测到波前'


def register(subparsers):
    parser = subparsers.add_parser('analyze', help='测量波速和起始角，并与理论预测对照')
    parser.add_argument('snapshots', help='simulate 的输出目录或快照 CSV 文件')
    parser.add_argument('--config', help='JSON 运行配置；缺省时读取快照目录中的 run_config.json')
    parser.add_argument('--threshold', type=float, help='波前阈值 r')
    parser.add_argument('--window', type=float, help='拟合窗口占时间跨度的比例')
    parser.add_argument('--inset', type=float, help='起始角测量点到波前的距离')
    parser.add_argument('--format', choices=SolverDefaults.OUTPUT_FORMATS, default='json',
                        help='json: 完整报告；csv: 每侧一行的摘要表')
    parser.add_argument('--out', help='报告输出目录（默认与快照同目录）')
    parser.set_defaults(handler=cmd_analyze)


def _load_config(args):
    if args.config:
        return load_run_config(args.config)
    data = read_run_config_dict(args.snapshots)
    if data is None:
        raise ConfigError("缺少系统参数: 请用 --config 指定配置，或在快照目录中放置 run_config.json")
    return parse_run_config(data)


def _summary_frame(report) -> pd.DataFrame:
    selected = report.predictions.get('selected', {})
    rows = []
    for side, est, angle in (('left', report.left, report.left_onset_angle),
                             ('right', report.right, report.right_onset_angle)):
        rows.append({
            'side': side,
            'speed': est.speed,
            'stderr': est.stderr,
            'n_points': est.n_points,
            'onset_angle': angle,
            'predicted': selected.get(f'{side}_speed'),
            'regime': report.predictions.get('regime'),
        })
    return pd.DataFrame(rows)


@handle_lab_error
def cmd_analyze(args) -> int:
    config = _load_config(args)
    overrides = {k: getattr(args, k) for k in ('threshold', 'window', 'inset') if getattr(args, k) is not None}
    settings = replace(config.analysis, **overrides)

    out_dir = args.out or (args.snapshots if os.path.isdir(args.snapshots) else os.path.dirname(args.snapshots))
    snapshots = read_snapshots(args.snapshots)

    try:
        report = FrontSpeedAnalyzer(settings).analyze(snapshots, config.params)
    except InsufficientDataError as e:
        e.payload.setdefault('hint', INSUFFICIENT_HINT)
        raise

    if args.format == 'csv':
        path = os.path.join(out_dir, 'report.csv')
        os.makedirs(out_dir or '.', exist_ok=True)
        _summary_frame(report).to_csv(path, index=False)
    else:
        path = write_json(report.to_dict(), os.path.join(out_dir, 'report.json'))

    text_path = os.path.join(out_dir, 'report.txt')
    with open(text_path, 'w', encoding='utf-8') as f:
        f.write(generate_text_report(report))

    print_json(report.to_dict())
    logger.info(f"✅ 报告已保存: {path}, {text_path}")
    return EXIT_OK
