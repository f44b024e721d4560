"""transform 子命令 - 快照 CSV 转为极坐标 CSV"""
import logging
import os

from commands.utils import handle_lab_error
from errors import EXIT_OK, ConfigError
from polar import transform_snapshots
from run_config import SolverDefaults
from snapshot_io import polar_to_frame, read_snapshots, write_json, write_polar

logger = logging.getLogger(__name__)


def register(subparsers):
    parser = subparsers.add_parser('transform', help='把 t,x,u,v 快照转为 t,x,r,theta,theta_valid')
    parser.add_argument('input', help='快照目录或 CSV 文件')
    parser.add_argument('--out', default=os.path.join(SolverDefaults.OUTPUT_DIR, 'polar.csv'), help='输出文件')
    parser.add_argument('--r-floor', type=float, default=SolverDefaults.R_FLOOR,
                        help='r 低于该值时相位记为无效')
    parser.add_argument('--format', choices=SolverDefaults.OUTPUT_FORMATS, default='csv')
    parser.set_defaults(handler=cmd_transform)


@handle_lab_error
def cmd_transform(args) -> int:
    if not args.r_floor > 0:
        raise ConfigError(f"r_floor 必须为正: {args.r_floor}")

    snapshots = read_snapshots(args.input)
    fields = transform_snapshots(snapshots, args.r_floor)

    if args.format == 'json':
        write_json(polar_to_frame(fields).to_dict(orient='records'), args.out)
    else:
        write_polar(fields, args.out)

    logger.info(f"✅ 极坐标变换完成: {len(fields)} 个快照 → {args.out}")
    return EXIT_OK
