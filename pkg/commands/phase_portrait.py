"""phase-portrait 子命令 - 反应 ODE 相图"""
import logging
import os

from commands.utils import handle_lab_error, parse_point
from errors import EXIT_OK
from kinetics import phase_portrait, portrait_to_frame
from run_config import SolverDefaults
from snapshot_io import write_json

logger = logging.getLogger(__name__)

# 极限环内外各取起点
DEFAULT_STARTS = ('0.1,0', '0.5,0', '2,0')


def register(subparsers):
    parser = subparsers.add_parser(
        'phase-portrait',
        help='积分 λ-ω 反应 ODE，输出 t,u,v,r,theta；多个起点时前面加 trajectory 列（起点序号）',
    )
    parser.add_argument('--start', action='append', metavar='U,V',
                        help='初始点，可重复给出；默认 0.1,0 0.5,0 2,0')
    parser.add_argument('--dt', type=float, default=SolverDefaults.ODE_DT, help='RK4 步长')
    parser.add_argument('--t-end', type=float, default=SolverDefaults.ODE_T_END, help='积分时长')
    parser.add_argument('--format', choices=SolverDefaults.OUTPUT_FORMATS, default='csv')
    parser.add_argument('--out', default=os.path.join(SolverDefaults.OUTPUT_DIR, 'phase_portrait.csv'),
                        help='输出文件')
    parser.set_defaults(handler=cmd_phase_portrait)


@handle_lab_error
def cmd_phase_portrait(args) -> int:
    starts = [parse_point(s) for s in (args.start or DEFAULT_STARTS)]
    trajectories = phase_portrait(starts, dt=args.dt, t_end=args.t_end)
    df = portrait_to_frame(trajectories)

    if args.format == 'json':
        write_json(df.to_dict(orient='records'), args.out)
    else:
        parent = os.path.dirname(args.out)
        if parent:
            os.makedirs(parent, exist_ok=True)
        df.to_csv(args.out, index=False)

    logger.info(f"✅ 相图已保存: {args.out}")
    return EXIT_OK
