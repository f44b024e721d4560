"""predict 子命令 - 输出全部理论波速预测"""
import logging

from commands.utils import handle_lab_error, print_json
from errors import EXIT_OK, ConfigError
from pde_solver import FRAMES, SystemParams
from run_config import SolverDefaults
from theory import averaging_discrepancy, general_speed, predict_all

logger = logging.getLogger(__name__)


def register(subparsers):
    parser = subparsers.add_parser('predict', help='输出简单/小参数/大参数/流中心估计、regime 和不稳定性分类')
    parser.add_argument('--gamma', type=float, help='γ = q - p（与 --q 二选一）')
    parser.add_argument('--p', type=float, default=0.0, help='u 的对流系数')
    parser.add_argument('--q', type=float, help='v 的对流系数')
    parser.add_argument('--eps1', type=float, default=1.0, help='u 的扩散系数')
    parser.add_argument('--eps2', type=float, default=1.0, help='v 的扩散系数')
    parser.add_argument('--frame', choices=FRAMES, default=SolverDefaults.FRAME)
    parser.add_argument('--theta', type=float, help='额外输出该起始角下的一般波速')
    parser.add_argument('--tolerance', type=float, default=SolverDefaults.ZERO_TOLERANCE,
                        help='零速判定容差')
    parser.set_defaults(handler=cmd_predict)


def params_from_args(args) -> SystemParams:
    if args.gamma is not None and args.q is not None:
        raise ConfigError("--gamma 与 --q 不能同时给出")
    if args.gamma is not None:
        q = args.p + args.gamma
    else:
        q = args.q if args.q is not None else 0.0
    return SystemParams(eps1=args.eps1, eps2=args.eps2, p=args.p, q=q, frame=args.frame)


@handle_lab_error
def cmd_predict(args) -> int:
    if args.tolerance < 0:
        raise ConfigError(f"tolerance 不能为负: {args.tolerance}")
    params = params_from_args(args)

    result = predict_all(params, args.tolerance)
    result['averaging'] = averaging_discrepancy(params)
    if args.theta is not None:
        result['general'] = general_speed(args.theta, params).to_dict()

    print_json(result)
    return EXIT_OK
