"""sweep 子命令 - (γ, ε) 参数扫描"""
from dataclasses import replace
import logging
import os

from commands.utils import handle_lab_error, parse_float_list
from errors import EXIT_OK, ConfigError
from pde_solver import DisturbanceSpec, Grid1D, SystemParams
from run_config import RunConfig, SolverDefaults, load_run_config
from services.cache import RunCache
from snapshot_io import write_json
from sweep import DEFAULT_EPS, DEFAULT_GAMMAS, SweepSpec, compare, regime_switch, rows_to_frame, run_sweep

logger = logging.getLogger(__name__)


def register(subparsers):
    parser = subparsers.add_parser('sweep', help='在 (γ, ε) 网格上比较实测与预测波速')
    parser.add_argument('--config', help='运行模板（网格、扰动、t_end）；其中的 eps/p/q 会被扫描值替换')
    parser.add_argument('--gammas', help='逗号分隔的 γ 值，默认 0,0.5,...,6')
    parser.add_argument('--eps', help='逗号分隔的 ε = ε₂/ε₁ 值，默认 0.25,0.5,1,2,4')
    parser.add_argument('--eps1', type=float, default=1.0, help='固定的 ε₁')
    parser.add_argument('--t-end', type=float, help='覆盖模板中的 t_end')
    parser.add_argument('--jobs', type=int, default=1, help='并行进程数')
    parser.add_argument('--no-cache', action='store_true', help='不读写行结果缓存')
    parser.add_argument('--cache-dir', help='行结果缓存目录，默认 <out>/cache')
    parser.add_argument('--format', choices=SolverDefaults.OUTPUT_FORMATS, default='csv')
    parser.add_argument('--out', default=SolverDefaults.OUTPUT_DIR, help='输出目录')
    parser.set_defaults(handler=cmd_sweep)


def default_template() -> RunConfig:
    return RunConfig(
        params=SystemParams.reduced(0.0),
        grid=Grid1D(SolverDefaults.X_MIN, SolverDefaults.X_MAX, SolverDefaults.N),
        disturbance=DisturbanceSpec(),
    )


def spec_from_args(args) -> SweepSpec:
    template = load_run_config(args.config) if args.config else default_template()
    if args.t_end is not None:
        template = replace(template, t_end=args.t_end)
    gammas = parse_float_list(args.gammas, 'gammas') if args.gammas is not None else DEFAULT_GAMMAS
    eps = parse_float_list(args.eps, 'eps') if args.eps is not None else DEFAULT_EPS
    return SweepSpec(gamma_values=gammas, eps_ratio_values=eps, template=template, eps1=args.eps1)


@handle_lab_error
def cmd_sweep(args) -> int:
    if args.jobs < 1:
        raise ConfigError(f"jobs 必须至少为 1: {args.jobs}")
    spec = spec_from_args(args)

    cache = None if args.no_cache else RunCache(args.cache_dir or os.path.join(args.out, 'cache'))
    rows = run_sweep(spec, jobs=args.jobs, cache=cache)

    os.makedirs(args.out, exist_ok=True)
    if args.format == 'json':
        path = write_json([r.to_dict() for r in rows], os.path.join(args.out, 'sweep.json'))
    else:
        path = os.path.join(args.out, 'sweep.csv')
        rows_to_frame(rows).to_csv(path, index=False)

    summary = compare(rows)
    summary['regime_switch'] = [regime_switch(rows, e, 'right', spec.eps1) for e in spec.eps_ratio_values]
    write_json(summary, os.path.join(args.out, 'comparison.json'))

    logger.info(f"✅ 扫描结果已保存: {path}")
    return EXIT_OK
