"""simulate 子命令 - 按配置运行 PDE 模拟并写出快照"""
from dataclasses import replace
import logging

from commands.utils import handle_lab_error
from errors import EXIT_OK
from main import FrontSpeedAnalyzer
from run_config import OutputSettings, SolverDefaults, load_run_config
from snapshot_io import write_run_config, write_snapshots

logger = logging.getLogger(__name__)


def register(subparsers):
    parser = subparsers.add_parser('simulate', help='运行 PDE 模拟，写出 t,x,u,v 快照')
    parser.add_argument('--config', required=True, help='JSON 运行配置')
    parser.add_argument('--out', help='快照输出目录（覆盖配置中的 output.out）')
    parser.add_argument('--layout', choices=SolverDefaults.SNAPSHOT_LAYOUTS,
                        help='single: 单个 snapshots.csv；per_snapshot: 每个快照一个文件')
    parser.set_defaults(handler=cmd_simulate)


@handle_lab_error
def cmd_simulate(args) -> int:
    """
    运行模拟

    配置完全校验后才开始计算；计算成功后才写文件，失败时不留下部分输出。
    """
    config = load_run_config(args.config)
    output = OutputSettings(
        out=args.out or config.output.out,
        format=config.output.format,
        layout=args.layout or config.output.layout,
    )
    config = replace(config, output=output)

    logger.info(f"开始模拟: {config.params.to_dict()}, t_end={config.t_end}")
    snapshots = FrontSpeedAnalyzer(config.analysis).simulate_config(config)

    write_snapshots(snapshots, output.out, output.layout)
    write_run_config(config.to_dict(), output.out)
    logger.info(f"✅ 模拟完成，输出目录: {output.out}")
    return EXIT_OK
