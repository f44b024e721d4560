"""CLI 子命令模块"""
from commands.analyze import register as register_analyze
from commands.phase_portrait import register as register_phase_portrait
from commands.predict import register as register_predict
from commands.simulate import register as register_simulate
from commands.sweep import register as register_sweep
from commands.transform import register as register_transform


def register_commands(subparsers):
    """注册所有子命令"""
    register_simulate(subparsers)
    register_phase_portrait(subparsers)
    register_transform(subparsers)
    register_analyze(subparsers)
    register_predict(subparsers)
    register_sweep(subparsers)
