"""
运行配置模块

JSON 配置文档:
{
  "frame": "reduced", "eps1": 1, "eps2": 1, "p": 0, "q": 1,
  "x_min": -100, "x_max": 100, "n": 2001,
  "t_end": 40, "snapshot_every": 0.5,
  "disturbance": {"center": 0, "amplitude": 0.01, "width": 1, "species": "both"},
  "analysis": {"threshold": 0.5, "window": 0.5, "inset": 2, "r_floor": 1e-4, "zero_tolerance": 1e-3},
  "output": {"out": "output", "format": "csv", "layout": "single"}
}

未知键一律拒绝；所有值在计算开始前校验完毕。
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Iterable, Mapping
import json
import logging
import math

from errors import ConfigError, LabError
from pde_solver import FRAMES, DisturbanceSpec, Grid1D, SystemParams

logger = logging.getLogger(__name__)


class SolverDefaults:
    """默认参数常量"""

    FRAME = 'reduced'
    X_MIN = -100.0
    X_MAX = 100.0
    N = 2001
    T_END = 40.0
    SNAPSHOT_EVERY = 0.5

    DISTURBANCE_CENTER = 0.0
    DISTURBANCE_AMPLITUDE = 0.01
    DISTURBANCE_WIDTH = 1.0
    DISTURBANCE_SPECIES = 'both'

    FRONT_THRESHOLD = 0.5
    FIT_WINDOW = 0.5
    ONSET_INSET = 2.0
    R_FLOOR = 1e-4
    ZERO_TOLERANCE = 1e-3

    CONTAMINATION_THRESHOLD = 1e-3
    CONTAMINATION_NODES = 5

    ODE_DT = 0.01
    ODE_T_END = 30.0

    OUTPUT_DIR = 'output'
    OUTPUT_FORMATS = ('csv', 'json')
    SNAPSHOT_LAYOUTS = ('single', 'per_snapshot')


TOP_LEVEL_KEYS = {
    'frame', 'eps1', 'eps2', 'p', 'q', 'gamma',
    'x_min', 'x_max', 'n', 't_end', 'snapshot_every',
    'disturbance', 'analysis', 'output',
}
DISTURBANCE_KEYS = {'center', 'amplitude', 'width', 'species'}
ANALYSIS_KEYS = {'threshold', 'window', 'inset', 'r_floor', 'zero_tolerance'}
OUTPUT_KEYS = {'out', 'format', 'layout'}


@dataclass(frozen=True)
class AnalysisSettings:
    """波前分析参数"""
    threshold: float = SolverDefaults.FRONT_THRESHOLD
    window: float = SolverDefaults.FIT_WINDOW
    inset: float = SolverDefaults.ONSET_INSET
    r_floor: float = SolverDefaults.R_FLOOR
    zero_tolerance: float = SolverDefaults.ZERO_TOLERANCE

    def __post_init__(self):
        if not 0 < self.threshold < 1:
            raise ConfigError(f"threshold 必须在 (0, 1) 内: {self.threshold}")
        if not 0 < self.window <= 1:
            raise ConfigError(f"window 必须在 (0, 1] 内: {self.window}")
        if not self.inset > 0:
            raise ConfigError(f"inset 必须为正: {self.inset}")
        if not self.r_floor > 0:
            raise ConfigError(f"r_floor 必须为正: {self.r_floor}")
        if not self.zero_tolerance >= 0:
            raise ConfigError(f"zero_tolerance 不能为负: {self.zero_tolerance}")


@dataclass(frozen=True)
class OutputSettings:
    """输出路径与格式"""
    out: str = SolverDefaults.OUTPUT_DIR
    format: str = 'csv'
    layout: str = 'single'

    def __post_init__(self):
        if self.format not in SolverDefaults.OUTPUT_FORMATS:
            raise ConfigError(f"不支持的输出格式: {self.format}")
        if self.layout not in SolverDefaults.SNAPSHOT_LAYOUTS:
            raise ConfigError(f"不支持的快照布局: {self.layout}")


@dataclass(frozen=True)
class RunConfig:
    """一次模拟运行的完整配置"""
    params: SystemParams
    grid: Grid1D
    disturbance: DisturbanceSpec
    t_end: float = SolverDefaults.T_END
    snapshot_every: float = SolverDefaults.SNAPSHOT_EVERY
    analysis: AnalysisSettings = field(default_factory=AnalysisSettings)
    output: OutputSettings = field(default_factory=OutputSettings)

    def __post_init__(self):
        if not (math.isfinite(self.t_end) and self.t_end > 0):
            raise ConfigError(f"t_end 必须为正: {self.t_end}")
        if not (math.isfinite(self.snapshot_every) and self.snapshot_every > 0):
            raise ConfigError(f"snapshot_every 必须为正: {self.snapshot_every}")

    def to_dict(self) -> Dict[str, Any]:
        """可以被 parse_run_config 读回的 JSON 结构"""
        return {
            'frame': self.params.frame,
            'eps1': self.params.eps1,
            'eps2': self.params.eps2,
            'p': self.params.p,
            'q': self.params.q,
            'x_min': self.grid.x_min,
            'x_max': self.grid.x_max,
            'n': self.grid.n,
            't_end': self.t_end,
            'snapshot_every': self.snapshot_every,
            'disturbance': asdict(self.disturbance),
            'analysis': asdict(self.analysis),
            'output': asdict(self.output),
        }


def validate_required(params: Mapping[str, Any], required_fields: Iterable[str]) -> None:
    """验证必需参数"""
    missing = [f for f in required_fields if f not in params or params[f] is None]
    if missing:
        raise ConfigError(f"缺少必需参数: {', '.join(missing)}")


def _reject_unknown(section: str, data: Mapping[str, Any], allowed: set) -> None:
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"{section} 中存在未知键: {', '.join(unknown)}", payload={'unknown_keys': unknown})


def _number(data: Mapping[str, Any], key: str, default: Any) -> float:
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} 必须是数值: {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{key} 必须是有限值: {value!r}")
    return float(value)


def _section(data: Mapping[str, Any], key: str) -> Dict[str, Any]:
    value = data.get(key, {})
    if not isinstance(value, dict):
        raise ConfigError(f"{key} 必须是 JSON 对象")
    return value


def parse_run_config(data: Mapping[str, Any]) -> RunConfig:
    """
    从 JSON 对象构造 RunConfig

    Args:
        data: 已解析的 JSON 字典

    Returns:
        校验通过的 RunConfig
    """
    if not isinstance(data, dict):
        raise ConfigError("配置文档顶层必须是 JSON 对象")
    _reject_unknown('配置', data, TOP_LEVEL_KEYS)
    validate_required(data, ['eps1', 'eps2'])

    frame = data.get('frame', SolverDefaults.FRAME)
    if frame not in FRAMES:
        raise ConfigError(f"不支持的坐标系: {frame}，支持: {', '.join(FRAMES)}")

    p = _number(data, 'p', 0.0)
    if 'gamma' in data:
        if 'q' in data:
            raise ConfigError("gamma 与 q 不能同时给出")
        q = p + _number(data, 'gamma', 0.0)
    else:
        q = _number(data, 'q', 0.0)

    n = data.get('n', SolverDefaults.N)
    if isinstance(n, bool) or not isinstance(n, int):
        raise ConfigError(f"n 必须是整数: {n!r}")

    disturbance = _section(data, 'disturbance')
    _reject_unknown('disturbance', disturbance, DISTURBANCE_KEYS)
    analysis = _section(data, 'analysis')
    _reject_unknown('analysis', analysis, ANALYSIS_KEYS)
    output = _section(data, 'output')
    _reject_unknown('output', output, OUTPUT_KEYS)

    params = SystemParams(
        eps1=_number(data, 'eps1', None),
        eps2=_number(data, 'eps2', None),
        p=p, q=q, frame=frame,
    )
    grid = Grid1D(
        x_min=_number(data, 'x_min', SolverDefaults.X_MIN),
        x_max=_number(data, 'x_max', SolverDefaults.X_MAX),
        n=n,
    )
    spec = DisturbanceSpec(
        center=_number(disturbance, 'center', SolverDefaults.DISTURBANCE_CENTER),
        amplitude=_number(disturbance, 'amplitude', SolverDefaults.DISTURBANCE_AMPLITUDE),
        width=_number(disturbance, 'width', SolverDefaults.DISTURBANCE_WIDTH),
        species=disturbance.get('species', SolverDefaults.DISTURBANCE_SPECIES),
    )
    if not grid.contains(spec.center):
        raise ConfigError(f"扰动中心 {spec.center} 不在网格 [{grid.x_min}, {grid.x_max}] 内")

    settings = AnalysisSettings(
        threshold=_number(analysis, 'threshold', SolverDefaults.FRONT_THRESHOLD),
        window=_number(analysis, 'window', SolverDefaults.FIT_WINDOW),
        inset=_number(analysis, 'inset', SolverDefaults.ONSET_INSET),
        r_floor=_number(analysis, 'r_floor', SolverDefaults.R_FLOOR),
        zero_tolerance=_number(analysis, 'zero_tolerance', SolverDefaults.ZERO_TOLERANCE),
    )
    out = OutputSettings(
        out=str(output.get('out', SolverDefaults.OUTPUT_DIR)),
        format=output.get('format', 'csv'),
        layout=output.get('layout', 'single'),
    )

    return RunConfig(
        params=params,
        grid=grid,
        disturbance=spec,
        t_end=_number(data, 't_end', SolverDefaults.T_END),
        snapshot_every=_number(data, 'snapshot_every', SolverDefaults.SNAPSHOT_EVERY),
        analysis=settings,
        output=out,
    )


def load_run_config(path: str) -> RunConfig:
    """读取并校验 JSON 配置文件"""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"配置文件不存在: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"配置文件 JSON 解析失败: {e}", payload={'line': e.lineno, 'column': e.colno})

    try:
        config = parse_run_config(data)
    except LabError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(f"配置格式错误: {e}")

    logger.info(f"配置已加载: {path}")
    return config
