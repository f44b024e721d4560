"""
快照读写模块

快照 CSV 列: t, x, u, v（每个快照每个节点一行），支持单文件或每快照一个文件。
浮点数按最短往返表示写出，读回时使用 round_trip 精度，保证结果可逐位复现。
"""

from typing import Any, Dict, List, Optional, Sequence
import glob
import json
import logging
import os

import numpy as np
import pandas as pd

from errors import ConfigError, InsufficientDataError
from pde_solver import FieldState, Grid1D
from polar import PolarField

logger = logging.getLogger(__name__)

SNAPSHOT_FILE = 'snapshots.csv'
SNAPSHOT_PATTERN = 'snapshot_*.csv'
CONFIG_FILE = 'run_config.json'

COLUMN_MAPPING = {
    'time': 't', 'T': 't', 't': 't',
    'X': 'x', 'position': 'x', 'x': 'x',
    'U': 'u', 'u': 'u',
    'V': 'v', 'v': 'v',
}


def _standardize_columns(df: pd.DataFrame) -> pd.DataFrame:
    """标准化列名为 t, x, u, v"""
    df = df.rename(columns={c: COLUMN_MAPPING.get(str(c).strip(), c) for c in df.columns})
    required = ['t', 'x', 'u', 'v']
    missing = [c for c in required if c not in df.columns]
    if missing:
        raise ConfigError(f"快照数据缺少必需列: {missing}, 现有列: {list(df.columns)}")
    return df[required]


def _grid_from_nodes(x: np.ndarray) -> Grid1D:
    """由节点坐标还原均匀网格"""
    grid = Grid1D(x_min=float(x[0]), x_max=float(x[-1]), n=len(x))
    if not np.allclose(x, grid.x, rtol=0, atol=1e-9 * max(1.0, abs(grid.x_max - grid.x_min))):
        raise ConfigError("快照节点不是均匀网格")
    return grid


def snapshots_to_frame(snapshots: Sequence[FieldState]) -> pd.DataFrame:
    frames = [pd.DataFrame({'t': s.t, 'x': s.x, 'u': s.u, 'v': s.v}) for s in snapshots]
    return pd.concat(frames, ignore_index=True)


def frame_to_snapshots(df: pd.DataFrame) -> List[FieldState]:
    """按时间分组还原快照"""
    df = _standardize_columns(df)
    snapshots = []
    grid: Optional[Grid1D] = None
    for t, group in df.groupby('t', sort=True):
        group = group.sort_values('x')
        x = group['x'].to_numpy()
        if grid is None or grid.n != len(x):
            grid = _grid_from_nodes(x)
        snapshots.append(FieldState(
            grid=grid, t=float(t),
            u=group['u'].to_numpy(dtype=float),
            v=group['v'].to_numpy(dtype=float),
        ))
    return snapshots


def clear_snapshots(out_dir: str) -> int:
    """删除目录中的 snapshots.csv 与 snapshot_*.csv，返回删除的文件数"""
    stale = glob.glob(os.path.join(out_dir, SNAPSHOT_PATTERN))
    single = os.path.join(out_dir, SNAPSHOT_FILE)
    if os.path.exists(single):
        stale.append(single)
    for path in stale:
        os.remove(path)
    if stale:
        logger.info(f"删除旧快照文件 {len(stale)} 个: {out_dir}")
    return len(stale)


def write_snapshots(snapshots: Sequence[FieldState], out_dir: str, layout: str = 'single') -> List[str]:
    """
    写出快照

    先删除目录中已有的快照文件（两种布局都删），避免新旧运行混在一起。

    Args:
        snapshots: 快照序列
        out_dir: 输出目录
        layout: single（单文件）或 per_snapshot（每快照一个文件）

    Returns:
        写出的文件路径
    """
    if layout not in ('single', 'per_snapshot'):
        raise ConfigError(f"不支持的快照布局: {layout}")
    os.makedirs(out_dir, exist_ok=True)
    clear_snapshots(out_dir)
    if layout == 'single':
        path = os.path.join(out_dir, SNAPSHOT_FILE)
        snapshots_to_frame(snapshots).to_csv(path, index=False)
        paths = [path]
    else:
        paths = []
        for idx, snap in enumerate(snapshots):
            path = os.path.join(out_dir, f"snapshot_{idx:04d}.csv")
            snapshots_to_frame([snap]).to_csv(path, index=False)
            paths.append(path)
    logger.info(f"快照已保存: {len(snapshots)} 个 → {out_dir}")
    return paths


def read_snapshots(path: str) -> List[FieldState]:
    """
    读取快照，path 可以是目录或单个 CSV 文件

    目录下优先读取 snapshots.csv，否则合并所有 snapshot_*.csv。
    """
    if os.path.isdir(path):
        single = os.path.join(path, SNAPSHOT_FILE)
        files = [single] if os.path.exists(single) else sorted(glob.glob(os.path.join(path, SNAPSHOT_PATTERN)))
    elif os.path.isfile(path):
        files = [path]
    else:
        raise InsufficientDataError(f"快照路径不存在: {path}")

    if not files:
        raise InsufficientDataError(f"目录中没有快照文件: {path}")

    df = pd.concat([pd.read_csv(f, float_precision='round_trip') for f in files], ignore_index=True)
    if df.empty:
        raise InsufficientDataError(f"快照文件为空: {path}")
    snapshots = frame_to_snapshots(df)
    logger.info(f"读取快照 {len(snapshots)} 个: {path}")
    return snapshots


def polar_to_frame(fields: Sequence[PolarField]) -> pd.DataFrame:
    return pd.concat([pf.to_frame() for pf in fields], ignore_index=True)


def write_polar(fields: Sequence[PolarField], path: str) -> str:
    """写出极坐标场 CSV: t, x, r, theta, theta_valid"""
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    polar_to_frame(fields).to_csv(path, index=False)
    logger.info(f"极坐标场已保存: {path}")
    return path


def write_json(data: Any, path: str) -> str:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(data, f, indent=2, ensure_ascii=False)
    return path


def write_run_config(config_dict: Dict[str, Any], out_dir: str) -> str:
    """在快照目录中保存运行配置，供 analyze 还原参数"""
    return write_json(config_dict, os.path.join(out_dir, CONFIG_FILE))


def read_run_config_dict(snapshot_dir: str) -> Optional[Dict[str, Any]]:
    path = os.path.join(snapshot_dir, CONFIG_FILE) if os.path.isdir(snapshot_dir) else None
    if path is None or not os.path.exists(path):
        return None
    with open(path, 'r', encoding='utf-8') as f:
        return json.load(f)
