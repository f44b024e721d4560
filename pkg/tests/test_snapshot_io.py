"""快照读写测试"""
import numpy as np
import pandas as pd
import pytest

from errors import ConfigError, InsufficientDataError
from pde_solver import DisturbanceSpec, Grid1D, SystemParams, simulate
from polar import transform_snapshots
from snapshot_io import (
    frame_to_snapshots,
    read_run_config_dict,
    read_snapshots,
    snapshots_to_frame,
    write_polar,
    write_run_config,
    write_snapshots,
)


@pytest.fixture
def snapshots():
    grid = Grid1D(-10.0, 10.0, 101)
    return simulate(SystemParams.reduced(1.0), grid, DisturbanceSpec(amplitude=0.1), t_end=1.0, snapshot_every=0.5)


@pytest.mark.parametrize("layout", ['single', 'per_snapshot'])
def test_write_and_read_exact(tmp_path, snapshots, layout):
    """测试快照写出后逐位读回"""
    paths = write_snapshots(snapshots, str(tmp_path), layout)
    assert len(paths) == (1 if layout == 'single' else len(snapshots))

    loaded = read_snapshots(str(tmp_path))
    assert [s.t for s in loaded] == [s.t for s in snapshots]
    for a, b in zip(loaded, snapshots):
        assert np.array_equal(a.u, b.u)
        assert np.array_equal(a.v, b.v)
        assert a.grid == b.grid


def test_csv_columns(tmp_path, snapshots):
    """测试快照 CSV 列"""
    path = write_snapshots(snapshots, str(tmp_path))[0]
    df = pd.read_csv(path)
    assert list(df.columns) == ['t', 'x', 'u', 'v']
    assert len(df) == len(snapshots) * snapshots[0].grid.n


def test_repeated_writes_identical(tmp_path, snapshots):
    """测试同一结果重复写出内容一致"""
    first = write_snapshots(snapshots, str(tmp_path / 'a'))[0]
    second = write_snapshots(snapshots, str(tmp_path / 'b'))[0]
    with open(first, 'rb') as f1, open(second, 'rb') as f2:
        assert f1.read() == f2.read()



def test_layout_switch_replaces_old_files(tmp_path, snapshots):
    """测试同一目录先单文件后逐快照写出，只读回新的快照"""
    older = simulate(SystemParams.reduced(1.0), snapshots[0].grid, DisturbanceSpec(amplitude=0.05),
                     t_end=1.5, snapshot_every=0.5)
    write_snapshots(older, str(tmp_path), 'single')
    write_snapshots(snapshots, str(tmp_path), 'per_snapshot')

    assert not (tmp_path / 'snapshots.csv').exists()
    loaded = read_snapshots(str(tmp_path))
    assert [s.t for s in loaded] == [s.t for s in snapshots]
    assert np.array_equal(loaded[-1].u, snapshots[-1].u)


def test_fewer_snapshots_drop_stale_files(tmp_path, snapshots):
    """测试重写较少的逐快照文件时删除多余的旧文件"""
    write_snapshots(snapshots, str(tmp_path), 'per_snapshot')
    write_snapshots(snapshots[:1], str(tmp_path), 'per_snapshot')

    assert len(list(tmp_path.glob('snapshot_*.csv'))) == 1
    assert len(read_snapshots(str(tmp_path))) == 1

def test_column_aliases():
    """测试列名标准化"""
    df = pd.DataFrame({'time': [0.0, 0.0, 0.0], 'X': [0.0, 1.0, 2.0], 'U': [1.0, 2.0, 3.0], 'V': [0.0, 0.0, 0.0]})
    loaded = frame_to_snapshots(df)
    assert len(loaded) == 1
    assert loaded[0].grid.h == 1.0
    assert list(loaded[0].u) == [1.0, 2.0, 3.0]


def test_missing_columns():
    """测试缺少必需列"""
    with pytest.raises(ConfigError):
        frame_to_snapshots(pd.DataFrame({'t': [0.0], 'x': [0.0], 'u': [0.0]}))


def test_non_uniform_grid_rejected():
    """测试非均匀节点"""
    df = pd.DataFrame({'t': [0.0] * 3, 'x': [0.0, 1.0, 3.0], 'u': [0.0] * 3, 'v': [0.0] * 3})
    with pytest.raises(ConfigError):
        frame_to_snapshots(df)


def test_read_empty_directory(tmp_path):
    """测试空目录"""
    with pytest.raises(InsufficientDataError):
        read_snapshots(str(tmp_path))
    with pytest.raises(InsufficientDataError):
        read_snapshots(str(tmp_path / 'missing'))


def test_invalid_layout(tmp_path, snapshots):
    """测试不支持的布局"""
    with pytest.raises(ConfigError):
        write_snapshots(snapshots, str(tmp_path), layout='zip')


def test_write_polar(tmp_path, snapshots):
    """测试极坐标 CSV"""
    path = write_polar(transform_snapshots(snapshots), str(tmp_path / 'polar' / 'polar.csv'))
    df = pd.read_csv(path)
    assert list(df.columns) == ['t', 'x', 'r', 'theta', 'theta_valid']


def test_run_config_sidecar(tmp_path):
    """测试运行配置随快照保存"""
    assert read_run_config_dict(str(tmp_path)) is None
    write_run_config({'eps1': 1.0, 'eps2': 1.0}, str(tmp_path))
    assert read_run_config_dict(str(tmp_path)) == {'eps1': 1.0, 'eps2': 1.0}


def test_frame_round_trip(snapshots):
    """测试 DataFrame 转换"""
    df = snapshots_to_frame(snapshots)
    back = frame_to_snapshots(df)
    assert len(back) == len(snapshots)
    assert np.array_equal(back[-1].u, snapshots[-1].u)
