"""PDE 求解器测试"""
import math

import numpy as np
import pytest

from errors import BoundaryContaminationError, ConfigError, InvalidDisturbanceError
from front_analysis import detect_fronts
from kinetics import reaction_terms
from pde_solver import (
    DisturbanceSpec,
    FieldState,
    Grid1D,
    MethodOfLinesSolver,
    SystemParams,
    build_initial_state,
    rhs,
    simulate,
    stable_dt,
    step,
)
from polar import to_polar


@pytest.fixture
def five_nodes():
    return Grid1D(0.0, 4.0, 5)


def _spike(grid, a):
    u = np.zeros(grid.n)
    u[2] = a
    return FieldState(grid=grid, t=0.0, u=u, v=np.zeros(grid.n))


def test_derived_parameters():
    """测试导出参数"""
    params = SystemParams(eps1=4.0, eps2=2.0, p=1.0, q=5.0, frame='original')
    assert params.gamma == 4.0
    assert params.gamma_bar == 2.0
    assert params.eps_bar == -0.5
    assert params.gamma_hat == 2.0
    assert params.convection() == (1.0, 5.0)
    assert params.with_frame('reduced').convection() == (0.0, 4.0)
    assert params.with_frame('flow_centred').convection() == (-2.0, 2.0)


def test_frame_drift():
    """测试各坐标系相对原始坐标系的漂移"""
    params = SystemParams(eps1=1.0, eps2=1.0, p=1.0, q=3.0)
    assert params.drift('original') == 0.0
    assert params.drift('reduced') == 1.0
    assert params.drift('flow_centred') == 2.0


def test_normalised_mirrors_negative_p():
    """测试 p < 0 时空间反射"""
    params = SystemParams(eps1=1.0, eps2=1.0, p=-1.0, q=2.0, frame='original')
    normalised, mirrored = params.normalised()
    assert mirrored
    assert (normalised.p, normalised.q) == (1.0, -2.0)
    assert params.mirrored().gamma == -params.gamma

    same, flag = SystemParams(eps1=1.0, eps2=1.0, p=1.0).normalised()
    assert not flag
    assert same.p == 1.0


@pytest.mark.parametrize("kwargs", [
    {'eps1': 0.0, 'eps2': 1.0},
    {'eps1': 1.0, 'eps2': -1.0},
    {'eps1': 1.0, 'eps2': 1.0, 'frame': 'lab'},
    {'eps1': 1.0, 'eps2': 1.0, 'p': float('nan')},
])
def test_invalid_params_rejected(kwargs):
    """测试非法参数"""
    with pytest.raises(ConfigError):
        SystemParams(**kwargs)


def test_grid_spacing():
    """测试网格间距与节点"""
    grid = Grid1D(-100.0, 100.0, 2001)
    assert grid.h == pytest.approx(0.1)
    assert grid.x[1000] == pytest.approx(0.0)
    assert grid.nearest_index(0.04) == 1000
    with pytest.raises(ConfigError):
        Grid1D(1.0, 1.0, 10)
    with pytest.raises(ConfigError):
        Grid1D(0.0, 1.0, 2)


def test_initial_bump_at_nearest_node():
    """测试扰动峰值落在最近节点上"""
    grid = Grid1D(-10.0, 10.0, 201)
    state = build_initial_state(grid, DisturbanceSpec(center=0.03, amplitude=0.5, width=grid.h, species='u_only'))

    assert state.t == 0.0
    assert np.argmax(state.u) == grid.nearest_index(0.03)
    assert state.u.max() == 0.5
    assert np.all(state.v == 0.0)


def test_initial_species_selection():
    """测试扰动组分选择"""
    grid = Grid1D(-10.0, 10.0, 201)
    v_only = build_initial_state(grid, DisturbanceSpec(species='v_only'))
    both = build_initial_state(grid, DisturbanceSpec(species='both'))

    assert np.all(v_only.u == 0.0)
    assert v_only.v.max() == pytest.approx(0.01)
    assert np.array_equal(both.u, both.v)


def test_invalid_disturbance():
    """测试非法扰动"""
    grid = Grid1D(-10.0, 10.0, 201)
    with pytest.raises(InvalidDisturbanceError):
        DisturbanceSpec(amplitude=0.0)
    with pytest.raises(InvalidDisturbanceError):
        DisturbanceSpec(width=0.0)
    with pytest.raises(InvalidDisturbanceError):
        build_initial_state(grid, DisturbanceSpec(center=50.0))


def test_rhs_zero_state(five_nodes):
    """测试零态的变化率为零"""
    params = SystemParams.reduced(3.0)
    state = build_initial_state(five_nodes, None)
    du, dv = rhs(state, params)
    assert np.all(du == 0.0)
    assert np.all(dv == 0.0)


def test_rhs_stencil_arithmetic(five_nodes):
    """测试单节点扰动的差分算术"""
    a, eps1 = 0.3, 0.7
    params = SystemParams.reduced(1.5, eps1=eps1, eps2=2.0)
    du, dv = rhs(_spike(five_nodes, a), params)

    assert du[2] == pytest.approx(eps1 * (-2 * a) + a * (1 - a * a), abs=1e-14)
    assert du[1] == pytest.approx(eps1 * a, abs=1e-14)
    assert du[3] == pytest.approx(eps1 * a, abs=1e-14)
    assert du[0] == 0.0
    assert dv[2] == pytest.approx(a, abs=1e-14)


def test_rhs_constant_state_is_pure_reaction():
    """测试常数场只剩反应项"""
    grid = Grid1D(-5.0, 5.0, 21)
    u0, v0 = 0.4, -0.2
    state = FieldState(grid=grid, t=0.0, u=np.full(grid.n, u0), v=np.full(grid.n, v0))
    f, g = reaction_terms((u0, v0))

    for frame in ('original', 'reduced', 'flow_centred'):
        params = SystemParams(eps1=1.0, eps2=2.0, p=1.0, q=3.0, frame=frame)
        du, dv = rhs(state, params)
        assert np.allclose(du, f, atol=1e-12)
        assert np.allclose(dv, g, atol=1e-12)


def test_step_zero_state(five_nodes):
    """测试零态推进后仍为零，时间前进"""
    params = SystemParams.reduced(0.0)
    state = build_initial_state(five_nodes, None)
    new = step(state, params, 0.01)
    assert new.t == pytest.approx(0.01)
    assert np.all(new.u == 0.0)
    assert np.all(new.v == 0.0)


def test_step_matches_euler_for_small_dt(five_nodes):
    """测试小步长下与欧拉子步一致，且不修改输入"""
    params = SystemParams.reduced(1.0, eps1=0.5, eps2=0.5)
    state = _spike(five_nodes, 0.2)
    before = state.u.copy()
    dt = 1e-6

    new = step(state, params, dt)
    du, dv = rhs(state, params)

    assert np.allclose((new.u - state.u) / dt, du, atol=1e-5)
    assert np.allclose((new.v - state.v) / dt, dv, atol=1e-5)
    assert np.array_equal(state.u, before)


def test_step_symmetry_without_convection():
    """测试 γ=0 时对称扰动保持镜像对称"""
    grid = Grid1D(-20.0, 20.0, 201)
    params = SystemParams.reduced(0.0)
    solver = MethodOfLinesSolver(params, grid)
    state = build_initial_state(grid, DisturbanceSpec(amplitude=0.1))

    dt = solver.stable_dt()
    for _ in range(200):
        state = solver.step(state, dt)

    assert np.max(np.abs(state.u - state.u[::-1])) < 1e-10
    assert np.max(np.abs(state.v - state.v[::-1])) < 1e-10


def test_stable_dt_diffusive_bound():
    """测试扩散上界"""
    grid = Grid1D(-100.0, 100.0, 2001)
    params = SystemParams.reduced(0.0)
    assert stable_dt(grid, params) == pytest.approx(0.002)

    fine = Grid1D(-100.0, 100.0, 4001)
    assert stable_dt(fine, params) == pytest.approx(0.002 / 4)


def test_stable_dt_advective_bound():
    """测试对流上界"""
    grid = Grid1D(0.0, 10.0, 11)
    params = SystemParams.reduced(5.0, eps1=0.01, eps2=0.01)
    assert stable_dt(grid, params) == pytest.approx(0.04)


def test_simulate_zero_disturbance():
    """测试零扰动所有快照为零"""
    grid = Grid1D(-10.0, 10.0, 101)
    snapshots = simulate(SystemParams.reduced(1.0), grid, None, t_end=1.0, snapshot_every=0.5)
    assert all(np.all(s.u == 0.0) and np.all(s.v == 0.0) for s in snapshots)


def test_simulate_snapshot_times():
    """测试快照时刻含 0 与 t_end"""
    grid = Grid1D(-10.0, 10.0, 101)
    snapshots = simulate(SystemParams.reduced(0.0), grid, DisturbanceSpec(), t_end=1.25, snapshot_every=0.5)
    assert [s.t for s in snapshots] == [0.0, 0.5, 1.0, 1.25]


def test_simulate_rejects_bad_durations():
    """测试非正时长"""
    grid = Grid1D(-10.0, 10.0, 101)
    with pytest.raises(ConfigError):
        simulate(SystemParams.reduced(0.0), grid, DisturbanceSpec(), t_end=0.0, snapshot_every=0.5)
    with pytest.raises(ConfigError):
        simulate(SystemParams.reduced(0.0), grid, DisturbanceSpec(), t_end=1.0, snapshot_every=0.0)


def test_boundary_contamination_detected():
    """测试图案到达边界时报错"""
    grid = Grid1D(-5.0, 5.0, 101)
    with pytest.raises(BoundaryContaminationError) as exc_info:
        simulate(SystemParams.reduced(0.0), grid, DisturbanceSpec(), t_end=20.0, snapshot_every=1.0)
    assert exc_info.value.payload['t'] <= 20.0


def test_contamination_check_can_be_disabled():
    """测试关闭边界检查"""
    grid = Grid1D(-5.0, 5.0, 101)
    snapshots = simulate(SystemParams.reduced(0.0), grid, DisturbanceSpec(), t_end=20.0,
                         snapshot_every=5.0, contamination_threshold=None)
    assert snapshots[-1].is_finite()


def test_reflection_symmetry():
    """测试 γ 与 -γ 的解互为镜像"""
    grid = Grid1D(-20.0, 20.0, 201)
    d = DisturbanceSpec(amplitude=0.1)
    plus = simulate(SystemParams.reduced(1.0), grid, d, t_end=2.0, snapshot_every=1.0)[-1]
    minus = simulate(SystemParams.reduced(-1.0), grid, d, t_end=2.0, snapshot_every=1.0)[-1]

    assert np.max(np.abs(plus.u - minus.u[::-1])) < 1e-8
    assert np.max(np.abs(plus.v - minus.v[::-1])) < 1e-8


@pytest.mark.slow
def test_pattern_skewed_right():
    """测试 γ=1 时图案偏向右侧"""
    grid = Grid1D(-60.0, 90.0, 1501)
    final = simulate(SystemParams.reduced(1.0), grid, DisturbanceSpec(), t_end=20.0, snapshot_every=5.0)[-1]
    left, right = detect_fronts(to_polar(final), 0.5)

    assert right > abs(left)
    assert math.isfinite(left)
    assert np.max(np.abs(final.u)) < 1.3
    assert np.max(np.abs(final.v)) < 1.3
