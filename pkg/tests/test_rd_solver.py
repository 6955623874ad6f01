"""Explicit solver for u_t = Lap u + f(u): grid plumbing, stability caps,
order preservation, planar-wave accuracy, worker determinism, and the
monotone entire-solution construction."""

import math

import numpy as np
import pytest

from curvedfronts import (
    Field,
    FrontConfiguration,
    Grid,
    SolverConfig,
    entire_solution,
    make_boundary,
    make_combustion,
    measure_speed_1d,
    min_q,
    solve_cauchy,
    step,
    subsolution_floor,
    symmetric_v,
)

C = 0.26343617168072303


def planar_cfg(speed):
    return FrontConfiguration(2, np.array([[1.0]]), np.array([math.pi / 2]), np.zeros(1), speed)


def initial_field(cfg, profile, grid, t=0.0):
    vals = profile(min_q(cfg, t, grid.points().reshape(-1, grid.dimension)))
    return Field(grid, vals.reshape(grid.counts), t)


@pytest.fixture(scope="module")
def small_grid():
    return Grid((48, 48), 0.5, (-12.0, -12.0))


def test_grid_geometry(small_grid):
    assert small_grid.dimension == 2
    ax = small_grid.axis(0)
    assert ax[0] == -12.0
    assert ax[1] - ax[0] == 0.5
    pts = small_grid.points()
    assert pts.shape == (48, 48, 2)
    ring = small_grid.ring_indices()
    flat = np.zeros(48 * 48, dtype=bool)
    flat[ring] = True
    mask = flat.reshape(48, 48)
    assert mask[0].all() and mask[-1].all() and mask[:, 0].all() and mask[:, -1].all()
    assert not mask[1:-1, 1:-1].any()


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid((8, 48), 0.5, (0.0, 0.0))  # too few cells
    with pytest.raises(ValueError):
        Grid((48, 48), -0.5, (0.0, 0.0))
    with pytest.raises(ValueError):
        Grid((48, 48), 0.5, (0.0,))  # origin rank mismatch


def test_field_bounds(small_grid):
    Field(small_grid, np.full((48, 48), 0.5), 0.0).check_bounds()
    with pytest.raises(ValueError):
        Field(small_grid, np.full((48, 48), 3.0), 0.0).check_bounds()


def test_stability_cap(small_grid):
    nl = make_combustion()
    sc = SolverConfig(scheme="euler", cfl_safety=0.4)
    # 2D explicit Laplacian cap dx^2 / 4 times the safety factor,
    # shaved slightly by the reaction Lipschitz constant
    dt = sc.stable_dt(small_grid, nl)
    assert dt <= 0.4 * 0.5**2 / 4.0 + 1e-15
    assert dt > 0.8 * 0.4 * 0.5**2 / 4.0
    with pytest.raises(ValueError):
        SolverConfig(dt=1.0).resolve_dt(small_grid, nl)
    with pytest.raises(ValueError):
        SolverConfig(scheme="rk4")


def test_snapshot_span_must_tile(small_grid, nl03, profile03):
    cfg = planar_cfg(profile03.speed)
    u0 = initial_field(cfg, profile03, small_grid)
    bc = make_boundary("dirichlet-lower", cfg=cfg, profile=profile03)
    with pytest.raises(ValueError):
        solve_cauchy(u0, nl03, bc, SolverConfig(), t_end=1.0, snapshot_dt=0.3)


def test_blow_up_detection(small_grid, nl03, profile03):
    cfg = planar_cfg(profile03.speed)
    bad = Field(small_grid, np.full((48, 48), 2.5), 0.0)
    bc = make_boundary("dirichlet-lower", cfg=cfg, profile=profile03)
    with pytest.raises(RuntimeError):
        solve_cauchy(bad, nl03, bc, SolverConfig(), t_end=0.5, snapshot_dt=0.5)


def test_constant_states_are_fixed_points(small_grid, nl03):
    for const in (0.0, 1.0):
        u0 = Field(small_grid, np.full((48, 48), const), 0.0)
        bc = make_boundary("dirichlet-upper", upper=lambda t, pts, c=const: np.full(len(pts), c))
        out = solve_cauchy(u0, nl03, bc, SolverConfig(), t_end=1.0, snapshot_dt=1.0)
        assert np.array_equal(out[-1].values, u0.values)


def test_order_preservation(small_grid, nl03, profile03):
    # comparison principle survives discretisation: ordered data stay ordered
    cfg = planar_cfg(profile03.speed)
    rng = np.random.default_rng(3)
    base = profile03(min_q(cfg, 0.0, small_grid.points().reshape(-1, 2))).reshape(48, 48)
    lo = np.clip(base - rng.uniform(0.0, 0.05, base.shape), 0.0, 1.0)
    hi = np.clip(base + rng.uniform(0.0, 0.05, base.shape), 0.0, 1.0)
    hi = np.maximum(lo, hi)
    bc = make_boundary("dirichlet-exact-planar", cfg=cfg, profile=profile03)
    sc = SolverConfig(scheme="euler")
    out_lo = solve_cauchy(Field(small_grid, lo, 0.0), nl03, bc, sc, 2.0, 2.0)
    out_hi = solve_cauchy(Field(small_grid, hi, 0.0), nl03, bc, sc, 2.0, 2.0)
    assert np.all(out_hi[-1].values - out_lo[-1].values >= -1e-14)


def test_planar_wave_speed_and_shape(small_grid, nl03, profile03):
    # floored run tracks the exact traveling wave on a coarse grid
    cfg = planar_cfg(profile03.speed)
    u0 = initial_field(cfg, profile03, small_grid)
    bc = make_boundary("dirichlet-lower", cfg=cfg, profile=profile03)
    floor = subsolution_floor(cfg, profile03, small_grid)
    traj = solve_cauchy(u0, nl03, bc, SolverConfig(), t_end=10.0, snapshot_dt=2.0, floor=floor)
    exact = initial_field(cfg, profile03, small_grid, t=10.0)
    assert np.max(np.abs(traj[-1].values - exact.values)) < 1e-3
    # floor keeps the state above the subsolution exactly
    for f in traj:
        lower = initial_field(cfg, profile03, small_grid, t=f.time).values
        assert np.min(f.values - lower) >= 0.0


@pytest.mark.parametrize("scheme", ["euler", "rk2"])
def test_bit_identical_across_workers(scheme, small_grid, nl03, profile03, cfg_v):
    u0 = initial_field(cfg_v, profile03, small_grid)
    bc = make_boundary("dirichlet-lower", cfg=cfg_v, profile=profile03)
    floor = subsolution_floor(cfg_v, profile03, small_grid)
    outs = []
    for workers in (1, 4, 8):
        sc = SolverConfig(scheme=scheme, workers=workers)
        traj = solve_cauchy(u0.copy(), nl03, bc, sc, 2.0, 1.0, floor=floor)
        outs.append(traj[-1].values)
    assert np.array_equal(outs[0], outs[1])
    assert np.array_equal(outs[0], outs[2])


def test_single_step_matches_solve(small_grid, nl03, profile03, cfg_v):
    u0 = initial_field(cfg_v, profile03, small_grid)
    bc = make_boundary("dirichlet-lower", cfg=cfg_v, profile=profile03)
    sc = SolverConfig(dt=0.02, scheme="euler")
    stepped = step(u0.copy(), nl03, sc, bc)
    assert stepped.time == pytest.approx(0.02, abs=1e-15)
    traj = solve_cauchy(u0.copy(), nl03, bc, sc, t_end=0.02, snapshot_dt=0.02)
    assert np.array_equal(stepped.values, traj[-1].values)


def test_measured_1d_speed_matches_shooting(nl03, profile03):
    fit = measure_speed_1d(nl03, dx=0.25, length=200.0, sample_dt=4.0)
    assert abs(fit.speed - profile03.speed) / profile03.speed < 0.01
    assert fit.stderr < 1e-3
    assert len(fit.times) == len(fit.positions)


def test_entire_solution_monotone(nl03, profile03, cfg_v):
    c = profile03.speed
    grid = Grid((64, 64), 0.5, (-16.0, -20.0))
    sc = SolverConfig(scheme="euler", cfl_safety=0.4)
    res = entire_solution(
        cfg_v, profile03, nl03, grid, sc,
        n_list=[2.0 / c, 4.0 / c, 8.0 / c],
        window_end=1.0 / c, snapshot_dt=1.0 / c,
    )
    assert res.monotone_in_n
    assert res.monotonicity_worst >= -1e-10
    # frozen regression values for this grid and ladder
    assert res.increments[0] == pytest.approx(0.07080497269560304, rel=1e-9)
    assert res.increments[1] == pytest.approx(0.08671097412001838, rel=1e-9)
    assert res.time_derivative_min >= 0.0
    rep = res.report
    assert rep["lower_gap_min"] >= -1e-10
    assert rep["max_value"] <= 1.0
    assert rep["max_below_saturation"] < 1.0
    assert len(res.v_hat) == len(res.times)
    assert res.times[0] == 0.0
    assert res.times[-1] == pytest.approx(1.0 / c, rel=1e-12)


def test_entire_solution_shift_continuity(nl03, profile03):
    # small shift in the configuration moves the construction by O(tau)
    c = profile03.speed
    grid = Grid((64, 64), 0.5, (-16.0, -20.0))
    sc = SolverConfig(scheme="euler", cfl_safety=0.4)
    n = 2.0 / c
    kw = dict(n_list=[n], window_end=1.0 / c, snapshot_dt=1.0 / c)
    base = entire_solution(symmetric_v(math.pi / 3, c), profile03, nl03, grid, sc, **kw)
    moved = entire_solution(symmetric_v(math.pi / 3, c, shift=0.01), profile03, nl03, grid, sc, **kw)
    d = max(float(np.max(np.abs(a - b))) for a, b in zip(base.runs[n], moved.runs[n]))
    assert 1e-4 < d < 1e-2
