"""Front diagnostics: interface extraction and M_eps, mean-speed estimation,
weighted gap decay, sandwich checks, and the perturbation stability driver."""

import json
import math

import numpy as np
import pytest

from curvedfronts import (
    DiagnosticsReport,
    Field,
    FrontConfiguration,
    Grid,
    PerturbationSpec,
    SolverConfig,
    check_admissibility,
    entire_solution,
    extract_interface_and_Meps,
    half_level_cross_check,
    interface_pair_distance,
    mean_speed_estimate,
    min_q,
    sandwich_and_monotonicity,
    stability_run,
    subsolution_lower,
    symmetric_v,
    weighted_gap_report,
)
from curvedfronts.diagnostics import perturbation_values


def planar_cfg(speed):
    return FrontConfiguration(2, np.array([[1.0]]), np.array([math.pi / 2]), np.zeros(1), speed)


def exact_field(cfg, profile, grid, t=0.0):
    vals = profile(min_q(cfg, t, grid.points().reshape(-1, grid.dimension)))
    return Field(grid, vals.reshape(grid.counts), t)


@pytest.fixture(scope="module")
def grid96():
    return Grid((96, 96), 0.5, (-24.0, -24.0))


def test_meps_planar_matches_profile_levels(profile03, grid96):
    # for the exact planar wave, M_eps is the widest profile level set,
    # recovered to within one grid spacing
    cfg = planar_cfg(profile03.speed)
    rows = extract_interface_and_Meps(exact_field(cfg, profile03, grid96), cfg)
    for row in rows:
        eps = row["eps"]
        expected = max(abs(profile03.inverse(1.0 - eps)), profile03.inverse(eps))
        assert not row["censored"]
        assert abs(row["m_eps"] - expected) <= grid96.dx


def test_meps_monotone_in_eps(profile03, grid96):
    cfg = planar_cfg(profile03.speed)
    rows = extract_interface_and_Meps(exact_field(cfg, profile03, grid96), cfg)
    vals = [row["m_eps"] for row in rows]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_meps_indicator_is_zero(profile03, grid96):
    cfg = planar_cfg(profile03.speed)
    q = min_q(cfg, 0.0, grid96.points().reshape(-1, 2))
    ind = Field(grid96, (q < 0).astype(float).reshape(grid96.counts), 0.0)
    rows = extract_interface_and_Meps(ind, cfg)
    assert all(row["m_eps"] == 0.0 for row in rows)


def test_meps_censored_on_tiny_box(cfg_v, profile03):
    tiny = Grid((16, 16), 0.5, (-4.0, -4.0))
    rows = extract_interface_and_Meps(exact_field(cfg_v, profile03, tiny), cfg_v, eps_list=(0.01,))
    assert rows[0]["censored"]


def test_interface_pair_distance_is_normal_displacement(cfg_v, profile03):
    c = profile03.speed
    assert interface_pair_distance(cfg_v, 1.0, 5.0) == pytest.approx(4.0 * c, rel=1e-12)
    pl = planar_cfg(c)
    assert interface_pair_distance(pl, 0.0, 7.0) == pytest.approx(7.0 * c, rel=1e-12)


def test_mean_speed_estimate(cfg_v, profile03):
    c = profile03.speed
    ms = mean_speed_estimate(cfg_v, np.linspace(0.0, 50.0 / c, 9))
    assert abs(ms["gamma_hat"] - c) / c < 1e-10
    assert ms["far_pair_speed_min"] == pytest.approx(c, rel=1e-10)
    assert ms["far_pair_speed_max"] == pytest.approx(c, rel=1e-10)
    assert ms["n_pairs"] == 36


def test_mean_speed_input_validation(cfg_v, profile03):
    c = profile03.speed
    with pytest.raises(ValueError):
        mean_speed_estimate(cfg_v, np.linspace(0.0, 50.0 / c, 5))  # too few snapshots
    with pytest.raises(ValueError):
        mean_speed_estimate(cfg_v, np.linspace(0.0, 5.0 / c, 9))  # span too short


def test_half_level_cross_check_planar(profile03, grid96):
    cfg = planar_cfg(profile03.speed)
    out = half_level_cross_check(exact_field(cfg, profile03, grid96), cfg, profile=profile03)
    assert out["n_points"] > 0
    assert out["discrepancy"] <= 2 * grid96.dx
    assert out["median_offset"] == pytest.approx(profile03.inverse(0.5), abs=0.01)


def test_weighted_gap_zero_for_exact_lower(cfg_v, profile03, params03):
    g = Grid((64, 64), 1.0, (-32.0, -20.0))
    pts = g.points().reshape(-1, 2)
    traj = [
        Field(g, subsolution_lower(cfg_v, profile03, t, pts).reshape(64, 64), t)
        for t in np.linspace(0.0, 8.0, 5)
    ]
    rep = weighted_gap_report(traj, cfg_v, profile03, params03.v_star)
    assert rep["passed"]
    assert all(v == 0.0 for v in rep["curve"])


def test_weighted_gap_upper_barrier_far_bins(cfg_v, profile03, params03, barriers03):
    # (upper - lower) over the weight must fall below C* eps once the
    # smoothing scale 1/alpha is cleared; needs a wide coarse grid
    g = Grid((160, 120), 4.0, (-320.0, -140.0))
    pts = g.points().reshape(-1, 2)
    traj = [
        Field(g, barriers03.upper(t, pts).reshape(160, 120), t)
        for t in np.linspace(0.0, 8.0, 5)
    ]
    rep = weighted_gap_report(traj, cfg_v, profile03, params03.v_star, n_bins=10)
    assert rep["passed"]
    curve = rep["curve"]
    assert all(b <= a * (1 + 1e-3) + 1e-15 for a, b in zip(curve, curve[1:]))
    cap = 1.8278553487973894 * params03.epsilon
    assert curve[-1] <= cap
    assert curve[-2] <= cap


def test_sandwich_on_monotone_run(cfg_v, profile03, nl03, barriers03):
    c = profile03.speed
    g = Grid((64, 64), 0.5, (-16.0, -20.0))
    sc = SolverConfig(scheme="euler", cfl_safety=0.4)
    res = entire_solution(
        cfg_v, profile03, nl03, g, sc,
        n_list=[2.0 / c, 4.0 / c], window_end=1.0 / c, snapshot_dt=0.5 / c,
    )
    traj = [Field(g, v, t) for v, t in zip(res.v_hat, res.times)]
    out = sandwich_and_monotonicity(traj, cfg_v, profile03, barriers=barriers03)
    assert out["lower_violation"] <= 1e-8
    assert out["upper_violation"] <= 1e-8
    assert out["dudt_min"] >= -1e-12
    assert out["n_snapshots"] == len(traj)
    floors = out["tube_floors"]
    assert len(floors) == 3
    assert all(v > 0.0 for v in floors.values())
    # deeper tubes sit farther into the tails, so their floors are smaller
    vals = [floors[k] for k in sorted(floors, key=float)]
    assert vals[0] > vals[1] > vals[2]


def test_perturbation_values_bump(cfg_v, grid96):
    spec = PerturbationSpec(kind="bump", height=0.0125, radius=10.0)
    pv = perturbation_values(spec, cfg_v, grid96)
    assert pv.max() == pytest.approx(0.0125, rel=1e-12)
    assert np.all(pv >= 0.0)
    assert 0.0 < np.mean(pv > 0.0) < 1.0
    none = perturbation_values(PerturbationSpec(kind="none", height=0.0, radius=1.0), cfg_v, grid96)
    assert not none.any()


def test_perturbation_spec_validation():
    with pytest.raises(ValueError):
        PerturbationSpec(kind="wiggle", height=0.1, radius=2.0)
    with pytest.raises(ValueError):
        PerturbationSpec(kind="bump", height=0.1, radius=-2.0)


def test_admissibility_flags(cfg_v, profile03, params03, grid96):
    pts = grid96.points().reshape(-1, 2)
    u0 = subsolution_lower(cfg_v, profile03, 0.0, pts).reshape(grid96.counts)
    good = check_admissibility(u0, cfg_v, profile03, grid96, params03.v_star, rho0=10.0)
    assert good["ok"]
    below = check_admissibility(u0 - 0.01, cfg_v, profile03, grid96, params03.v_star, rho0=10.0)
    assert not below["ok"]
    assert below["below_subsolution"] >= 0.01 - 1e-12
    over = check_admissibility(np.minimum(u0 + 2.0, 3.0), cfg_v, profile03, grid96, params03.v_star, rho0=10.0)
    assert not over["ok"]
    assert over["out_of_range"] > 1e-12


def test_stability_zero_perturbation_is_exact(cfg_v, profile03, nl03, barriers03):
    c = profile03.speed
    g = Grid((96, 96), 0.5, (-24.0, -28.0))
    sc = SolverConfig(scheme="euler", cfl_safety=0.4)
    spec = PerturbationSpec(kind="none", height=0.0, radius=1.0)
    res = stability_run(cfg_v, profile03, nl03, g, sc, spec, t_end=4.0 / c,
                        snapshot_dt=1.0 / c, barriers=barriers03)
    # twin and perturbed runs are the same deterministic computation
    assert np.all(np.asarray(res.curve) == 0.0)
    assert res.passed


def test_stability_bump_decays(cfg_v, profile03, nl03, barriers03):
    c = profile03.speed
    g = Grid((96, 96), 0.5, (-24.0, -28.0))
    sc = SolverConfig(scheme="euler", cfl_safety=0.4)
    spec = PerturbationSpec(kind="bump", height=nl03.gamma_star / 2, radius=3.0 / c)
    res = stability_run(cfg_v, profile03, nl03, g, sc, spec, t_end=12.0 / c,
                        snapshot_dt=2.0 / c, barriers=barriers03)
    assert res.passed
    assert res.curve[0] == pytest.approx(nl03.gamma_star / 2, rel=1e-12)
    # transient amplification through the reaction zone, then decay
    assert res.final_gap == pytest.approx(6.097323243003272e-3, rel=1e-6)
    assert res.eventually_decreasing
    assert res.final_gap < res.curve[0]
    assert res.domination_min >= -1e-9
    assert res.envelope_ok
    assert res.admissibility["ok"]


def test_stability_rejects_far_field_perturbation(cfg_v, profile03, nl03, barriers03):
    # mass parked far from the front violates the weighted smallness bound
    c = profile03.speed
    g = Grid((96, 96), 0.5, (-24.0, -28.0))
    sc = SolverConfig(scheme="euler", cfl_safety=0.4)
    far = PerturbationSpec(kind="bump", height=0.4, radius=5.0, center=(10.0, 12.0))
    with pytest.raises(ValueError, match="inadmissible"):
        stability_run(cfg_v, profile03, nl03, g, sc, far, t_end=1.0 / c,
                      snapshot_dt=1.0 / c, barriers=barriers03, rho0=5.0)


def test_diagnostics_report_serialisation(tmp_path):
    rep = DiagnosticsReport()
    rep.add("speeds", {"gamma_hat": 0.26, "curve": [3.0, 2.0, 1.0]})
    rep.add("flags", {"passed": True})
    parsed = json.loads(rep.to_json())
    assert parsed["speeds"]["gamma_hat"] == 0.26
    assert parsed["flags"]["passed"] is True
    rep.write_csv_curves(tmp_path)
    csv = (tmp_path / "speeds_curve.csv").read_text().strip().splitlines()
    assert csv[0] == "index,curve"
    assert csv[1].startswith("0,")
    assert float(csv[-1].split(",")[1]) == 1.0
