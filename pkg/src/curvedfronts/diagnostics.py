"""Measurable checks of the front structure on simulated trajectories.

Turns the qualitative statements about curved fronts (sandwiching between
the barriers, monotonicity in time, interface localization M_eps, global
mean speed, weighted gap decay, stability under admissible perturbations)
into quantitative report sections over solver snapshots.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .barriers import BarrierSet
from .front_geometry import (FrontConfiguration, min_q, ridge_distance,
                             interface_distance, sample_interface,
                             spatial_ridge_distance)
from .nonlinearity import CombustionNonlinearity
from .rd_solver import (Grid, Field, SolverConfig, solve_cauchy, make_boundary,
                        subsolution_floor)
from .wave_profile import WaveProfile

__all__ = [
    "sandwich_and_monotonicity",
    "extract_interface_and_Meps",
    "half_level_cross_check",
    "interface_pair_distance",
    "mean_speed_estimate",
    "weighted_gap_report",
    "PerturbationSpec",
    "check_admissibility",
    "stability_run",
    "StabilityResult",
    "DiagnosticsReport",
]


def _as_snapshot_lists(trajectory):
    """Accept a list of Field or (times, values, grid) and normalize."""
    times = np.array([f.time for f in trajectory])
    values = [f.values for f in trajectory]
    grid = trajectory[0].grid
    return times, values, grid


def sandwich_and_monotonicity(trajectory, cfg: FrontConfiguration,
                              profile: WaveProfile,
                              barriers: BarrierSet | None = None,
                              rho_list=None) -> dict:
    """Barrier sandwich and time-monotonicity section.

    Reports max of (V_lower - u)+ and (u - V_upper)+ over all snapshots,
    the global min of the discrete du/dt, and the ridge-tube floors
    k_hat(rho).  The lower bound is evaluated through the same code path
    the solver floor uses, so an exactly floored run reports a zero lower
    violation.
    """
    times, values, grid = _as_snapshot_lists(trajectory)
    pts = grid.points().reshape(-1, grid.dimension)
    floor = subsolution_floor(cfg, profile, grid)
    if rho_list is None:
        rho_list = [2.0 / cfg.speed, 5.0 / cfg.speed, 10.0 / cfg.speed]

    lower_viol = 0.0
    upper_viol = 0.0
    for tk, vk in zip(times, values):
        lower_viol = max(lower_viol, float((floor(tk) - vk).max()))
        if barriers is not None:
            vbar = barriers.upper(np.full(pts.shape[0], tk), pts)
            upper_viol = max(upper_viol, float((vk.reshape(-1) - vbar).max()))

    dudt_min = np.inf
    tube_floor = {rho: np.inf for rho in rho_list}
    need_tube = cfg.n_waves >= 2
    for k in range(len(times) - 1):
        ta, tb = times[k], times[k + 1]
        rate = (values[k + 1] - values[k]) / (tb - ta)
        dudt_min = min(dudt_min, float(rate.min()))
        if need_tube:
            da = ridge_distance(cfg, np.full(pts.shape[0], ta), pts)
            db = ridge_distance(cfg, np.full(pts.shape[0], tb), pts)
            d = np.maximum(da, db).reshape(grid.counts)
            for rho in rho_list:
                inside = d <= rho
                if inside.any():
                    tube_floor[rho] = min(tube_floor[rho],
                                          float(rate[inside].min()))
    return {
        "lower_violation": lower_viol,
        "upper_violation": upper_viol,
        "dudt_min": dudt_min,
        "tube_floors": {f"{rho:.6g}": (v if np.isfinite(v) else None)
                        for rho, v in tube_floor.items()},
        "n_snapshots": len(times),
    }


def extract_interface_and_Meps(fld: Field, cfg: FrontConfiguration,
                               eps_list=(0.25, 0.1, 0.05, 0.02, 0.01)) -> list:
    """M_eps table from the exact geometric interface min_i q_i = 0.

    For each eps, M_eps is the smallest radius such that every burned-side
    point at distance >= M_eps has u >= 1-eps and every unburned-side
    point at distance >= M_eps has u <= eps.  Entries are censored when
    the radius reaches the box margin (the ball is no longer covered).
    """
    grid = fld.grid
    pts = grid.points().reshape(-1, grid.dimension)
    dist = interface_distance(cfg, fld.time, pts)
    side = min_q(cfg, fld.time, pts)    # < 0 burned, > 0 unburned
    u = fld.values.reshape(-1)

    burned = side < 0
    unburned = side > 0
    margin_b = float(dist[burned].max()) if burned.any() else 0.0
    margin_u = float(dist[unburned].max()) if unburned.any() else 0.0

    out = []
    for eps in sorted(eps_list, reverse=True):
        viol_b = burned & (u < 1.0 - eps)
        viol_u = unburned & (u > eps)
        m_b = float(dist[viol_b].max()) if viol_b.any() else 0.0
        m_u = float(dist[viol_u].max()) if viol_u.any() else 0.0
        # censored when the worst violator sits at that side's coverage edge
        censored = (viol_b.any() and m_b >= margin_b - grid.dx) or \
                   (viol_u.any() and m_u >= margin_u - grid.dx)
        out.append({"eps": float(eps), "m_eps": max(m_b, m_u),
                    "censored": bool(censored)})
    return out


def _half_level_points(fld: Field, level: float = 0.5) -> np.ndarray:
    """Linear-interpolated level-set crossings along grid lines (2D)."""
    g = fld.grid
    if g.dimension != 2:
        raise ValueError("half-level extraction implemented for 2D fields")
    u = fld.values
    x = g.axis(0)
    y = g.axis(1)
    pts = []
    for axis in (0, 1):
        a = u if axis == 0 else u.T
        c0, c1 = (x, y) if axis == 0 else (y, x)
        sgn = a - level
        hit = sgn[:-1, :] * sgn[1:, :] < 0
        i, j = np.nonzero(hit)
        frac = sgn[i, j] / (sgn[i, j] - sgn[i + 1, j])
        coord0 = c0[i] + frac * (c0[i + 1] - c0[i])
        coord1 = c1[j]
        p = np.stack([coord0, coord1], axis=-1)
        pts.append(p if axis == 0 else p[:, ::-1])
    if not pts:
        return np.empty((0, 2))
    return np.concatenate(pts, axis=0)


def half_level_cross_check(fld: Field, cfg: FrontConfiguration,
                           profile: WaveProfile | None = None,
                           interior_margin: float = 5.0,
                           exclude_ridge_radius: float | None = None) -> dict:
    """Discrepancy between the {u = 1/2} level set and the geometric one.

    The geometric interface is min q = 0; the half-level set sits at the
    profile's half-level offset U^{-1}(1/2) from it, so the comparison
    subtracts that offset before reporting the sup discrepancy.  Near the
    ridge the field genuinely bulges ahead of the polytope, so callers
    checking profile consistency exclude a ridge neighborhood.
    """
    pts = _half_level_points(fld)
    if pts.shape[0] == 0:
        raise ValueError("no half-level crossings inside the box")
    g = fld.grid
    lo = [g.origin[k] + interior_margin for k in range(2)]
    hi = [g.origin[k] + (g.counts[k] - 1) * g.dx - interior_margin
          for k in range(2)]
    keep = ((pts[:, 0] >= lo[0]) & (pts[:, 0] <= hi[0])
            & (pts[:, 1] >= lo[1]) & (pts[:, 1] <= hi[1]))
    pts = pts[keep]
    if exclude_ridge_radius is not None:
        far = spatial_ridge_distance(cfg, fld.time, pts) > exclude_ridge_radius
        pts = pts[far]
    if pts.shape[0] == 0:
        raise ValueError("no half-level crossings left after exclusions")
    t = np.full(pts.shape[0], fld.time)
    level_q = min_q(cfg, t, pts)
    out = {
        "n_points": int(pts.shape[0]),
        "median_offset": float(np.median(level_q)),
        "offset_spread": float(np.ptp(level_q)),
    }
    if profile is not None:
        out["discrepancy"] = float(
            np.max(np.abs(level_q - profile.inverse(0.5))))
    return out


def interface_pair_distance(cfg: FrontConfiguration, t: float, s: float,
                            n_points: int = 10000, half_width: float = 60.0,
                            rng=None) -> float:
    """Nearest-pair distance between the exact interfaces at times t and s.

    Dense boundary samples on one interface paired with the exact
    point-to-interface distance to the other; for the nested polytopes of
    a moving front this is the facet normal displacement c|t-s| (the apex
    regions are farther, so they never attain the minimum).
    """
    if rng is None:
        rng = np.random.default_rng(0)
    a = sample_interface(cfg, t, n_points=n_points, half_width=half_width,
                         rng=rng)
    b = sample_interface(cfg, s, n_points=n_points, half_width=half_width,
                         rng=rng)
    d_ab = interface_distance(cfg, s, a).min()
    d_ba = interface_distance(cfg, t, b).min()
    return float(max(d_ab, d_ba))


def mean_speed_estimate(cfg: FrontConfiguration, times,
                        n_points: int = 10000, half_width: float = 60.0,
                        seed: int = 0) -> dict:
    """Global mean speed from pairwise interface distances.

    Fits d(Gamma_t, Gamma_s)/|t-s| against 1/|t-s| and reports the
    intercept (the |t-s| -> infinity limit) plus the raw pair table.
    """
    times = sorted(float(t) for t in times)
    if len(times) < 8:
        raise ValueError(f"need at least 8 snapshots, got {len(times)}")
    span = times[-1] - times[0]
    if span < 10.0 / cfg.speed:
        raise ValueError(
            f"snapshot span {span:.3g} shorter than 10/c_f = {10.0 / cfg.speed:.3g}")
    rng = np.random.default_rng(seed)
    pairs = []
    for i in range(len(times)):
        for j in range(i + 1, len(times)):
            dt = times[j] - times[i]
            if dt == 0:
                continue
            d = interface_pair_distance(cfg, times[i], times[j],
                                        n_points=n_points,
                                        half_width=half_width, rng=rng)
            pairs.append((dt, d / dt))
    gaps = np.array([p[0] for p in pairs])
    speeds = np.array([p[1] for p in pairs])
    coeffs = np.polyfit(1.0 / gaps, speeds, 1)
    gamma_hat = float(coeffs[1])
    resid = float(np.max(np.abs(np.polyval(coeffs, 1.0 / gaps) - speeds)))
    far = gaps >= 10.0 / cfg.speed
    return {
        "gamma_hat": gamma_hat,
        "fit_residual": resid,
        "n_pairs": len(pairs),
        "sampling_points": n_points,
        "pair_gaps": gaps.tolist(),
        "pair_speeds": speeds.tolist(),
        "far_pair_speed_min": float(speeds[far].min()) if far.any() else None,
        "far_pair_speed_max": float(speeds[far].max()) if far.any() else None,
    }


def weighted_gap_report(trajectory, cfg: FrontConfiguration,
                        profile: WaveProfile, v_rate: float,
                        n_bins: int = 8, pass_level: float = 0.05) -> dict:
    """Sup of |u - V_lower| / weight per ridge-distance bin.

    The weight is min{1, exp(-v * min_i q_i/sin theta_i)}, which is 1 on
    the burned side and decays ahead of the front; the curve must decay
    to pass_level in the farthest bin for the transition-front gap bound.
    """
    cfg.require_ridges()
    times, values, grid = _as_snapshot_lists(trajectory)
    pts = grid.points().reshape(-1, grid.dimension)
    floor = subsolution_floor(cfg, profile, grid)

    all_d = []
    all_ratio = []
    sin = np.sin(cfg.angles)
    for tk, vk in zip(times, values):
        tvec = np.full(pts.shape[0], tk)
        q = pts @ cfg.directions.T - cfg.speed * tvec[:, None] + cfg.shifts
        slab = (q / sin).min(axis=1)
        weight = np.minimum(1.0, np.exp(-v_rate * slab))
        gap = np.abs(vk.reshape(-1) - floor(tk).reshape(-1))
        all_d.append(ridge_distance(cfg, tvec, pts))
        all_ratio.append(gap / weight)
    d = np.concatenate(all_d)
    ratio = np.concatenate(all_ratio)
    edges = np.linspace(0.0, d.max() * (1 + 1e-12), n_bins + 1)
    curve = []
    for k in range(n_bins):
        inside = (d >= edges[k]) & (d < edges[k + 1])
        curve.append(float(ratio[inside].max()) if inside.any() else 0.0)
    # nonincreasing up to a small relative wiggle: discretization drift puts
    # mid-range bins on a near-flat plateau
    decreasing = all(curve[k + 1] <= curve[k] * (1.0 + 1e-3) + 1e-15
                     for k in range(len(curve) - 1))
    return {
        "bin_edges": edges.tolist(),
        "curve": curve,
        "v_rate": v_rate,
        "farthest_bin_sup": curve[-1],
        "decreasing": decreasing,
        "passed": bool(decreasing and curve[-1] <= pass_level),
    }


@dataclass(frozen=True)
class PerturbationSpec:
    """Initial disturbance added on top of the subsolution."""

    kind: str = "bump"            # "bump" or "none"
    height: float = 0.0
    radius: float = 1.0
    center: tuple | None = None   # defaults to a point on the t=0 ridge

    def __post_init__(self):
        if self.kind not in ("bump", "none"):
            raise ValueError(f"unknown perturbation kind {self.kind!r}")
        if self.kind == "bump" and self.radius <= 0:
            raise ValueError("bump radius must be positive")


def _ridge_point(cfg: FrontConfiguration, t: float) -> np.ndarray:
    """A point on the spatial ridge at time t (least-squares corner)."""
    cfg.require_ridges()
    rhs = cfg.speed * t - cfg.shifts
    z, *_ = np.linalg.lstsq(cfg.directions, rhs, rcond=None)
    return z


def perturbation_values(spec: PerturbationSpec, cfg: FrontConfiguration,
                        grid: Grid) -> np.ndarray:
    if spec.kind == "none":
        return np.zeros(grid.counts)
    center = np.asarray(spec.center, dtype=float) if spec.center is not None \
        else _ridge_point(cfg, 0.0)
    pts = grid.points()
    r = np.sqrt(((pts - center) ** 2).sum(axis=-1)) / spec.radius
    out = np.zeros(grid.counts)
    inside = r < 1.0
    out[inside] = spec.height * np.exp(1.0 - 1.0 / (1.0 - r[inside] ** 2))
    return out


def check_admissibility(u0: np.ndarray, cfg: FrontConfiguration,
                        profile: WaveProfile, grid: Grid, v_rate: float,
                        rho0: float, n_samples: int = 1000,
                        ratio_tol: float = 0.1, seed: int = 0) -> dict:
    """Initial-data admissibility: above the subsolution, inside [0,1],
    and weighted-small beyond ridge distance rho0."""
    floor = subsolution_floor(cfg, profile, grid)
    vlow = floor(0.0)
    below = float((vlow - u0).max())
    out_of_range = float(max(-u0.min(), u0.max() - 1.0))

    rng = np.random.default_rng(seed)
    pts_all = grid.points().reshape(-1, grid.dimension)
    pert = (u0 - vlow).reshape(-1)
    t0 = np.zeros(pts_all.shape[0])
    d = ridge_distance(cfg, t0, pts_all)
    far = np.nonzero(d > rho0)[0]
    if far.size > n_samples:
        far = rng.choice(far, size=n_samples, replace=False)
    sin = np.sin(cfg.angles)
    q = pts_all[far] @ cfg.directions.T + cfg.shifts
    slab = (q / sin).min(axis=1)
    weight = np.minimum(1.0, np.exp(-v_rate * slab))
    worst_ratio = float((pert[far] / weight).max()) if far.size else 0.0

    ok = below <= 1e-12 and out_of_range <= 1e-12 and worst_ratio <= ratio_tol
    return {
        "ok": bool(ok),
        "below_subsolution": below,
        "out_of_range": out_of_range,
        "worst_far_ratio": worst_ratio,
        "rho0": rho0,
        "n_far_samples": int(far.size),
    }


@dataclass
class StabilityResult:
    times: np.ndarray
    curve: np.ndarray                 # sup |u - twin| per snapshot
    passed: bool
    final_gap: float
    eventually_decreasing: bool
    admissibility: dict
    domination_min: float | None      # min over snapshots of min(W - u)
    envelope_ok: bool | None
    envelope_slack_min: float | None
    report: dict = field(default_factory=dict)


def stability_run(cfg: FrontConfiguration, profile: WaveProfile,
                  nl: CombustionNonlinearity, grid: Grid,
                  config: SolverConfig, perturbation: PerturbationSpec,
                  t_end: float, snapshot_dt: float,
                  barriers: BarrierSet | None = None,
                  v_rate: float | None = None, rho0: float | None = None,
                  gap_tol: float = 1e-2) -> StabilityResult:
    """Perturbation decay against the unperturbed twin trajectory.

    The comparison target is the twin run from the same subsolution start:
    the discrete Cauchy iterates approach the entire solution so slowly
    near the ridge that a deeper-started reference would contaminate the
    curve with iteration non-convergence; the twin isolates exactly the
    fate of the perturbation, which is what the stability statement is
    about.  With barriers given, the shifted supersolution is checked to
    dominate the perturbed run at every snapshot and the envelope bound
    is evaluated.
    """
    if v_rate is None:
        v_rate = barriers.params.v_star if barriers is not None and \
            barriers.params.v_star is not None else 1e-4
    if rho0 is None:
        rho0 = perturbation.radius if perturbation.kind == "bump" else 1.0

    floor = subsolution_floor(cfg, profile, grid)
    pert = perturbation_values(perturbation, cfg, grid)
    vlow0 = floor(0.0)
    # cap inside [V_lower, 1]; the stated bound is min{1 - V_lower, ...}
    pert = np.minimum(pert, 1.0 - vlow0)
    u0 = vlow0 + pert

    adm = check_admissibility(u0, cfg, profile, grid, v_rate, rho0)
    if not adm["ok"]:
        raise ValueError(f"inadmissible perturbation: {adm}")

    boundary = make_boundary("dirichlet-lower", cfg, profile)
    twin = solve_cauchy(Field(grid, vlow0, 0.0), nl, boundary, config, t_end,
                        snapshot_dt=snapshot_dt, floor=floor)
    pert_run = solve_cauchy(Field(grid, u0, 0.0), nl, boundary, config, t_end,
                            snapshot_dt=snapshot_dt, floor=floor)

    times = np.array([s.time for s in twin])
    curve = np.array([float(np.max(np.abs(a.values - b.values)))
                      for a, b in zip(pert_run, twin)])
    final_gap = float(curve[-1])
    peak = int(np.argmax(curve))
    slack = 1e-9 * max(1.0, float(curve[peak]))
    eventually_decreasing = bool(
        peak < len(curve) - 1 and np.all(np.diff(curve[peak:]) <= slack))
    passed = bool(final_gap <= gap_tol and eventually_decreasing)

    domination_min = None
    envelope_ok = None
    envelope_slack_min = None
    if barriers is not None:
        pts = grid.points().reshape(-1, grid.dimension)
        dom = np.inf
        slack = np.inf
        p = barriers.params
        dvhat_sup = 0.0
        for k in range(len(times) - 1):
            dvhat_sup = max(dvhat_sup, float(np.max(np.abs(
                twin[k + 1].values - twin[k].values)) / (times[k + 1] - times[k])))
        for k, (snap, tw) in enumerate(zip(pert_run, twin)):
            tvec = np.full(pts.shape[0], snap.time)
            w = barriers.time_upper(tvec, pts)
            dom = min(dom, float((w - snap.values.reshape(-1)).min()))
            vbar_shift = barriers.upper(
                np.full(pts.shape[0], barriers.shift_time(snap.time)), pts)
            envelope = (p.delta * np.exp(-p.lam * snap.time)
                        + float(np.max(np.abs(vbar_shift - tw.values.reshape(-1))))
                        + p.varrho * p.delta * dvhat_sup)
            slack = min(slack, envelope - curve[k])
        domination_min = float(dom)
        envelope_slack_min = float(slack)
        envelope_ok = bool(slack >= 0.0)

    return StabilityResult(
        times=times, curve=curve, passed=passed, final_gap=final_gap,
        eventually_decreasing=eventually_decreasing, admissibility=adm,
        domination_min=domination_min, envelope_ok=envelope_ok,
        envelope_slack_min=envelope_slack_min,
        report={
            "gap_tol": gap_tol,
            "t_end": t_end,
            "initial_gap": float(curve[0]),
            "v_rate": v_rate,
            "rho0": rho0,
        })


@dataclass
class DiagnosticsReport:
    """Aggregated report sections; values must all be finite."""

    sections: dict = field(default_factory=dict)

    def add(self, name: str, section) -> None:
        self.sections[name] = section

    def to_json(self, indent: int = 2) -> str:
        def default(o):
            if isinstance(o, np.ndarray):
                return o.tolist()
            if isinstance(o, (np.floating, np.integer)):
                return o.item()
            if hasattr(o, "__dict__"):
                return {k: v for k, v in o.__dict__.items()
                        if not k.startswith("_")}
            raise TypeError(f"not serializable: {type(o)}")
        return json.dumps(self.sections, indent=indent, default=default)

    def write_csv_curves(self, out_dir) -> list:
        """One flat CSV per curve-like section entry; returns paths."""
        import csv
        import os
        written = []
        for name, section in self.sections.items():
            if not isinstance(section, dict):
                continue
            for key, val in section.items():
                if isinstance(val, (list, np.ndarray)) and len(val) and \
                        isinstance(np.asarray(val).flat[0], (float, np.floating)):
                    path = os.path.join(out_dir, f"{name}_{key}.csv")
                    with open(path, "w", newline="") as fh:
                        writer = csv.writer(fh)
                        writer.writerow(["index", key])
                        for i, x in enumerate(np.asarray(val).reshape(-1)):
                            writer.writerow([i, repr(float(x))])
                    written.append(path)
        return written
