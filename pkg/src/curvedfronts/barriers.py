"""Explicit super- and subsolution barriers around a polytope front.

The upper barrier combines the planar profile evaluated across the smoothed
hypersurface with a curvature correction proportional to the flatness h:

    V_up = min{ U(xi) + eps * h * [U^beta(eta) w(eta) + (1 - w(eta))], 1 },

where eta = y - phi_alpha(t, x) is the vertical offset from the sharpened
surface, xi = eta / sqrt(1 + |grad phi|^2) its normal-ish rescaling, and
w a smooth switch.  The time-shifted variant adds a decaying layer
delta * e^(-lambda t) of the same tail shape, with the time argument bent
by pi(t) = t - rho delta e^(-lambda t) + rho delta.

Whether a concrete parameter set actually yields a supersolution is decided
numerically: residuals of L v = v_t - Lap v - f(v) are sampled densely with
high-order finite differences and certified against a fixed tolerance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict

import numpy as np

from .front_geometry import FrontConfiguration, min_q, ridge_distance
from .hypersurface import ScaledSurface, fit_surface_constants
from .nonlinearity import CombustionNonlinearity
from .wave_profile import WaveProfile

__all__ = [
    "mollifier_omega",
    "BarrierParams",
    "BarrierSet",
    "BarrierSampleSpec",
    "ValidationReport",
    "case_thresholds",
    "parabolic_residual",
    "validate_parameters",
    "fit_time_term_constant",
    "auto_parameters",
]

RESIDUAL_TOL = -1e-8
# 4th-order stencils at this step keep FD truncation ~1e-10 and round-off
# amplification ~5e-11, both well under |RESIDUAL_TOL|; a smaller step with
# 2nd-order stencils would drown the tolerance in round-off noise.
DEFAULT_FD_STEP = 5e-3
CLAMP_GUARD = 1.0 - 2.0**-46


def mollifier_omega(s):
    """Smooth switch: 0 for s <= -1, 1 for s >= 1, strictly increasing
    between.  Returns (omega, omega', omega'').

    Built from rho(r) = exp(-1/r) as rho((s+1)/2) / (rho((s+1)/2) +
    rho((1-s)/2)), which collapses to the logistic of
    g(s) = 2/(1-s) - 2/(1+s); derivatives follow by the chain rule.
    """
    s_in = np.asarray(s, dtype=float)
    scalar = s_in.ndim == 0
    s_arr = np.atleast_1d(s_in)
    w = np.where(s_arr >= 1.0, 1.0, 0.0)
    w1 = np.zeros_like(s_arr)
    w2 = np.zeros_like(s_arr)
    inside = (s_arr > -1.0) & (s_arr < 1.0)
    if np.any(inside):
        si = s_arr[inside]
        um = 1.0 - si
        up = 1.0 + si
        g = 2.0 / um - 2.0 / up
        # logistic evaluated stably on both signs of g
        eg = np.exp(-np.abs(g))
        wi = np.where(g >= 0, 1.0 / (1.0 + eg), eg / (1.0 + eg))
        g1 = 2.0 / um**2 + 2.0 / up**2
        g2 = 4.0 / um**3 - 4.0 / up**3
        p = wi * (1.0 - wi)
        w[inside] = wi
        w1[inside] = p * g1
        w2[inside] = p * (1.0 - 2.0 * wi) * g1**2 + p * g2
    if scalar:
        return float(w[0]), float(w1[0]), float(w2[0])
    return w, w1, w2


@dataclass(frozen=True)
class BarrierParams:
    """Parameters of the barrier pair plus fitted metadata.

    The six leading fields define the barriers; the remaining entries
    record how the automatic schedule derived them and are carried along
    for reporting.
    """

    epsilon: float
    alpha: float
    beta: float
    delta: float
    lam: float
    varrho: float
    beta_star: float | None = None
    v_star: float | None = None
    kappa: float | None = None
    x_prime: float | None = None
    x_double_prime: float | None = None
    c_hat: float | None = None
    c1_hat: float | None = None
    c_star_time: float | None = None

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        for name in ("alpha", "beta", "delta", "lam", "varrho"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def as_dict(self) -> dict:
        return asdict(self)


def check_invariants(params: BarrierParams, nl: CombustionNonlinearity,
                     profile: WaveProfile, max_cot: float,
                     c1_hat: float) -> None:
    """Raise with all violated schedule constraints listed."""
    g = nl.gamma_star
    c = profile.speed
    beta_star = beta_star_bound(c1_hat, max_cot)
    problems = []
    if not 0 < params.epsilon <= g / 6:
        problems.append(f"epsilon={params.epsilon} outside (0, gamma_star/6={g / 6:.3e}]")
    if not 0 < params.beta <= beta_star:
        problems.append(f"beta={params.beta} outside (0, beta_star={beta_star:.3e}]")
    if not 0 < params.delta <= g / 8:
        problems.append(f"delta={params.delta} outside (0, gamma_star/8={g / 8:.3e}]")
    lam_cap = min(-nl.fprime_at_one / 4, params.beta * c * c / 16)
    if not 0 < params.lam < lam_cap:
        problems.append(f"lam={params.lam} outside (0, {lam_cap:.3e})")
    if problems:
        raise ValueError("barrier parameter invariants violated: " + "; ".join(problems))


def beta_star_bound(c1_hat: float, max_cot: float) -> float:
    """Largest admissible tail exponent for the fitted surface constants."""
    base = (c1_hat + max_cot) ** 2 + 1.0
    return min(1.0 / (4.0 * base), 1.0 / (4.0 * np.sqrt(base)))


class BarrierSet:
    """Evaluates the barrier pair for one front configuration."""

    def __init__(self, cfg: FrontConfiguration, profile: WaveProfile,
                 nl: CombustionNonlinearity, params: BarrierParams):
        if abs(cfg.speed - profile.speed) > 1e-9 * max(1.0, profile.speed):
            raise ValueError("front configuration speed disagrees with the profile speed")
        self.cfg = cfg
        self.profile = profile
        self.nl = nl
        self.params = params
        self.surface = ScaledSurface(cfg, params.alpha)

    def _split(self, z):
        z = np.asarray(z, dtype=float)
        return z[..., :-1], z[..., -1]

    def eta_xi(self, t, z):
        """Vertical offset from the sharpened surface and its rescaling."""
        x, y = self._split(z)
        a = self.params.alpha
        t = np.asarray(t, dtype=float)
        phi = self.surface.solve_phi(a * t, a * x)
        grad = self.surface.derivatives(a * t, a * x, phi=phi).grad
        eta = y - phi / a
        xi = eta / np.sqrt(1.0 + np.sum(grad * grad, axis=-1))
        return eta, xi

    def tail_weight(self, eta):
        """U^beta(eta) w(eta) + (1 - w(eta)) in [0, 1]."""
        w, _, _ = mollifier_omega(eta)
        return self.profile.u_pow(eta, self.params.beta) * w + (1.0 - w)

    def flatness_at(self, t, z):
        x, _ = self._split(z)
        a = self.params.alpha
        return self.surface.flatness(a * np.asarray(t, dtype=float), a * x)

    def lower(self, t, z):
        """Subsolution: max of the planar fronts, U(min_i q_i)."""
        return self.profile(min_q(self.cfg, t, z))

    def upper(self, t, z):
        """Supersolution V_up (clamped at 1)."""
        x, _ = self._split(z)
        a = self.params.alpha
        t = np.asarray(t, dtype=float)
        phi = self.surface.solve_phi(a * t, a * x)
        eta = np.asarray(z, dtype=float)[..., -1] - phi / a
        grad = self.surface.derivatives(a * t, a * x, phi=phi).grad
        xi = eta / np.sqrt(1.0 + np.sum(grad * grad, axis=-1))
        h = self.surface.flatness(a * t, a * x, phi=phi)
        body = self.profile(xi) + self.params.epsilon * h * self.tail_weight(eta)
        return np.minimum(body, 1.0)

    def shift_time(self, t):
        """pi(t) = t - rho delta e^(-lambda t) + rho delta; pi(0) = 0."""
        t = np.asarray(t, dtype=float)
        rd = self.params.varrho * self.params.delta
        return t - rd * np.exp(-self.params.lam * t) + rd

    def time_upper(self, t, z):
        """Time-shifted supersolution W_delta for t >= 0."""
        t = np.asarray(t, dtype=float)
        pi_t = self.shift_time(t)
        eta, _ = self.eta_xi(pi_t, z)
        layer = self.params.delta * np.exp(-self.params.lam * t) * self.tail_weight(eta)
        return np.minimum(self.upper(pi_t, z) + layer, 1.0)


# -- residual certification -------------------------------------------------


def parabolic_residual(field_fn, nl: CombustionNonlinearity, t, z,
                       h_fd: float = DEFAULT_FD_STEP):
    """Sampled residual L v = v_t - Lap v - f(v) by 4th-order stencils.

    field_fn(t, z) must accept arrays of shape (...,) and (..., N).
    Returns (residual, excluded) where excluded marks samples whose stencil
    touches the clamp v >= 1 (the min with 1 kinks the field there, so the
    finite differences are not trustworthy and the residual claim does not
    apply anyway).
    """
    t = np.asarray(t, dtype=float)
    z = np.asarray(z, dtype=float)
    npts, ndim = z.shape
    shifts = np.array([-2.0, -1.0, 1.0, 2.0]) * h_fd
    # first-derivative and second-derivative weights on [-2h,-h,0,h,2h]
    d1 = np.array([1.0, -8.0, 8.0, -1.0]) / (12.0 * h_fd)
    d2_off = np.array([-1.0, 16.0, 16.0, -1.0]) / (12.0 * h_fd**2)
    d2_center = -30.0 / (12.0 * h_fd**2)

    t_all = [t]
    z_all = [z]
    for s in shifts:
        t_all.append(t + s)
        z_all.append(z)
    for k in range(ndim):
        for s in shifts:
            zk = z.copy()
            zk[:, k] += s
            t_all.append(t)
            z_all.append(zk)
    vals = field_fn(np.concatenate(t_all), np.concatenate(z_all, axis=0))
    vals = vals.reshape(1 + 4 + 4 * ndim, npts)

    center = vals[0]
    v_t = vals[1:5].T @ d1
    lap = np.zeros(npts)
    for k in range(ndim):
        block = vals[5 + 4 * k: 9 + 4 * k]
        lap += block.T @ d2_off + d2_center * center
    residual = v_t - lap - nl(center)
    excluded = np.max(vals, axis=0) >= CLAMP_GUARD
    return residual, excluded


@dataclass(frozen=True)
class BarrierSampleSpec:
    """Sampling plan for residual certification.

    Offsets are measured from the sharpened surface, so the eta-cases are
    covered evenly; time and horizontal position range over a box.
    """

    n_samples: int = 100_000
    t_range: tuple = (-6.0, 6.0)
    x_half_width: float = 30.0
    offset_range: tuple = (-22.0, 22.0)
    w_t_range: tuple = (0.05, 8.0)
    fd_step: float = DEFAULT_FD_STEP
    seed: int = 0


@dataclass
class ValidationReport:
    """Outcome of residual certification for one parameter set."""

    passed: bool
    params: dict
    min_residual_upper: float
    min_residual_time: float
    cases_upper: dict
    cases_time: dict
    excluded_upper: int
    excluded_time: int
    sandwich_min: float
    time_vs_upper_at_zero_min: float
    richardson_gap: float
    richardson_ok: bool
    x_prime: float
    x_double_prime: float
    kappa: float
    v_star: float
    c_star_fit: float
    clearance_radius: float
    worst_point_upper: list = field(default_factory=list)
    worst_ridge_distance: float = float("nan")
    fd_step: float = DEFAULT_FD_STEP
    notes: str = ""

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(asdict(self), indent=indent)


def case_thresholds(profile: WaveProfile, nl: CombustionNonlinearity,
                    epsilon: float, max_cot: float):
    """Smallest eta-thresholds (X', X'') splitting the residual samples.

    Beyond X' the barrier sits in the reaction-free tail (values under the
    ignition cutoff even with the correction term); below -X'' everything is
    inside the derivative sandwich near 1.  kappa is the worst profile slope
    between them; it feeds the time-shift gain.
    """
    g = nl.gamma_star
    gmax = np.sqrt(1.0 + max_cot**2)
    lo = min(2.0 * g - epsilon, nl.theta)
    x_prime = gmax * profile.inverse(lo)
    x_double_prime = -gmax * profile.inverse(1.0 - 2.0 * g)
    x_prime = max(1.25, 0.25 * np.ceil(x_prime / 0.25))
    x_double_prime = max(1.25, 0.25 * np.ceil(x_double_prime / 0.25))
    grid = np.linspace(-x_double_prime, x_prime, 4001)
    kappa = float(np.min(np.abs(profile.derivative(grid))))
    return float(x_prime), float(x_double_prime), kappa


def v_star_schedule(profile: WaveProfile, cfg: FrontConfiguration,
                    alpha: float, beta: float, c_hat: float,
                    max_cot: float) -> float:
    """Decay rate for the weighted-gap bound, halved for safety."""
    c = profile.speed
    cands = [
        alpha * profile.beta0 / 2.0,
        (c / 2.0) * min(float(np.min(np.sin(cfg.angles))), alpha * beta, alpha,
                        alpha / np.sqrt(1.0 + (c_hat + max_cot) ** 2)),
    ]
    return 0.5 * min(cands)


def fit_time_term_constant(barriers: BarrierSet,
                           spec: BarrierSampleSpec, n: int = 20000) -> float:
    """Bound on -(d_t - Lap) of the tail layer, fitted by sampling.

    The time-shifted barrier needs (d_t - Lap)(e^(-lam t) g) >= -(lam + C*)
    e^(-lam t) with g the tail weight; since 0 <= g <= 1 it suffices to bound
    -(d_t - Lap) g.  The time-bending factor pi'(t) stays in [1, 2] under the
    rho*delta*lam <= 1 cap, hence the factor 2 on the fitted minimum.
    """
    rng = np.random.default_rng(spec.seed + 1)
    m = barriers.cfg.dimension - 1
    t = rng.uniform(*spec.t_range, size=n)
    x = rng.uniform(-spec.x_half_width, spec.x_half_width, size=(n, m))
    off = rng.uniform(*spec.offset_range, size=n)
    a = barriers.params.alpha
    y = barriers.surface.solve_phi(a * t, a * x) / a + off
    z = np.concatenate([x, y[:, None]], axis=1)

    def g_field(tq, zq):
        eta, _ = barriers.eta_xi(tq, zq)
        return barriers.tail_weight(eta)

    t_all = [t]
    z_all = [z]
    h = spec.fd_step
    shifts = np.array([-2.0, -1.0, 1.0, 2.0]) * h
    d1 = np.array([1.0, -8.0, 8.0, -1.0]) / (12.0 * h)
    d2_off = np.array([-1.0, 16.0, 16.0, -1.0]) / (12.0 * h**2)
    d2_center = -30.0 / (12.0 * h**2)
    for s in shifts:
        t_all.append(t + s)
        z_all.append(z)
    for k in range(z.shape[1]):
        for s in shifts:
            zk = z.copy()
            zk[:, k] += s
            t_all.append(t)
            z_all.append(zk)
    vals = g_field(np.concatenate(t_all), np.concatenate(z_all, axis=0))
    vals = vals.reshape(1 + 4 + 4 * z.shape[1], n)
    g_t = vals[1:5].T @ d1
    lap = np.zeros(n)
    for k in range(z.shape[1]):
        lap += vals[5 + 4 * k: 9 + 4 * k].T @ d2_off + d2_center * vals[0]
    worst = float(np.min(g_t - lap))
    return 2.0 * max(0.0, -worst)


def _stratify(residual, excluded, eta, x_prime, x_double_prime, tol):
    cases = {}
    masks = {
        "ahead": eta > x_prime,
        "behind": eta < -x_double_prime,
        "middle": (eta >= -x_double_prime) & (eta <= x_prime),
    }
    for name, mask in masks.items():
        keep = mask & ~excluded
        if np.any(keep):
            r = residual[keep]
            cases[name] = {
                "count": int(np.sum(keep)),
                "min_residual": float(np.min(r)),
                "passed": bool(np.min(r) >= tol),
            }
        else:
            cases[name] = {"count": 0, "min_residual": float("nan"), "passed": True}
    return cases


def validate_parameters(cfg: FrontConfiguration, profile: WaveProfile,
                        nl: CombustionNonlinearity, params: BarrierParams,
                        spec: BarrierSampleSpec | None = None,
                        include_time_barrier: bool = True) -> ValidationReport:
    """Certify a parameter set by dense residual sampling.

    PASS means: the parabolic residual of the upper barrier is >= -1e-8 on
    every non-excluded sample (stratified into the three eta-cases), the
    same holds for the time-shifted barrier on t >= 0, the upper barrier
    never drops below the lower one, and the step-halved residuals agree
    with the primary ones (the finite differences are converged).
    """
    if spec is None:
        spec = BarrierSampleSpec()
    barriers = BarrierSet(cfg, profile, nl, params)
    rng = np.random.default_rng(spec.seed)
    m = cfg.dimension - 1
    a = params.alpha
    max_cot = float(np.max(1.0 / np.tan(cfg.angles)))
    x_prime, x_double_prime, kappa = case_thresholds(profile, nl, params.epsilon, max_cot)

    def sample_points(n, t_lo, t_hi, seed_offset=0):
        r = np.random.default_rng(spec.seed + seed_offset)
        t = r.uniform(t_lo, t_hi, size=n)
        x = r.uniform(-spec.x_half_width, spec.x_half_width, size=(n, m))
        off = r.uniform(*spec.offset_range, size=n)
        y = barriers.surface.solve_phi(a * t, a * x) / a + off
        return t, np.concatenate([x, y[:, None]], axis=1), off

    def upper_field(tq, zq):
        return barriers.upper(tq, zq)

    def time_field(tq, zq):
        return barriers.time_upper(tq, zq)

    # upper barrier residuals
    t_u, z_u, eta_u = sample_points(spec.n_samples, *spec.t_range)
    res_u, exc_u = parabolic_residual(upper_field, nl, t_u, z_u, spec.fd_step)
    cases_u = _stratify(res_u, exc_u, eta_u, x_prime, x_double_prime, RESIDUAL_TOL)
    live_u = ~exc_u
    min_u = float(np.min(res_u[live_u])) if np.any(live_u) else float("nan")
    order = np.argsort(np.where(live_u, res_u, np.inf))
    worst_idx = order[: min(512, int(np.sum(live_u)))]
    res_half, exc_half = parabolic_residual(upper_field, nl, t_u[worst_idx],
                                            z_u[worst_idx], spec.fd_step / 2.0)
    both = ~exc_half
    richardson_gap = float(np.max(np.abs(res_half[both] - res_u[worst_idx][both]))) if np.any(both) else 0.0
    richardson_ok = richardson_gap <= 10.0 * abs(RESIDUAL_TOL)
    i_worst = int(order[0])
    worst_point = [float(t_u[i_worst])] + [float(v) for v in z_u[i_worst]]
    worst_rd = float(ridge_distance(cfg, t_u[i_worst], z_u[i_worst])) if cfg.n_waves >= 2 else float("nan")

    # ordering against the lower barrier, on the residual samples plus a
    # uniform-height batch for coverage away from the surface
    v_up = barriers.upper(t_u, z_u)
    v_lo = barriers.lower(t_u, z_u)
    sandwich_min = float(np.min(v_up - v_lo))
    t_e, z_e, _ = sample_points(spec.n_samples // 4, *spec.t_range, seed_offset=7)
    z_e[:, -1] = rng.uniform(z_e[:, -1].min(), z_e[:, -1].max(), size=z_e.shape[0])
    sandwich_min = min(sandwich_min,
                       float(np.min(barriers.upper(t_e, z_e) - barriers.lower(t_e, z_e))))

    # weighted gap: fitted decay constant and the 2-eps clearance radius
    v_star = v_star_schedule(profile, cfg, params.alpha, params.beta,
                             params.c_hat if params.c_hat is not None else 1.0, max_cot)
    gap = v_up - v_lo
    if cfg.n_waves >= 2:
        rd = ridge_distance(cfg, t_u, z_u)
        radius_grid = np.arange(1.0, max(2.0, np.max(rd)), 1.0)
        clearance = float("inf")
        for r0 in radius_grid:
            far = rd >= r0
            if np.any(far) and np.max(gap[far]) <= 2.0 * params.epsilon:
                clearance = float(r0)
                break
        far = rd >= (clearance if np.isfinite(clearance) else np.median(rd))
        slab = np.min(
            np.asarray(z_u) @ np.concatenate([
                (cfg.nus / np.tan(cfg.angles)[:, None]).T,
                np.ones((1, cfg.n_waves))], axis=0)
            - (profile.speed / np.sin(cfg.angles)) * t_u[:, None]
            + cfg.shifts / np.sin(cfg.angles), axis=1)
        weight = np.minimum(1.0, np.exp(-2.0 * v_star * slab))
        ratio = gap / weight
        c_star_fit = float(np.max(ratio[far]) / params.epsilon) if np.any(far) else float("nan")
    else:
        clearance = 0.0
        c_star_fit = float(np.max(gap) / params.epsilon) if params.epsilon > 0 else 0.0

    # time-shifted barrier on t >= 0
    if include_time_barrier:
        t_w, z_w, _ = sample_points(spec.n_samples // 2,
                                    max(spec.w_t_range[0], 2.5 * spec.fd_step),
                                    spec.w_t_range[1], seed_offset=13)
        res_w, exc_w = parabolic_residual(time_field, nl, t_w, z_w, spec.fd_step)
        eta_w, _ = barriers.eta_xi(barriers.shift_time(t_w), z_w)
        cases_w = _stratify(res_w, exc_w, eta_w, x_prime, x_double_prime, RESIDUAL_TOL)
        live_w = ~exc_w
        min_w = float(np.min(res_w[live_w])) if np.any(live_w) else float("nan")
        exc_w_count = int(np.sum(exc_w))
        # W at t=0 sits on or above the plain barrier
        t0 = np.zeros(min(4000, spec.n_samples // 8))
        _, z0, _ = sample_points(t0.shape[0], 0.0, 0.0, seed_offset=29)
        w0_margin = float(np.min(barriers.time_upper(t0, z0) - barriers.upper(t0, z0)))
    else:
        cases_w = {}
        min_w = float("nan")
        exc_w_count = 0
        w0_margin = float("nan")

    passed = bool(
        min_u >= RESIDUAL_TOL
        and (not include_time_barrier or min_w >= RESIDUAL_TOL)
        and sandwich_min >= 0.0
        and richardson_ok
    )
    return ValidationReport(
        passed=passed,
        params=params.as_dict(),
        min_residual_upper=min_u,
        min_residual_time=min_w,
        cases_upper=cases_u,
        cases_time=cases_w,
        excluded_upper=int(np.sum(exc_u)),
        excluded_time=exc_w_count,
        sandwich_min=sandwich_min,
        time_vs_upper_at_zero_min=w0_margin,
        richardson_gap=richardson_gap,
        richardson_ok=richardson_ok,
        x_prime=x_prime,
        x_double_prime=x_double_prime,
        kappa=kappa,
        v_star=v_star,
        c_star_fit=c_star_fit,
        clearance_radius=clearance,
        worst_point_upper=worst_point,
        worst_ridge_distance=worst_rd,
        fd_step=spec.fd_step,
    )


def auto_parameters(cfg: FrontConfiguration, profile: WaveProfile,
                    nl: CombustionNonlinearity,
                    alpha_ladder=(0.4, 0.2, 0.1, 0.05, 0.025),
                    pilot_samples: int = 20000, seed: int = 0) -> BarrierParams:
    """Concrete certified barrier parameters for a configuration.

    Fits the surface comparison constants, takes the largest admissible
    tail exponent and a conservative amplitude, then walks alpha down a
    ladder until a pilot residual certification passes, stepping one extra
    rung for safety.  The time-shift gain follows the explicit recipe
    rho = 3 (||f'|| + lam + C*) / (lam kappa c_f) with the fitted C*, and
    delta is capped so that rho * delta * lam <= 1.
    """
    fit = fit_surface_constants(ScaledSurface(cfg, 1.0))
    max_cot = float(np.max(1.0 / np.tan(cfg.angles)))
    beta_star = beta_star_bound(fit.c1_hat, max_cot)
    beta = beta_star
    g = nl.gamma_star
    epsilon = g / 8.0
    c = profile.speed
    lam = 0.5 * min(-nl.fprime_at_one / 4.0, beta * c * c / 16.0)
    x_prime, x_double_prime, kappa = case_thresholds(profile, nl, epsilon, max_cot)
    f_lip = nl.max_abs_derivative(0.0, 1.0)
    pilot = BarrierSampleSpec(n_samples=pilot_samples, seed=seed)

    chosen = None
    last_report = None
    for i, alpha in enumerate(alpha_ladder):
        c_star = fit_time_term_constant(
            BarrierSet(cfg, profile, nl,
                       BarrierParams(epsilon=epsilon, alpha=alpha, beta=beta,
                                     delta=g / 8.0, lam=lam, varrho=1.0)),
            pilot)
        varrho = 3.0 * (f_lip + lam + c_star) / (lam * kappa * c)
        delta = min(g / 8.0, 1.0 / (lam * varrho))
        cand = BarrierParams(epsilon=epsilon, alpha=alpha, beta=beta, delta=delta,
                             lam=lam, varrho=varrho, beta_star=beta_star,
                             v_star=v_star_schedule(profile, cfg, alpha, beta,
                                                    fit.c_hat, max_cot),
                             kappa=kappa, x_prime=x_prime,
                             x_double_prime=x_double_prime,
                             c_hat=fit.c_hat, c1_hat=fit.c1_hat,
                             c_star_time=c_star)
        report = validate_parameters(cfg, profile, nl, cand, pilot)
        last_report = report
        if report.passed:
            if chosen is None:
                chosen = cand
                continue  # one safety rung below the first passing alpha
            chosen = cand
            break
        if chosen is not None:
            # the safety rung failed; keep the rung that passed
            break
    if chosen is None:
        raise RuntimeError(
            "no alpha on the ladder certified; last report:\n"
            + (last_report.to_json() if last_report is not None else "none"))
    return chosen
