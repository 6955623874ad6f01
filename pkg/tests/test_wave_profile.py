"""Planar traveling wave U(D) with speed c: shooting solver, decay rates,
evaluator accuracy, and the amplitude scaling law."""

import numpy as np
import pytest

from curvedfronts import (
    ShootingCollapseError,
    build_profile,
    decay_rate_into_burned,
    find_wave_speed,
    make_combustion,
    ode_residual_sup,
    shoot_p,
    tail_rates,
)

# Bisection-converged speeds, frozen once the shooting solver stabilised.
SPEEDS = {
    0.2: 0.36699380655581,
    0.3: 0.26343617168072303,
    0.5: 0.12151061635796,
}


@pytest.mark.parametrize("theta", sorted(SPEEDS))
def test_wave_speed_reference_values(theta):
    nl = make_combustion(theta=theta, amplitude=1.0, exponent=2.0, sigma=0.1)
    c = find_wave_speed(nl)
    assert c == pytest.approx(SPEEDS[theta], abs=5e-11)


def test_speed_matches_tail_slope(nl03, profile03):
    # at the connection speed the shot lands on the exponential-tail
    # slope |U'| = c theta at the ignition level
    c = profile03.speed
    assert shoot_p(nl03, c) == pytest.approx(c * nl03.theta, abs=1e-10)


def test_shooting_collapses_above_connection_speed(nl03):
    with pytest.raises(ShootingCollapseError):
        shoot_p(nl03, 0.5)


def test_anchor_and_range(profile03):
    assert profile03(0.0) == pytest.approx(0.3, abs=1e-12)
    D = np.linspace(profile03.grid[0], profile03.grid[-1], 2000)
    u = profile03(D)
    assert np.all(u > 0.0)
    assert np.all(u <= 1.0)
    assert np.all(np.diff(u) <= 0.0)
    # strictly decreasing wherever 1 - u is resolvable in doubles
    Ds = np.linspace(-40.0, profile03.grid[-1], 2000)
    assert np.all(np.diff(profile03(Ds)) < 0.0)


def test_exact_exponential_tail(profile03):
    # on D >= 0 the profile is exactly theta * exp(-c D)
    D = np.linspace(0.0, 40.0, 400)
    expected = 0.3 * np.exp(-profile03.speed * D)
    assert np.max(np.abs(profile03(D) - expected) / expected) < 1e-12


def test_beta0_reference_and_quadratic_identity(nl03, profile03):
    c = profile03.speed
    b0 = profile03.beta0
    assert b0 == pytest.approx(0.5805667266731785, abs=1e-10)
    assert b0**2 + c * b0 + nl03.fprime_at_one == pytest.approx(0.0, abs=1e-12)
    assert decay_rate_into_burned(nl03, c) == pytest.approx(b0, abs=1e-12)


def test_ode_residual(nl03, profile03):
    # U'' + c U' + f(U) = 0 sampled across the whole tabulated range
    assert ode_residual_sup(profile03, nl03) < 1e-6


def test_derivative_matches_finite_differences(profile03):
    D = np.linspace(-25.0, 25.0, 600)
    h = 1e-5
    fd = (profile03(D + h) - profile03(D - h)) / (2 * h)
    assert np.max(np.abs(profile03.derivative(D) - fd)) < 1e-8


def test_second_derivative_matches_finite_differences(nl03, profile03):
    from curvedfronts.wave_profile import ode_second_derivative

    D = np.linspace(-20.0, 20.0, 400)
    # keep clear of the ignition kink at D = 0 where U'' jumps
    D = D[np.abs(D) > 0.05]
    h = 1e-4
    fd = (profile03(D + h) - 2 * profile03(D) + profile03(D - h)) / h**2
    assert np.max(np.abs(ode_second_derivative(profile03, nl03, D) - fd)) < 1e-6


def test_derivative_strictly_negative(profile03):
    D = np.linspace(profile03.grid[0], profile03.grid[-1], 3000)
    assert np.all(profile03.derivative(D) < 0.0)


def test_inverse_roundtrip(profile03):
    for u in np.linspace(1e-6, 1.0 - 1e-9, 37):
        D = profile03.inverse(float(u))
        assert profile03(D) == pytest.approx(u, abs=1e-9)
    with pytest.raises(ValueError):
        profile03.inverse(1.5)
    with pytest.raises(ValueError):
        profile03.inverse(0.0)


def test_one_minus_accuracy_in_burned_tail(profile03):
    # 1 - U underflows in naive evaluation; one_minus keeps relative accuracy
    D = np.linspace(-60.0, -30.0, 100)
    om = profile03.one_minus(D)
    assert np.all(om > 0.0)
    c, b0, L1, L2, L3, L4 = tail_rates(profile03)
    env = np.exp(b0 * D)
    assert np.all(om <= L3 * env * (1 + 1e-9))
    assert np.all(om >= L4 * env * (1 - 1e-9))


def test_tail_rate_envelopes(profile03):
    c, b0, L1, L2, L3, L4 = tail_rates(profile03)
    assert c == profile03.speed
    assert 0 < L1 <= L2
    assert 0 < L4 <= L3
    D = np.linspace(0.0, 30.0, 200)
    u = profile03(D)
    assert np.all(u <= L2 * np.exp(-c * D) * (1 + 1e-12))
    assert np.all(u >= L1 * np.exp(-c * D) * (1 - 1e-12))


def test_u_pow_and_log_u_consistency(profile03):
    D = np.linspace(-30.0, 50.0, 300)
    assert np.max(np.abs(profile03.log_u(D) - np.log(profile03(D)))) < 1e-10
    p = 2.0
    assert np.max(np.abs(profile03.u_pow(D, p) - profile03(D) ** p)) < 1e-12


def test_amplitude_scaling_doubles_speed(nl03, profile03):
    # u_t - u_xx = 4 f(u) travels at 2c with profile U(2 D)
    nl4 = make_combustion(theta=0.3, amplitude=4.0, exponent=2.0, sigma=0.1)
    c4 = find_wave_speed(nl4)
    assert c4 == pytest.approx(2.0 * profile03.speed, rel=1e-9)
    prof4 = build_profile(nl4, c=c4)
    D = np.linspace(-12.0, 25.0, 500)
    assert np.max(np.abs(prof4(D) - profile03(2.0 * D))) < 1e-6


def test_build_profile_with_explicit_speed(nl03, profile03):
    prof = build_profile(nl03, c=profile03.speed)
    D = np.linspace(-15.0, 15.0, 200)
    assert np.max(np.abs(prof(D) - profile03(D))) < 1e-12
