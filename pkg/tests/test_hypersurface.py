"""Smoothed front hypersurface y = phi(t, x) solving sum_i exp(-q_i) = 1:
Newton solver accuracy, support-plane bounds, analytic derivatives, and the
fitted flatness constants."""

import math

import numpy as np
import pytest

from curvedfronts import ScaledSurface, fit_surface_constants, symmetric_v, FrontConfiguration

C = 0.26343617168072303
SIN60 = math.sin(math.pi / 3)


@pytest.fixture(scope="module")
def surf(cfg_v):
    return ScaledSurface(cfg_v, alpha=1.0)


def pyramid_surface():
    nus = np.array([
        [1.0, 0.0],
        [-0.5, math.sqrt(3) / 2],
        [-0.5, -math.sqrt(3) / 2],
    ])
    cfg = FrontConfiguration(3, nus, np.full(3, math.pi / 4), np.zeros(3), C)
    return ScaledSurface(cfg, alpha=1.0)


def test_apex_value(surf):
    phi = surf.solve_phi(np.array([0.0]), np.zeros((1, 1)))
    assert phi[0] == pytest.approx(math.log(2.0) / SIN60, abs=1e-12)


def test_apex_value_three_waves():
    S = pyramid_surface()
    phi = S.solve_phi(np.array([0.0]), np.zeros((1, 2)))
    assert phi[0] == pytest.approx(math.log(3.0) / math.sin(math.pi / 4), abs=1e-12)


def test_residual_vanishes_at_solution(surf):
    rng = np.random.default_rng(13)
    t = rng.uniform(-20, 20, 20000)
    x = rng.uniform(-60, 60, (20000, 1))
    phi = surf.solve_phi(t, x)
    assert np.max(np.abs(surf.residual(t, x, phi))) < 1e-12


def test_residual_vanishes_far_from_ridge(surf):
    # one exponential underflows out there; Newton must still land exactly
    t = np.zeros(5)
    x = np.array([[-1000.0], [-100.0], [0.0], [100.0], [1000.0]])
    phi = surf.solve_phi(t, x)
    assert np.max(np.abs(surf.residual(t, x, phi))) < 1e-12


def test_surface_above_support_function(surf):
    rng = np.random.default_rng(19)
    t = rng.uniform(-20, 20, 5000)
    x = rng.uniform(-80, 80, (5000, 1))
    phi = surf.solve_phi(t, x)
    psi = surf.psi(t, x)
    gap = phi - psi
    # far from the ridge the secondary exponential underflows against |psi|,
    # so positivity is only resolvable up to a few ulps of psi
    assert np.all(gap >= -8 * np.finfo(float).eps * np.maximum(1.0, np.abs(psi)))
    assert np.max(gap) <= math.log(2.0) / SIN60 + 1e-12
    near = np.abs(x[:, 0]) <= 20.0
    assert np.all(gap[near] > 0.0)


def test_uniform_vertical_translation_in_time(surf, cfg_v):
    # common contact angle: the whole graph rides up at speed c / sin(theta)
    x = np.linspace(-30, 30, 101)[:, None]
    t0 = np.zeros(101)
    for t in (1.0, 4.5):
        expected = surf.solve_phi(t0, x) + cfg_v.speed * t / SIN60
        assert np.allclose(surf.solve_phi(t0 + t, x), expected, atol=1e-11)
    d = surf.derivatives(np.array([0.7]), np.array([[2.0]]))
    assert d.phi_t[0] == pytest.approx(cfg_v.speed / SIN60, abs=1e-12)
    assert d.phi_tt[0] == pytest.approx(0.0, abs=1e-10)


def test_analytic_derivatives_match_finite_differences(surf):
    pts = [(-3.0, -4.0), (0.0, 0.0), (0.5, 1.7), (2.0, 12.0)]
    h = 1e-4

    def f(t, x):
        return surf.solve_phi(np.array([t]), np.array([[x]]))[0]

    for t, x in pts:
        d = surf.derivatives(np.array([t]), np.array([[x]]))
        fd_x = (f(t, x + h) - f(t, x - h)) / (2 * h)
        fd_xx = (f(t, x + h) - 2 * f(t, x) + f(t, x - h)) / h**2
        fd_t = (f(t + h, x) - f(t - h, x)) / (2 * h)
        fd_tt = (f(t + h, x) - 2 * f(t, x) + f(t - h, x)) / h**2
        fd_tx = (
            f(t + h, x + h) - f(t + h, x - h) - f(t - h, x + h) + f(t - h, x - h)
        ) / (4 * h**2)
        assert d.grad[0, 0] == pytest.approx(fd_x, abs=1e-6)
        assert d.hess[0, 0, 0] == pytest.approx(fd_xx, abs=1e-6)
        assert d.phi_t[0] == pytest.approx(fd_t, abs=1e-6)
        assert d.phi_tt[0] == pytest.approx(fd_tt, abs=1e-6)
        assert d.grad_t[0, 0] == pytest.approx(fd_tx, abs=1e-6)


def test_weights_and_flatness(surf):
    rng = np.random.default_rng(29)
    t = rng.uniform(-10, 10, 1000)
    x = rng.uniform(-40, 40, (1000, 1))
    w = surf.weights(t, x)
    assert np.allclose(w.sum(axis=1), 1.0, atol=1e-12)
    h = surf.flatness(t, x)
    assert np.allclose(h, 1.0 - np.sum(w**2, axis=1), atol=1e-12)
    assert np.all(h >= 0.0)
    assert np.all(h <= 0.5 + 1e-12)
    assert np.max(np.abs(surf.flatness_identity_gap(t, x))) < 1e-12
    # equal weights on the symmetry axis, single-facet dominance far out
    assert surf.flatness(np.array([0.0]), np.zeros((1, 1)))[0] == pytest.approx(0.5, abs=1e-13)
    assert surf.flatness(np.array([0.0]), np.array([[200.0]]))[0] < 1e-40


def test_alpha_scaling(cfg_v):
    # Y itself does not depend on alpha; the physical graph is Y(at, ax)/a,
    # so stronger smoothing (small alpha) lifts the apex clearance like 1/a.
    t = np.array([0.0])
    x = np.zeros((1, 1))
    for alpha in (1.0, 0.5, 0.1):
        S = ScaledSurface(cfg_v, alpha=alpha)
        y = S.solve_phi(alpha * t, alpha * x)[0]
        assert y == pytest.approx(math.log(2.0) / SIN60, abs=1e-12)
        assert y / alpha == pytest.approx(math.log(2.0) / (alpha * SIN60), abs=1e-9)


def test_fitted_constants(surf):
    fit = fit_surface_constants(surf)
    # the sup of gap/h and of the facet deviation sit at the ridge corner,
    # where both have closed forms for the symmetric V
    assert fit.c_hat == pytest.approx(2.0 * math.log(2.0) / SIN60, rel=1e-12)
    assert fit.c1_hat == pytest.approx(2.0 / math.tan(math.pi / 3), rel=1e-12)
    assert fit.n_samples == 4000
    assert abs(fit.normal_speed_min) < 1e-10
    assert fit.h_max <= 0.5 + 1e-12
    # the fitted constant really does dominate fresh samples
    rng = np.random.default_rng(37)
    t = rng.uniform(-10, 10, 5000)
    x = rng.uniform(-30, 30, (5000, 1))
    gap = surf.solve_phi(t, x) - surf.psi(t, x)
    assert np.all(gap <= fit.c_hat * surf.flatness(t, x) + 1e-12)


def test_three_wave_residual_and_ordering():
    S = pyramid_surface()
    rng = np.random.default_rng(43)
    t = rng.uniform(-5, 5, 4000)
    x = rng.uniform(-25, 25, (4000, 2))
    phi = S.solve_phi(t, x)
    assert np.max(np.abs(S.residual(t, x, phi))) < 1e-12
    gap = phi - S.psi(t, x)
    assert np.all(gap > 0.0)
    assert np.max(gap) <= math.log(3.0) / math.sin(math.pi / 4) + 1e-12
