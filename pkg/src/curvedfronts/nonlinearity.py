"""Ignition-type combustion source terms.

The reaction term f vanishes on [-sigma, theta] and at u = 1, is positive
on (theta, 1), negative on (1, 1 + sigma], and has f'(1) < 0.  The concrete
family implemented here is

    f(u) = amplitude * (u - theta)^exponent * (1 - u)   on (theta, 1 + sigma],
    f(u) = 0                                            on [-sigma, theta].

Evaluation outside [-sigma, 1 + sigma] clamps the argument to the nearest
endpoint, so f is globally defined and bounded.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["CombustionNonlinearity", "make_combustion", "gamma_star"]


@dataclass(frozen=True)
class CombustionNonlinearity:
    theta: float
    amplitude: float
    exponent: float
    sigma: float
    fprime_at_one: float = field(init=False)
    gamma_star: float = field(init=False)

    def __post_init__(self) -> None:
        if not 0.0 < self.theta < 1.0:
            raise ValueError(f"ignition threshold theta must lie in (0, 1), got {self.theta}")
        if self.amplitude <= 0.0:
            raise ValueError(f"amplitude must be positive, got {self.amplitude}")
        if self.exponent < 2.0:
            raise ValueError(
                f"exponent must be >= 2 so that f' is continuous at theta, got {self.exponent}"
            )
        if self.sigma <= 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        object.__setattr__(self, "fprime_at_one", -self.amplitude * (1.0 - self.theta) ** self.exponent)
        object.__setattr__(self, "gamma_star", gamma_star(self))

    # -- evaluation ---------------------------------------------------------

    def _clamp(self, u):
        return np.clip(u, -self.sigma, 1.0 + self.sigma)

    def __call__(self, u):
        """f(u), vectorized; arguments are clamped to [-sigma, 1 + sigma]."""
        w = self._clamp(np.asarray(u, dtype=float))
        out = self.amplitude * np.maximum(w - self.theta, 0.0) ** self.exponent * (1.0 - w)
        if np.isscalar(u) or np.ndim(u) == 0:
            return float(out)
        return out

    def derivative(self, u):
        """f'(u); zero on the clamped exterior and on [-sigma, theta]."""
        uu = np.asarray(u, dtype=float)
        w = self._clamp(uu)
        s = np.maximum(w - self.theta, 0.0)
        p = self.exponent
        out = self.amplitude * s ** (p - 1.0) * (p * (1.0 - w) - s)
        out = np.where((uu < -self.sigma) | (uu > 1.0 + self.sigma), 0.0, out)
        if np.isscalar(u) or np.ndim(u) == 0:
            return float(out)
        return out

    def value_and_derivative(self, u):
        return self(u), self.derivative(u)

    def max_abs_derivative(self, lo: float | None = None, hi: float | None = None) -> float:
        """sup |f'| over [lo, hi] (defaults to the full clamped domain),
        estimated on a dense grid; used for explicit-step Lipschitz caps."""
        if lo is None:
            lo = -self.sigma
        if hi is None:
            hi = 1.0 + self.sigma
        grid = np.linspace(lo, hi, 8193)
        return float(np.max(np.abs(self.derivative(grid))))


def _derivative_sandwich_holds(nl: CombustionNonlinearity, gamma: float, n_check: int = 2001) -> bool:
    if gamma <= 0.0:
        return True
    lo, hi = 1.0 - 2.0 * gamma, 1.0 + 2.0 * gamma
    fp = nl.derivative(np.linspace(lo, hi, n_check))
    upper = 0.5 * nl.fprime_at_one
    lower = 1.5 * nl.fprime_at_one
    return bool(np.all(fp <= upper) and np.all(fp >= lower))


def gamma_star(nl: CombustionNonlinearity, tol: float = 1e-10) -> float:
    """Largest gamma <= min{theta/4, (1-theta)/2, sigma/4} such that
    (3/2) f'(1) <= f'(u) <= (1/2) f'(1) on [1 - 2*gamma, 1 + 2*gamma].

    Found by bisection on the sampled predicate; the window keeps f'
    strictly negative, comparable to f'(1), around the burned state.
    """
    cap = min(nl.theta / 4.0, (1.0 - nl.theta) / 2.0, nl.sigma / 4.0)
    if _derivative_sandwich_holds(nl, cap):
        return cap
    lo, hi = 0.0, cap  # predicate true at 0+, false at cap
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _derivative_sandwich_holds(nl, mid):
            lo = mid
        else:
            hi = mid
    if lo <= 0.0:
        raise ValueError("no admissible gamma found; derivative window empty near u = 1")
    return lo


def make_combustion(theta: float = 0.3, amplitude: float = 1.0, exponent: float = 2.0,
                    sigma: float = 0.1) -> CombustionNonlinearity:
    return CombustionNonlinearity(theta=theta, amplitude=amplitude, exponent=exponent, sigma=sigma)
