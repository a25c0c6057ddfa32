"""Eigenvalues of k-Hessian operators on balls by radial shooting.

On radial functions the Hessian eigenvalues are u'' (once) and u'/r
(n-1 times), which closes S_k(D^2 u) = lambda * (-u)^k into an ODE.
Fixing lambda = 1 and shooting from u(0) = -1, u'(0) = 0, the first
zero r_star of u gives the unit-ball eigenvalue lambda_k(B_1) =
r_star^(2k) through the scaling law lambda_k(t*Omega) = t^(-2k) *
lambda_k(Omega).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, gamma

import numpy as np
from scipy.integrate import solve_ivp

from .geometry import unit_ball_volume

__all__ = [
    "RadialEigenPair",
    "sk_radial",
    "shoot_eigen",
    "reshoot_residual",
    "lambda_ball",
    "hessian_integral_radial",
    "radial_hessian_quadrature",
    "rayleigh_paraboloid",
]

_R_MAX = 20.0
_R_START = 1e-4
_PROFILE_POINTS = 2048


@dataclass(frozen=True)
class RadialEigenPair:
    """Unit-ball eigenpair: lambda_k(B_1), the shot's first zero, and the
    eigenprofile on [0, 1] normalized to unit L^(k+1) norm on the ball."""

    n: int
    k: int
    lambda1: float
    r_star: float
    radii: np.ndarray
    profile: np.ndarray
    error_estimate: float

    def __post_init__(self):
        for name in ("radii", "profile"):
            arr = np.ascontiguousarray(np.asarray(getattr(self, name), dtype=float))
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


def sk_radial(n: int, k: int, up, upp, r):
    """S_k(D^2 u) for a radial u with u'(r) = up, u''(r) = upp.

    Equals C(n-1,k-1)*upp*(up/r)^(k-1) + C(n-1,k)*(up/r)^k; at r = 0 the
    limit C(n,k)*upp^k applies (the caller certifies up/r -> upp there).
    """
    if not (1 <= k <= n):
        raise ValueError("need 1 <= k <= n")
    if np.any(np.asarray(r) < 0):
        raise ValueError("radius must be nonnegative")
    if np.isscalar(r) and r == 0:
        return comb(n, k) * upp ** k
    w = np.asarray(up) / np.asarray(r)
    return comb(n - 1, k - 1) * upp * w ** (k - 1) + comb(n - 1, k) * w ** k


def _ode_rhs(n, k, lam=1.0):
    c_lead = comb(n - 1, k - 1)
    c_rest = comb(n - 1, k)

    def rhs(r, y):
        u, v = y
        w = v / r
        upp = (lam * (-u) ** k - c_rest * w ** k) / (c_lead * w ** (k - 1))
        return (v, upp)

    return rhs


def _series_start(n, k, lam=1.0):
    """Two-term Taylor start u = -1 + c r^2 / 2 with C(n,k) c^k = lam."""
    c = (lam / comb(n, k)) ** (1.0 / k)
    r0 = _R_START
    return r0, np.array([-1.0 + 0.5 * c * r0 ** 2, c * r0])


def _integrate(n, k, r_from, y_from, r_to, rtol, lam=1.0, t_eval=None, events=None):
    sol = solve_ivp(
        _ode_rhs(n, k, lam),
        (r_from, r_to),
        y_from,
        method="RK45",
        rtol=rtol,
        atol=1e-14,
        t_eval=t_eval,
        events=events,
    )
    if not sol.success:
        raise RuntimeError(f"radial ODE integration failed: {sol.message}")
    return sol


def _locate_zero(n, k, tol):
    """First zero of the lambda=1 shot, by bracketing and bisection.

    A terminal event stops the scan at the crossing (the ODE turns unstable
    once u is positive); the event time only seeds the bracket, the zero
    itself is refined by bisection with fresh short integrations.
    """
    r0, y0 = _series_start(n, k)
    rtol = tol / 10

    def crossing(r, y):
        return y[0]

    crossing.terminal = True
    crossing.direction = 1
    sol = _integrate(n, k, r0, y0, _R_MAX, rtol, events=crossing)
    if len(sol.t_events[0]) == 0:
        raise RuntimeError(f"no sign change of u before r = {_R_MAX}")
    lo = sol.t[-2] if len(sol.t) > 1 else r0
    hi = sol.t_events[0][0] + max(tol, 1e-9 * sol.t_events[0][0])
    base_r = lo
    base_y = sol.y[:, -2].copy() if len(sol.t) > 1 else y0.copy()
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        y_mid = _integrate(n, k, base_r, base_y, mid, rtol).y[:, -1]
        if y_mid[0] < 0:
            lo, base_r, base_y = mid, mid, y_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _shoot(n, k, tol):
    r_star = _locate_zero(n, k, tol)
    r0, y0 = _series_start(n, k)
    grid = np.linspace(r0, r_star, _PROFILE_POINTS + 1)[:-1]
    sol = _integrate(n, k, r0, y0, r_star, tol / 10, t_eval=grid)
    radii = np.concatenate([[0.0], sol.t / r_star, [1.0]])
    values = np.concatenate([[-1.0], sol.y[0], [0.0]])
    values = np.minimum(values, 0.0)
    # normalize ||u||_{L^{k+1}(B_1^n)} = 1 by the radial quadrature
    nrm = n * unit_ball_volume(n) * np.trapezoid(
        (-values) ** (k + 1) * radii ** (n - 1), radii
    )
    values = values / nrm ** (1.0 / (k + 1))
    return r_star, radii, values


@lru_cache(maxsize=None)
def _shoot_cached(n, k, tol):
    r_fine, radii, values = _shoot(n, k, tol)
    r_coarse, _, _ = _shoot(n, k, 8 * tol)
    lam = r_fine ** (2 * k)
    lam_coarse = r_coarse ** (2 * k)
    err = abs(lam - lam_coarse) + 2 * k * r_fine ** (2 * k - 1) * tol
    return RadialEigenPair(
        n=n, k=k, lambda1=lam, r_star=r_fine, radii=radii, profile=values,
        error_estimate=err,
    )


def shoot_eigen(n: int, k: int, tol: float = 1e-8) -> RadialEigenPair:
    """lambda_k(B_1^n) together with the normalized radial eigenprofile.

    Results are memoized per (n, k, tol); the cache is safe under
    concurrent reads and idempotent concurrent writes.
    """
    if n < 2 or not (1 <= k <= n):
        raise ValueError("need n >= 2 and 1 <= k <= n")
    if not (0 < tol <= 1e-4):
        raise ValueError("tol must lie in (0, 1e-4]")
    return _shoot_cached(int(n), int(k), float(tol))


def lambda_ball(n: int, k: int, R: float, tol: float = 1e-8) -> float:
    """lambda_k(B_R) = R^(-2k) * lambda_k(B_1)."""
    if R <= 0:
        raise ValueError("radius must be positive")
    return shoot_eigen(n, k, tol).lambda1 / R ** (2 * k)


def reshoot_residual(pair: RadialEigenPair, tol: float = 1e-8) -> float:
    """|u(1)| when re-integrating with lambda = lambda1 on [0, 1]."""
    lam = pair.lambda1
    c = (lam / comb(pair.n, pair.k)) ** (1.0 / pair.k)
    r0 = _R_START
    y0 = np.array([-1.0 + 0.5 * c * r0 ** 2, c * r0])
    sol = _integrate(pair.n, pair.k, r0, y0, 1.0, tol / 10, lam=lam)
    return abs(float(sol.y[0, -1]))


def radial_hessian_quadrature(radii, values, n: int, k: int) -> float:
    """Hessian integral of a radial profile:
    C(n,k) * omega_n * int f^(k+1) r^(n-k) dr with f = drho/dr.
    """
    radii = np.asarray(radii, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(radii) < 3:
        raise ValueError("profile too short for a derivative")
    f = np.gradient(values, radii)
    integrand = f ** (k + 1) * radii ** (n - k)
    return comb(n, k) * unit_ball_volume(n) * float(np.trapezoid(integrand, radii))


def hessian_integral_radial(pair: RadialEigenPair, R: float = 1.0) -> float:
    """Hessian integral of the eigenprofile rescaled to B_R with unit
    L^(k+1) norm there; equals lambda_k(B_R) by the Rayleigh identity."""
    if R <= 0:
        raise ValueError("radius must be positive")
    beta = R ** (-pair.n / (pair.k + 1))
    return radial_hessian_quadrature(pair.radii * R, beta * pair.profile, pair.n, pair.k)


def rayleigh_paraboloid(n: int, k: int) -> float:
    """Rayleigh quotient of the paraboloid trial u = (|x|^2 - 1)/2 on B_1.

    Both integrals reduce to Beta functions:
    int (-u) = omega_n/(n+2) (times S_k(D^2 u) = C(n,k)) and
    int (-u)^(k+1) = n*omega_n/2^(k+2) * Gamma(n/2)Gamma(k+2)/Gamma(n/2+k+2).
    The quotient upper-bounds lambda_k(B_1).
    """
    if n < 2 or not (1 <= k <= n):
        raise ValueError("need n >= 2 and 1 <= k <= n")
    num = comb(n, k) * unit_ball_volume(n) / (n + 2)
    den = (
        n * unit_ball_volume(n) / 2 ** (k + 2)
        * gamma(n / 2) * gamma(k + 2) / gamma(n / 2 + k + 2)
    )
    return num / den
