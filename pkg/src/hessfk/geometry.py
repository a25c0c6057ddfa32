"""Planar convex bodies as sampled support functions.

A body is stored as support values h(theta_j) on a uniform angular grid.
All geometric functionals (quermassintegrals, inradius, circumradius,
Steiner point, Hausdorff distances, deficiency measures, Bonnesen-type
deficits) are computed from these samples.  Balls in general dimension
are handled separately in closed form.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from math import gamma, pi

import numpy as np
from scipy.optimize import brentq, linprog, minimize

# Relative tolerance for the discrete convexity test h'' + h >= 0.
TOL_CONV = 1e-8

__all__ = [
    "SupportBody2D",
    "BallBody",
    "QuermassVector",
    "AsymmetryReport",
    "unit_ball_volume",
    "make_ellipse",
    "make_disk",
    "make_smoothed_polygon",
    "offset",
    "scale",
    "translate",
    "quermass_2d",
    "quermass_ball",
    "af_deficit",
    "inradius",
    "circumradius",
    "steiner_point",
    "hausdorff_to_ball",
    "asymmetry_report",
    "bonnesen_gap",
    "gs_pair",
    "body_to_json",
    "body_from_json",
]


def unit_ball_volume(n: int) -> float:
    """Volume omega_n of the unit ball in R^n."""
    return pi ** (n / 2) / gamma(n / 2 + 1)


def angle_grid(N: int) -> np.ndarray:
    return 2 * pi * np.arange(N) / N


def _unit_vectors(theta):
    return np.column_stack([np.cos(theta), np.sin(theta)])


def spectral_derivative(h: np.ndarray) -> np.ndarray:
    """Derivative of a periodic sample vector by FFT differentiation."""
    N = len(h)
    H = np.fft.rfft(h)
    m = np.arange(len(H))
    if N % 2 == 0:
        # Nyquist mode has no well-defined derivative direction; drop it.
        H[-1] = 0.0
    return np.fft.irfft(1j * m * H, n=N)


def centered_derivative(h: np.ndarray) -> np.ndarray:
    N = len(h)
    dth = 2 * pi / N
    return (np.roll(h, -1) - np.roll(h, 1)) / (2 * dth)


@dataclass(frozen=True)
class SupportBody2D:
    """Convex body in the plane, sampled support function on N uniform angles.

    Invariants checked at construction: N even and >= 256, discrete
    convexity (second difference form of h + h'' >= 0 up to TOL_CONV),
    and positivity of h after recentering at the Steiner point.
    """

    h: np.ndarray

    def __post_init__(self):
        h = np.ascontiguousarray(np.asarray(self.h, dtype=float))
        if h.ndim != 1:
            raise ValueError("support samples must be a 1-D array")
        N = len(h)
        if N < 256 or N % 2 != 0:
            raise ValueError(f"angular grid size must be even and >= 256, got {N}")
        if not np.all(np.isfinite(h)):
            raise ValueError("support samples must be finite")
        dth = 2 * pi / N
        curv = np.roll(h, -1) + np.roll(h, 1) - 2 * h + dth * dth * h
        if curv.min() < -TOL_CONV * dth * dth * np.abs(h).max():
            raise ValueError("support samples violate discrete convexity")
        u = _unit_vectors(angle_grid(N))
        s = (dth / pi) * (h @ u)
        if (h - u @ s).min() <= 0:
            raise ValueError("body is degenerate: empty interior at the Steiner point")
        h.flags.writeable = False
        object.__setattr__(self, "h", h)

    @property
    def N(self) -> int:
        return len(self.h)

    @property
    def theta(self) -> np.ndarray:
        return angle_grid(self.N)

    def unit_vectors(self) -> np.ndarray:
        return _unit_vectors(self.theta)

    def boundary_points(self) -> np.ndarray:
        """Sampled boundary x = h*u + h'*u_perp, h' by centered differences."""
        th = self.theta
        hp = centered_derivative(self.h)
        return np.column_stack(
            [self.h * np.cos(th) - hp * np.sin(th), self.h * np.sin(th) + hp * np.cos(th)]
        )


@dataclass(frozen=True)
class BallBody:
    """Ball in R^n given by dimension and radius."""

    n: int
    R: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("dimension must be >= 2")
        if not self.R > 0:
            raise ValueError("radius must be positive")


@dataclass(frozen=True)
class QuermassVector:
    """Quermassintegrals W_0..W_n of a convex body in R^n."""

    W: np.ndarray
    n: int

    def __post_init__(self):
        W = np.asarray(self.W, dtype=float)
        if len(W) != self.n + 1:
            raise ValueError("need n+1 quermassintegrals")
        if np.any(W <= 0):
            raise ValueError("quermassintegrals must be positive")
        wn = unit_ball_volume(self.n)
        if abs(W[-1] - wn) > 1e-9 * wn:
            raise ValueError("W_n must equal the unit ball volume")
        # Aleksandrov-Fenchel monotone chain, allowing quadrature slack.
        roots = [(W[i] / wn) ** (1.0 / (self.n - i)) for i in range(self.n)]
        for i in range(self.n - 1):
            if roots[i] > roots[i + 1] * (1 + 1e-7):
                raise ValueError("Aleksandrov-Fenchel chain violated")
        W.flags.writeable = False
        object.__setattr__(self, "W", W)

    @property
    def area(self) -> float:
        return float(self.W[0])

    @property
    def perimeter(self) -> float:
        return float(self.n * self.W[1])


@dataclass(frozen=True)
class AsymmetryReport:
    """Deficiency and asymmetry measures of a body against its W_{k-1} ball."""

    k: int
    d_k: float
    D_k: float
    Delta: float
    delta_H: float
    r_in: float
    R_circ: float
    R_star: float
    steiner: np.ndarray


# ---------------------------------------------------------------------------
# constructors


def make_ellipse(a: float, b: float, N: int = 1024) -> SupportBody2D:
    """Axis-aligned centered ellipse with semi-axes a, b."""
    if a <= 0 or b <= 0:
        raise ValueError("semi-axes must be positive")
    th = angle_grid(N)
    h = np.sqrt((a * np.cos(th)) ** 2 + (b * np.sin(th)) ** 2)
    return SupportBody2D(h)


def make_disk(R: float = 1.0, N: int = 1024) -> SupportBody2D:
    return make_ellipse(R, R, N)


def _polygon_steiner_point(vertices, normal_angles):
    """Steiner point of a convex polygon from its vertex normal cones.

    On the normal cone [alpha, beta] of vertex v the support function is
    <v, u(theta)>, so the Steiner integral restricted to that arc is
    M(alpha, beta) @ v with M = int u (x) u dtheta.
    """
    m = len(vertices)
    s = np.zeros(2)
    for i in range(m):
        v = vertices[i]
        alpha = normal_angles[i - 1]
        beta = normal_angles[i]
        if beta < alpha:
            beta += 2 * pi
        d = beta - alpha
        c2 = (np.sin(2 * beta) - np.sin(2 * alpha)) / 4
        s2 = (np.cos(2 * alpha) - np.cos(2 * beta)) / 4
        M = np.array([[d / 2 + c2, s2], [s2, d / 2 - c2]])
        s += M @ v
    return s / pi


def make_smoothed_polygon(vertices, rho: float, N: int = 1024) -> SupportBody2D:
    """Convex polygon with corners rounded by radius rho.

    The curvature-radius measure of the rounded polygon (a constant rho
    plus one atom of mass |edge| per edge normal) is smeared with a
    wrapped Gaussian of width ~2 grid cells and the support function is
    recovered spectrally from h + h'' = r.  A final scale-and-offset
    calibration makes the discrete perimeter and area match the exact
    Steiner values P + 2*pi*rho and A + P*rho + pi*rho**2, so downstream
    quadratures see those values to machine precision.
    """
    V = np.asarray(vertices, dtype=float)
    if V.ndim != 2 or V.shape[1] != 2 or len(V) < 3:
        raise ValueError("need at least 3 planar vertices")
    if rho <= 0:
        raise ValueError("rounding radius must be positive")
    def _turn(E):
        F = np.roll(E, -1, axis=0)
        return E[:, 0] * F[:, 1] - E[:, 1] * F[:, 0]

    edges = np.roll(V, -1, axis=0) - V
    cross = _turn(edges)
    if np.all(cross < 0):  # clockwise input: flip
        V = V[::-1]
        edges = np.roll(V, -1, axis=0) - V
        cross = _turn(edges)
    if np.any(cross <= 0):
        raise ValueError("vertex list is not strictly convex")
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    # outward normal of a CCW edge (dx, dy) is (dy, -dx)
    normal_angles = np.arctan2(-edges[:, 0], edges[:, 1])

    dth = 2 * pi / N
    sigma = 2 * dth
    M = N // 2
    m = np.arange(M + 1)
    rhat = np.zeros(M + 1, dtype=complex)
    for te, le in zip(normal_angles, lengths):
        rhat += le * np.exp(-1j * m * te) * np.exp(-(m ** 2) * sigma ** 2 / 2) / (2 * pi)
    rhat[0] += rho
    hhat = np.zeros_like(rhat)
    hhat[0] = rhat[0]
    hhat[2:] = rhat[2:] / (1.0 - m[2:] ** 2)  # closing condition kills m = 1
    h_raw = np.fft.irfft(hhat * N, n=N)

    # calibrate s, t so that s*K + t*B has the exact Steiner perimeter/area
    P_tgt = lengths.sum() + 2 * pi * rho
    Vn = np.roll(V, -1, axis=0)
    A_poly = 0.5 * np.sum(V[:, 0] * Vn[:, 1] - V[:, 1] * Vn[:, 0])
    A_tgt = A_poly + lengths.sum() * rho + pi * rho ** 2
    P_raw = h_raw.sum() * dth
    hp = spectral_derivative(h_raw)
    A_raw = 0.5 * np.sum(h_raw ** 2 - hp ** 2) * dth

    def area_residual(s):
        t = (P_tgt - s * P_raw) / (2 * pi)
        return s * s * A_raw + s * t * P_raw + pi * t * t - A_tgt

    s = brentq(area_residual, 0.25, 4.0, xtol=1e-15, rtol=8.9e-16)
    t = (P_tgt - s * P_raw) / (2 * pi)
    h = s * h_raw + t
    if (np.roll(h, -1) + np.roll(h, 1) - 2 * h + dth * dth * h).min() <= 0:
        raise ValueError("rounding radius too small for this grid resolution")

    sp = _polygon_steiner_point(V, normal_angles)
    th = angle_grid(N)
    h = h + sp[0] * np.cos(th) + sp[1] * np.sin(th)
    return SupportBody2D(h)


def offset(K: SupportBody2D, rho: float) -> SupportBody2D:
    """Minkowski sum K + rho * B (support functions add)."""
    if rho < 0:
        raise ValueError("offset must be nonnegative")
    return SupportBody2D(K.h + rho)


def scale(K: SupportBody2D, t: float) -> SupportBody2D:
    if t <= 0:
        raise ValueError("scale factor must be positive")
    return SupportBody2D(t * K.h)


def translate(K: SupportBody2D, c) -> SupportBody2D:
    c = np.asarray(c, dtype=float)
    return SupportBody2D(K.h + K.unit_vectors() @ c)


# ---------------------------------------------------------------------------
# functionals


def quermass_2d(K: SupportBody2D) -> QuermassVector:
    """W_0 (area), W_1 (perimeter/2), W_2 (= pi) by periodic trapezoid quadrature.

    The area uses (1/2) int (h^2 - h'^2) with a spectral derivative, which is
    exact for band-limited support functions and spectrally accurate for
    smooth ones.
    """
    dth = 2 * pi / K.N
    W1 = 0.5 * K.h.sum() * dth
    hp = spectral_derivative(K.h)
    W0 = 0.5 * np.sum(K.h ** 2 - hp ** 2) * dth
    return QuermassVector(np.array([W0, W1, pi]), n=2)


def quermass_ball(n: int, R: float) -> QuermassVector:
    """W_i(B_R) = omega_n * R^(n-i) in closed form."""
    ball = BallBody(n, R)
    wn = unit_ball_volume(ball.n)
    W = wn * ball.R ** (ball.n - np.arange(ball.n + 1, dtype=float))
    return QuermassVector(W, n=ball.n)


def af_deficit(W: QuermassVector, i: int, j: int) -> float:
    """Aleksandrov-Fenchel deficit (W_j/w_n)^(1/(n-j)) - (W_i/w_n)^(1/(n-i)).

    Nonnegative for 0 <= i < j <= n-1, zero exactly on balls.
    """
    if not (0 <= i < j <= W.n - 1):
        raise ValueError("need 0 <= i < j <= n-1")
    wn = unit_ball_volume(W.n)
    return (W.W[j] / wn) ** (1.0 / (W.n - j)) - (W.W[i] / wn) ** (1.0 / (W.n - i))


def inradius(K: SupportBody2D) -> float:
    """Largest inscribed disk radius via the Chebyshev-center linear program."""
    U = K.unit_vectors()
    A_ub = np.column_stack([U, np.ones(K.N)])
    res = linprog(
        c=[0.0, 0.0, -1.0],
        A_ub=A_ub,
        b_ub=K.h,
        bounds=[(None, None), (None, None), (0, None)],
        method="highs",
    )
    if not res.success:
        raise RuntimeError(f"inradius LP failed: {res.message}")
    return float(res.x[2])


def _disk_from(points):
    ax, ay = points[0]
    if len(points) == 1:
        return ax, ay, 0.0
    bx, by = points[1]
    if len(points) == 2:
        cx, cy = (ax + bx) / 2, (ay + by) / 2
        return cx, cy, np.hypot(ax - cx, ay - cy)
    cx, cy = points[2]
    d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if d == 0:
        return _disk_from(points[:2])
    ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay)
          + (cx * cx + cy * cy) * (ay - by)) / d
    uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx)
          + (cx * cx + cy * cy) * (bx - ax)) / d
    return ux, uy, np.hypot(ax - ux, ay - uy)


def _welzl(points, seed=0):
    """Smallest enclosing disk, randomized incremental (expected linear time)."""
    pts = [tuple(p) for p in points]
    rng = random.Random(seed)
    rng.shuffle(pts)
    cx = cy = r = 0.0
    have = False

    def inside(x, y):
        return np.hypot(x - cx, y - cy) <= r * (1 + 1e-12) + 1e-15

    for i, p in enumerate(pts):
        if have and inside(*p):
            continue
        cx, cy, r = p[0], p[1], 0.0
        have = True
        for j in range(i):
            q = pts[j]
            if inside(*q):
                continue
            cx, cy, r = _disk_from([p, q])
            for k in range(j):
                w = pts[k]
                if inside(*w):
                    continue
                cx, cy, r = _disk_from([p, q, w])
    return cx, cy, r


def circumradius(K: SupportBody2D) -> float:
    """Smallest enclosing disk radius of the sampled boundary points."""
    _, _, r = _welzl(K.boundary_points())
    return float(r)


def steiner_point(K: SupportBody2D) -> np.ndarray:
    """Steiner point s = (1/pi) * int h(theta) u(theta) dtheta."""
    dth = 2 * pi / K.N
    return (dth / pi) * (K.h @ K.unit_vectors())


def hausdorff_to_ball(K: SupportBody2D, R: float, x0) -> float:
    """Hausdorff distance between K and the ball B_R + x0.

    For convex bodies this is the sup-norm gap of support functions,
    max_theta |h_K - R - <x0, u>|.
    """
    if R <= 0:
        raise ValueError("ball radius must be positive")
    x0 = np.asarray(x0, dtype=float)
    return float(np.abs(K.h - R - K.unit_vectors() @ x0).max())


def asymmetry_report(K: SupportBody2D, k: int) -> AsymmetryReport:
    """Interior/exterior k-deficiency, deficiency and Hausdorff asymmetry.

    The comparison ball preserves W_{k-1}: for k=1 the area ball, for k=2
    the perimeter ball of radius W_1/pi.  delta_H minimizes the Hausdorff
    distance over recenterings x0, seeded at the Steiner point; by
    convexity of the objective the local search never exceeds the seed.
    """
    if k not in (1, 2):
        raise ValueError("planar deficiencies are defined for k in {1, 2}")
    W = quermass_2d(K)
    R_star = float(np.sqrt(W.W[0] / pi)) if k == 1 else float(W.W[1] / pi)
    r = inradius(K)
    R_c = circumradius(K)
    s = steiner_point(K)

    def objective(x0):
        return hausdorff_to_ball(K, R_star, x0)

    seed_val = objective(s)
    res = minimize(
        objective,
        s,
        method="Nelder-Mead",
        options={"xatol": 1e-8 * R_star, "fatol": 1e-12 * R_star, "maxiter": 400},
    )
    delta_H = min(seed_val, float(res.fun))
    return AsymmetryReport(
        k=k,
        d_k=1.0 - r / R_star,
        D_k=R_c / R_star - 1.0,
        Delta=R_c / r - 1.0,
        delta_H=delta_H,
        r_in=r,
        R_circ=R_c,
        R_star=R_star,
        steiner=s,
    )


def bonnesen_gap(K: SupportBody2D) -> float:
    """Classical planar Bonnesen slack P^2 - 4*pi*A - pi^2*(R-r)^2 >= 0."""
    W = quermass_2d(K)
    P, A = W.perimeter, W.area
    return P * P - 4 * pi * A - pi ** 2 * (circumradius(K) - inradius(K)) ** 2


def gs_pair(K: SupportBody2D):
    """Bonnesen-type pair ((R-r)^(5/2), sqrt(P)*[(P/2pi)^2 - A/pi]) for n=2.

    The unknown multiplicative constant is left off; callers estimate it
    empirically as max(lhs/rhs_core) over a body family.
    """
    W = quermass_2d(K)
    P, A = W.perimeter, W.area
    lhs = (circumradius(K) - inradius(K)) ** 2.5
    rhs_core = np.sqrt(P) * ((P / (2 * pi)) ** 2 - A / pi)
    if rhs_core <= 0 and lhs > 1e-10 * max(1.0, P) ** 2.5:
        raise ValueError("degenerate body: isoperimetric deficit not positive")
    return float(lhs), float(rhs_core)


# ---------------------------------------------------------------------------
# serialization


def body_to_json(K: SupportBody2D) -> str:
    return json.dumps({"n": 2, "N": K.N, "h": K.h.tolist()})


def body_from_json(data) -> SupportBody2D:
    """Load a body from a raw support record or a named-constructor record."""
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    if "ellipse" in data:
        spec = data["ellipse"]
        return make_ellipse(spec["a"], spec["b"], int(spec.get("N", 1024)))
    if "smoothed_polygon" in data:
        spec = data["smoothed_polygon"]
        return make_smoothed_polygon(
            spec["vertices"], spec["rho"], int(spec.get("N", 1024))
        )
    if data.get("n") != 2:
        raise ValueError("only planar support-function bodies are supported")
    h = np.asarray(data["h"], dtype=float)
    if "N" in data and int(data["N"]) != len(h):
        raise ValueError("declared N does not match the sample count")
    return SupportBody2D(h)
