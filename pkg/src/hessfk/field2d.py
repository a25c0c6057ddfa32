"""Discrete scalar fields on planar convex domains.

Fields live on a uniform Cartesian grid masked against a support-function
body.  The module provides level-set metrics (marching squares plus a
convex hull), the quermassintegral-preserving radial rearrangement,
Hessian integrals with boundary-corrected stencils, admissibility checks,
and the level-set inequality residuals used by the stability sweeps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import pi

import numpy as np
from scipy import ndimage
from scipy.interpolate import CubicSpline
from scipy.spatial import ConvexHull
from skimage import measure

from .geometry import (
    SupportBody2D,
    body_from_json,
    body_to_json,
    quermass_2d,
    spectral_derivative,
    steiner_point,
)
from .radial_spectra import radial_hessian_quadrature

__all__ = [
    "PolarTable",
    "BoundaryPolar",
    "Grid2D",
    "GridField2D",
    "LevelSetMetrics",
    "RearrangedProfile",
    "AdmissibilityReport",
    "make_field",
    "superlevel_metrics",
    "rearrange",
    "lp_norm",
    "profile_lp_norm",
    "norm_comparison",
    "hessian_integral_2d",
    "dirichlet_energy",
    "polya_szego_gap",
    "is_k_admissible",
    "levelset_lemma_check",
    "integral_lemma_check",
    "field_to_json",
    "field_from_json",
]

# level sets spanning fewer cells than this are treated as degenerate
_MIN_CELLS = 4


class PolarTable:
    """Radial function of a body seen from an interior center.

    Tabulates r(phi) = min_j (h_j - <c, u_j>) / <u_j, e(phi)> on a dense
    angle grid; this is the exact radial function of the intersection of
    the sampled support halfplanes.
    """

    def __init__(self, body: SupportBody2D, center, n_angles: int = 4096):
        center = np.asarray(center, dtype=float)
        hc = body.h - body.unit_vectors() @ center
        if hc.min() <= 0:
            raise ValueError("center is not interior to the body")
        phi = 2 * pi * np.arange(n_angles) / n_angles
        th = body.theta
        # chunked min over support directions to bound memory
        r = np.full(n_angles, np.inf)
        step = 512
        for j0 in range(0, body.N, step):
            c = np.cos(phi[:, None] - th[None, j0:j0 + step])
            with np.errstate(divide="ignore"):
                ratio = np.where(c > 1e-12, hc[None, j0:j0 + step] / c, np.inf)
            r = np.minimum(r, ratio.min(axis=1))
        self.center = center
        # periodic cubic interpolation: second differences of downstream
        # fields see the interpolation error, so linear is not enough
        self._spline = CubicSpline(
            np.concatenate([phi, [2 * pi]]), np.concatenate([r, [r[0]]]),
            bc_type="periodic",
        )

    def radius(self, angles):
        return self._spline(np.mod(angles, 2 * pi))

    def gauge(self, x, y):
        """Minkowski gauge of (x, y) - center: < 1 inside, 1 on the boundary."""
        dx = np.asarray(x) - self.center[0]
        dy = np.asarray(y) - self.center[1]
        rr = np.hypot(dx, dy)
        ang = np.arctan2(dy, dx)
        return rr / self.radius(ang)


class BoundaryPolar:
    """Smooth polar parametrization of the body boundary around a center.

    Uses the sampled boundary curve x = h*u + h'*u_perp with a spectral
    derivative, so for smooth support functions the radius function is
    accurate enough to differentiate twice on a grid.  The parametrized
    body is inscribed in the support polytope used for grid masks, which
    keeps gauge sublevel sets inside the mask.
    """

    def __init__(self, body: SupportBody2D, center):
        center = np.asarray(center, dtype=float)
        th = body.theta
        hp = spectral_derivative(body.h)
        px = body.h * np.cos(th) - hp * np.sin(th) - center[0]
        py = body.h * np.sin(th) + hp * np.cos(th) - center[1]
        rr = np.hypot(px, py)
        if rr.min() <= 0:
            raise ValueError("center is not interior to the body")
        phi = np.arctan2(py, px)
        order = np.argsort(phi)
        phi, rr = phi[order], rr[order]
        if np.any(np.diff(phi) <= 0):
            raise ValueError("boundary angles not monotone around this center")
        phi = np.concatenate([phi, [phi[0] + 2 * pi]])
        rr = np.concatenate([rr, [rr[0]]])
        self.center = center
        self._phi0 = phi[0]
        self._spline = CubicSpline(phi, rr, bc_type="periodic")

    def radius(self, angles):
        a = np.mod(np.asarray(angles) - self._phi0, 2 * pi) + self._phi0
        return self._spline(a)

    def gauge(self, x, y):
        dx = np.asarray(x) - self.center[0]
        dy = np.asarray(y) - self.center[1]
        rr = np.hypot(dx, dy)
        ang = np.arctan2(dy, dx)
        return rr / self.radius(ang)


class Grid2D:
    """Uniform grid covering a body, with inside mask and boundary arms.

    arms[dir] holds, per node, the fraction of a grid step one can move in
    direction dir (+x, -x, +y, -y) before leaving the body (1.0 when the
    neighbor is still inside); used by Shortley-Weller stencils.
    """

    def __init__(self, body: SupportBody2D, h: float, origin=None, shape=None):
        if h <= 0:
            raise ValueError("grid spacing must be positive")
        self.body = body
        self.h = float(h)
        table = PolarTable(body, steiner_point(body))
        self.table = table
        if origin is None:
            bx = body.boundary_points()
            x0, x1 = bx[:, 0].min() - 2 * h, bx[:, 0].max() + 2 * h
            y0, y1 = bx[:, 1].min() - 2 * h, bx[:, 1].max() + 2 * h
            nx = int(np.ceil((x1 - x0) / h)) + 1
            ny = int(np.ceil((y1 - y0) / h)) + 1
            origin = (x0, y0)
        else:
            nx, ny = shape
        self.origin = (float(origin[0]), float(origin[1]))
        self.nx, self.ny = int(nx), int(ny)
        xs = self.origin[0] + h * np.arange(self.nx)
        ys = self.origin[1] + h * np.arange(self.ny)
        self.X, self.Y = np.meshgrid(xs, ys, indexing="ij")
        g = table.gauge(self.X, self.Y)
        self.inside = g < 1.0
        if not self.inside.any():
            raise ValueError("grid does not intersect the body interior")
        self.gauge = g
        self.arms = self._compute_arms()

    def _compute_arms(self):
        h = self.h
        arms = np.ones((4, self.nx, self.ny))
        shifts = [(-1, 0), (1, 0), (0, -1), (0, 1)]  # neighbor offsets for +x,-x,+y,-y
        dirs = [(1, 0), (-1, 0), (0, 1), (0, -1)]
        for d, (sh, dr) in enumerate(zip(shifts, dirs)):
            nbr_inside = np.roll(self.inside, sh, axis=(0, 1))
            # roll wraps; the 2h margin guarantees the border is outside anyway
            cut = self.inside & ~nbr_inside
            idx = np.nonzero(cut)
            if len(idx[0]) == 0:
                continue
            px, py = self.X[idx], self.Y[idx]
            lo = np.zeros(len(px))
            hi = np.ones(len(px))
            for _ in range(42):
                mid = 0.5 * (lo + hi)
                gg = self.table.gauge(px + mid * h * dr[0], py + mid * h * dr[1])
                take = gg < 1.0
                lo = np.where(take, mid, lo)
                hi = np.where(take, hi, mid)
            arms[d][idx] = np.maximum(0.5 * (lo + hi), 1e-6)
        return arms


@dataclass
class GridField2D:
    """Scalar field sampled on a Grid2D.

    values holds u at every node; inside the body u <= 0 with u = 0 on the
    boundary, and outside the body a positive linear continuation is stored
    so that marching squares places the zero level set on the boundary.
    """

    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.values, dtype=float))
        if v.shape != (self.grid.nx, self.grid.ny):
            raise ValueError("values shape does not match the grid")
        v.flags.writeable = False  # fields are immutable once constructed
        self.values = v

    @property
    def body(self) -> SupportBody2D:
        return self.grid.body

    @property
    def h_grid(self) -> float:
        return self.grid.h

    @property
    def mask(self) -> np.ndarray:
        return self.grid.inside

    def max_depth(self) -> float:
        return float((-self.values[self.grid.inside]).max())


def _extend_outside(grid: Grid2D, values: np.ndarray) -> np.ndarray:
    """Fill outside nodes with the linear continuation through the boundary.

    An outside neighbor across an arm of fraction s gets u_in * (1 - 1/s),
    which makes the linear interpolant vanish exactly at the boundary
    crossing; remaining outside nodes get a gauge-based positive ramp.
    """
    out = values.copy()
    inside = grid.inside
    slope_samples = []
    fallback = (grid.gauge - 1.0)
    out[~inside] = np.nan
    acc = np.zeros_like(values)
    cnt = np.zeros_like(values)
    shifts = [(-1, 0), (1, 0), (0, -1), (0, 1)]
    for d, sh in enumerate(shifts):
        nbr_inside = np.roll(inside, sh, axis=(0, 1))
        cut = inside & ~nbr_inside
        if not cut.any():
            continue
        s = grid.arms[d][cut]
        ghost = values[cut] * (1.0 - 1.0 / s)
        gi = (np.nonzero(cut)[0] - sh[0], np.nonzero(cut)[1] - sh[1])
        np.add.at(acc, gi, ghost)
        np.add.at(cnt, gi, 1.0)
        slope_samples.append(-values[cut] / np.maximum(s * grid.h, 1e-12))
    slope = float(np.median(np.concatenate(slope_samples))) if slope_samples else 1.0
    far = ~inside & (cnt == 0)
    out[far] = slope * np.maximum(fallback[far], 0.0) * \
        grid.table.radius(np.arctan2(grid.Y[far] - grid.table.center[1],
                                     grid.X[far] - grid.table.center[0]))
    collar = ~inside & (cnt > 0)
    out[collar] = acc[collar] / cnt[collar]
    return out


def make_field(body: SupportBody2D, h: float, fn, grid: Grid2D | None = None) -> GridField2D:
    """Sample fn(x, y) on the inside nodes of a grid over the body.

    fn must be negative inside and vanish on the boundary; values outside
    are replaced by the standard linear continuation.
    """
    if grid is None:
        grid = Grid2D(body, h)
    vals = np.asarray(fn(grid.X, grid.Y), dtype=float)
    vals = np.where(grid.inside, vals, 0.0)
    depth = -vals[grid.inside].min()
    # the mask is the circumscribed support polytope, so formula fields may
    # poke a boundary sliver above zero (by O(curvature * dtheta^2));
    # genuine positivity is rejected
    if vals[grid.inside].max() > 1e-4 * max(1.0, depth):
        raise ValueError("field must be nonpositive inside the body")
    vals = np.where(grid.inside, np.minimum(vals, 0.0), vals)
    return GridField2D(grid, _extend_outside(grid, vals))


@dataclass(frozen=True)
class LevelSetMetrics:
    """Area, perimeter and convex contour of a superlevel set {-u > t}."""

    t: float
    area: float
    perimeter: float
    contour: np.ndarray
    hull_discrepancy: float


@dataclass(frozen=True)
class RearrangedProfile:
    """Radial profile of the W_{k-1}-preserving rearrangement of a field."""

    radii: np.ndarray
    values: np.ndarray
    k: int

    @property
    def R_star(self) -> float:
        return float(self.radii[-1])


@dataclass(frozen=True)
class AdmissibilityReport:
    ok: bool
    k: int
    min_s1: float
    min_det: float
    violating_fraction: float


def _polygon_area(pts):
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def superlevel_metrics(u: GridField2D, t: float) -> LevelSetMetrics:
    """Metrics of {-u > t}: marching-squares contour, convex hull, shoelace
    area and polygon perimeter.  Raises on empty or disconnected level sets.
    """
    tmax = u.max_depth()
    if not (0 <= t):
        raise ValueError("level must be nonnegative")
    if t >= tmax:
        raise ValueError(f"empty level set: t={t} >= max(-u)={tmax}")
    F = -u.values
    contours = measure.find_contours(F, t)
    h = u.grid.h
    big = []
    for c in contours:
        if len(c) < 4:
            continue
        pts = np.column_stack([
            u.grid.origin[0] + c[:, 0] * h,
            u.grid.origin[1] + c[:, 1] * h,
        ])
        if _polygon_area(pts) >= _MIN_CELLS * h * h:
            big.append(pts)
    if len(big) == 0:
        raise ValueError(f"level set at t={t} is below grid resolution")
    if len(big) > 1:
        raise ValueError(f"disconnected level set at t={t} (convexity violated?)")
    pts = big[0]
    raw_area = _polygon_area(pts)
    hull = ConvexHull(pts)
    area = float(hull.volume)
    perimeter = float(hull.area)
    discrepancy = abs(area - raw_area) / area
    return LevelSetMetrics(
        t=float(t),
        area=area,
        perimeter=perimeter,
        contour=pts[hull.vertices],
        hull_discrepancy=discrepancy,
    )


def rearrange(u: GridField2D, k: int, m: int = 200) -> RearrangedProfile:
    """Radial rearrangement preserving W_{k-1} of every superlevel set.

    Level radii solve W_{k-1}(Omega_t) = omega_2 * r^(3-k): r = sqrt(A/pi)
    for k = 1 and r = P/(2*pi) for k = 2.  Radii are monotonized; a
    violation beyond tolerance signals non-convex level sets.  The profile
    keeps the field's minimum exactly (L-infinity preservation).
    """
    if k not in (1, 2):
        raise ValueError("planar rearrangement needs k in {1, 2}")
    tmax = u.max_depth()
    ts = np.linspace(0.0, tmax, m + 2)[:-1]
    levels, radii = [], []
    for t in ts:
        try:
            met = superlevel_metrics(u, t)
        except ValueError:
            break  # degenerate top levels are dropped
        r = np.sqrt(met.area / pi) if k == 1 else met.perimeter / (2 * pi)
        levels.append(t)
        radii.append(r)
    if len(levels) < 3:
        raise ValueError("too few usable levels for a rearrangement")
    radii = np.asarray(radii)
    growth = np.diff(radii)
    if growth.max() > 1e-3 * radii[0]:
        raise ValueError("level radii are not monotone: convexity assumption violated")
    radii = np.minimum.accumulate(radii)
    rr = radii[::-1]
    vv = -np.asarray(levels)[::-1]
    keep = np.concatenate([[True], np.diff(rr) > 0])
    rr, vv = rr[keep], vv[keep]
    rr = np.concatenate([[0.0], rr])
    vv = np.concatenate([[-tmax], vv])
    return RearrangedProfile(radii=rr, values=vv, k=k)


def lp_norm(u: GridField2D, p) -> float:
    """L^p norm of the field over the body (node quadrature); p may be inf."""
    vals = np.abs(u.values[u.grid.inside])
    if p == np.inf or p == "inf":
        return float(vals.max())
    if p < 1:
        raise ValueError("p must be >= 1")
    return float((np.sum(vals ** p) * u.grid.h ** 2) ** (1.0 / p))


def profile_lp_norm(prof: RearrangedProfile, p) -> float:
    if p == np.inf or p == "inf":
        return float(np.abs(prof.values).max())
    if p < 1:
        raise ValueError("p must be >= 1")
    integrand = np.abs(prof.values) ** p * prof.radii
    return float((2 * pi * np.trapezoid(integrand, prof.radii)) ** (1.0 / p))


def norm_comparison(u: GridField2D, k: int, p, m: int = 200):
    """(||u||_p, ||u*_{k-1}||_p); the rearranged norm dominates for p >= 1."""
    prof = rearrange(u, k, m)
    return lp_norm(u, p), profile_lp_norm(prof, p)


def _sw_laplacian(field: GridField2D) -> np.ndarray:
    """Shortley-Weller Laplacian of the field at inside nodes (0 elsewhere).

    Boundary arms use the Dirichlet value 0 at the crossing point.
    """
    g = field.grid
    h = g.h
    u = np.where(g.inside, field.values, 0.0)
    out = np.zeros_like(u)
    sE, sW, sN, sS = g.arms[0], g.arms[1], g.arms[2], g.arms[3]
    uE = np.where(np.roll(g.inside, -1, 0), np.roll(u, -1, 0), 0.0)
    uW = np.where(np.roll(g.inside, 1, 0), np.roll(u, 1, 0), 0.0)
    uN = np.where(np.roll(g.inside, -1, 1), np.roll(u, -1, 1), 0.0)
    uS = np.where(np.roll(g.inside, 1, 1), np.roll(u, 1, 1), 0.0)
    lap = (2 / h ** 2) * (
        uE / (sE * (sE + sW)) + uW / (sW * (sE + sW)) - u / (sE * sW)
        + uN / (sN * (sN + sS)) + uS / (sS * (sN + sS)) - u / (sN * sS)
    )
    out[g.inside] = lap[g.inside]
    return out


def _core_mask(grid: Grid2D) -> np.ndarray:
    """Inside nodes at least two cells from the boundary (full 3x3 twice)."""
    return ndimage.binary_erosion(
        grid.inside, structure=np.ones((3, 3), bool), iterations=2, border_value=0
    )


def _hessian_entries(field: GridField2D):
    u = field.values
    h = field.grid.h
    uxx = (np.roll(u, -1, 0) + np.roll(u, 1, 0) - 2 * u) / h ** 2
    uyy = (np.roll(u, -1, 1) + np.roll(u, 1, 1) - 2 * u) / h ** 2
    uxy = (
        np.roll(np.roll(u, -1, 0), -1, 1) + np.roll(np.roll(u, 1, 0), 1, 1)
        - np.roll(np.roll(u, -1, 0), 1, 1) - np.roll(np.roll(u, 1, 0), -1, 1)
    ) / (4 * h ** 2)
    return uxx, uyy, uxy


def hessian_integral_2d(u: GridField2D, k: int) -> float:
    """I_k[u] = int (-u) S_k(D^2 u).

    k = 1 uses the Shortley-Weller Laplacian up to the boundary; k = 2 uses
    centered second differences on nodes at least two cells inside, the
    missing boundary strip contributing O(h^2) because u vanishes there.
    """
    if k not in (1, 2):
        raise ValueError("planar Hessian integrals need k in {1, 2}")
    g = u.grid
    if k == 1:
        lap = _sw_laplacian(u)
        return float(np.sum(-u.values[g.inside] * lap[g.inside]) * g.h ** 2)
    core = _core_mask(g)
    uxx, uyy, uxy = _hessian_entries(u)
    det = uxx * uyy - uxy ** 2
    return float(np.sum(-u.values[core] * det[core]) * g.h ** 2)


def dirichlet_energy(u: GridField2D) -> float:
    """int |grad u|^2 by edge differences (independent route to I_1)."""
    g = u.grid
    vals = np.where(g.inside, u.values, 0.0)
    total = 0.0
    for d, sh in [(0, (-1, 0)), (2, (0, -1))]:  # +x and +y edges
        nbr_inside = np.roll(g.inside, sh, axis=(0, 1))
        nbr_vals = np.roll(vals, sh, axis=(0, 1))
        both = g.inside & nbr_inside
        total += np.sum((nbr_vals[both] - vals[both]) ** 2)
        cutf = g.inside & ~nbr_inside
        s = u.grid.arms[d][cutf]
        total += np.sum(vals[cutf] ** 2 / s)
        # arm from the other side (outside node looking back) is already
        # covered by the forward cut of the opposite direction
        cutb = ~g.inside & nbr_inside
        sb = u.grid.arms[d + 1][np.roll(cutb, (-sh[0], -sh[1]), axis=(0, 1))]
        total += np.sum(nbr_vals[cutb] ** 2 / sb)
    return float(total)


def polya_szego_gap(u: GridField2D, k: int, m: int = 200) -> float:
    """I_k[u, Omega] - I_k[u*_{k-1}, Omega*_{k-1}] (nonnegative in theory)."""
    prof = rearrange(u, k, m)
    radial = radial_hessian_quadrature(prof.radii, prof.values, 2, k)
    return hessian_integral_2d(u, k) - radial


def is_k_admissible(u: GridField2D, k: int, tol: float = 1e-8,
                    exclude: np.ndarray | None = None) -> AdmissibilityReport:
    """Discrete k-convexity check: S_1 = Delta u >= -tol_scale and, for
    k = 2, additionally det D^2 u >= -tol_scale.

    Both are evaluated with centered stencils on nodes at least two cells
    inside the boundary; sub-cell boundary slivers are too noisy for a
    pointwise sign test.  exclude masks extra nodes (e.g. a gauge kink).
    """
    if k not in (1, 2):
        raise ValueError("k must be 1 or 2")
    g = u.grid
    core = _core_mask(g)
    if exclude is not None:
        core = core & ~exclude
    uxx, uyy, uxy = _hessian_entries(u)
    s1 = (uxx + uyy)[core]
    scale1 = max(np.percentile(np.abs(s1), 95), 1e-30)
    min_s1 = float(s1.min())
    bad = s1 < -tol * scale1 - 1e-12
    min_det = np.inf
    if k == 2:
        det = (uxx * uyy - uxy ** 2)[core]
        scale2 = max(np.percentile(np.abs(det), 95), 1e-30)
        min_det = float(det.min())
        bad = np.concatenate([bad, det < -tol * scale2 - 1e-12])
    frac = float(np.mean(bad)) if len(bad) else 0.0
    return AdmissibilityReport(
        ok=not bad.any(), k=k, min_s1=min_s1, min_det=float(min_det),
        violating_fraction=frac,
    )


def levelset_lemma_check(u: GridField2D, eps: float, delta: float, k: int) -> float:
    """Residual of the level-set quermassintegral lower bound
    W_{k-1}(Omega_delta) >= W_{k-1}(Omega) * [1 - (n-k+1) max(eps, 2 delta |Omega|^{1/(k+1)})]
    for a normalized eigenfield; nonnegative up to grid error."""
    if k not in (1, 2):
        raise ValueError("k must be 1 or 2")
    n = 2
    W = quermass_2d(u.body)
    vol = W.area
    if not (0 < delta < 0.5 * vol ** (-1.0 / (k + 1))):
        raise ValueError("delta outside the admissible range")
    met = superlevel_metrics(u, delta)
    W_delta = met.area if k == 1 else met.perimeter / 2
    W_om = float(W.W[k - 1])
    factor = 1.0 - (n - k + 1) * max(eps, 2 * delta * vol ** (1.0 / (k + 1)))
    return W_delta - W_om * factor


def integral_lemma_check(u: GridField2D, eps: float, m: int = 200) -> float:
    """Residual of the level-integral inequality for the planar
    Monge-Ampere eigenfield:
    pi*eps/3 - int t^2 (W_1(Omega_t)^2 - pi |Omega_t|) dt >= 0 up to grid
    error; the integrand is a per-level isoperimetric deficit, so it is
    pointwise nonnegative."""
    tmax = u.max_depth()
    ts = np.linspace(0.0, tmax, m + 2)[:-1]
    vals = [0.0]  # t = 0 contributes nothing through the t^2 weight
    used = [0.0]
    for t in ts[1:]:
        try:
            met = superlevel_metrics(u, t)
        except ValueError:
            break
        deficit = (met.perimeter / 2) ** 2 - pi * met.area
        vals.append(t * t * deficit)
        used.append(t)
    integral = float(np.trapezoid(vals, used))
    return pi * eps / 3 - integral


def field_to_json(u: GridField2D) -> str:
    return json.dumps({
        "h_grid": u.grid.h,
        "nx": u.grid.nx,
        "ny": u.grid.ny,
        "origin": list(u.grid.origin),
        "values": u.values.ravel(order="C").tolist(),
        "body": json.loads(body_to_json(u.body)),
    })


def field_from_json(data) -> GridField2D:
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    body = body_from_json(data["body"])
    grid = Grid2D(body, data["h_grid"], origin=data["origin"],
                  shape=(data["nx"], data["ny"]))
    values = np.asarray(data["values"], dtype=float).reshape(data["nx"], data["ny"])
    return GridField2D(grid, values)
