from math import pi

import numpy as np
import pytest

from hessfk.eigensolver2d import (
    epsilon_for,
    laplace_eigen,
    ma_eigen_ellipse,
    ma_rayleigh_upper,
)
from hessfk.field2d import _core_mask, _hessian_entries
from hessfk.geometry import make_disk, make_ellipse, make_smoothed_polygon, quermass_2d
from hessfk.radial_spectra import shoot_eigen

from conftest import J01, UNIT_SQUARE, agm_ellipse_perimeter


# --- finite-difference Laplacian ---------------------------------------------


def test_disk_eigenvalue_matches_bessel():
    est = laplace_eigen(make_disk(1.0, 1024), 1 / 128, with_error=False)
    assert est.value == pytest.approx(J01 ** 2, rel=5e-3)
    assert est.kind == "discretized"


def test_disk_scaling_law():
    small = laplace_eigen(make_disk(1.0, 1024), 1 / 96, with_error=False)
    big = laplace_eigen(make_disk(2.0, 1024), 1 / 96, with_error=False)
    assert big.value == pytest.approx(small.value / 4, rel=5e-3)


def test_ellipse_within_one_percent_of_extrapolated():
    body = make_ellipse(2.0, 1.0, 1024)
    vals = {h: laplace_eigen(body, h, with_error=False).value
            for h in (1 / 32, 1 / 64, 1 / 128)}
    extrapolated = (4 * vals[1 / 128] - vals[1 / 64]) / 3
    assert vals[1 / 64] == pytest.approx(extrapolated, rel=0.01)


def test_eigenfield_normalized_and_negative():
    est = laplace_eigen(make_disk(1.0, 1024), 1 / 64, with_error=False)
    fld = est.eigenfield
    vals = fld.values[fld.mask]
    assert np.all(vals <= 1e-12)
    assert np.sum(vals ** 2) * fld.h_grid ** 2 == pytest.approx(1.0, rel=1e-10)


def test_richardson_error_estimate_brackets_truth():
    est = laplace_eigen(make_disk(1.0, 1024), 1 / 64)
    assert abs(est.value - J01 ** 2) <= 3 * est.error_estimate


def test_extrapolated_value_sharper():
    raw = laplace_eigen(make_disk(1.0, 1024), 1 / 64, with_error=False)
    extr = laplace_eigen(make_disk(1.0, 1024), 1 / 64, extrapolate=True)
    assert abs(extr.value - J01 ** 2) < abs(raw.value - J01 ** 2) / 5


def test_domain_monotonicity():
    lam_disk = laplace_eigen(make_disk(1.0, 1024), 1 / 64, with_error=False).value
    lam_ell = laplace_eigen(make_ellipse(1.3, 1.1, 1024), 1 / 64, with_error=False).value
    assert lam_ell < lam_disk


def test_mask_too_coarse_rejected():
    with pytest.raises(ValueError):
        laplace_eigen(make_disk(1.0, 512), 1 / 8)


# --- affine Monge-Ampere oracle ----------------------------------------------


def test_ma_ellipse_identity_map():
    assert ma_eigen_ellipse(1.0, 1.0).value == pytest.approx(
        shoot_eigen(2, 2).lambda1, rel=1e-12
    )


def test_ma_ellipse_dilation_scaling():
    lam = shoot_eigen(2, 2).lambda1
    for t in (0.5, 2.0, 3.0):
        assert ma_eigen_ellipse(t, t).value == pytest.approx(lam / t ** 4, rel=1e-12)


def test_ma_ellipse_unit_product_invariance():
    lam = shoot_eigen(2, 2).lambda1
    for a in (1.05, 1.2, 1.5):
        assert ma_eigen_ellipse(a, 1 / a).value == pytest.approx(lam, rel=1e-12)


def _ma_residual(a, h):
    """L2 residual of det D^2 u = lambda (-u)^2 on the affine eigenfield."""
    est = ma_eigen_ellipse(a, 1 / a, field_h=h)
    fld = est.eigenfield
    core = _core_mask(fld.grid)
    uxx, uyy, uxy = _hessian_entries(fld)
    det = (uxx * uyy - uxy ** 2)[core]
    rhs = est.value * fld.values[core] ** 2
    return float(np.sqrt(np.mean((det - rhs) ** 2)))


def test_ma_residual_decreases_under_refinement():
    r_coarse = _ma_residual(1.2, 1 / 64)
    r_fine = _ma_residual(1.2, 1 / 128)
    assert r_fine < r_coarse / 1.5


# --- Rayleigh upper bounds ----------------------------------------------------


def test_rayleigh_disk_tight():
    lam = shoot_eigen(2, 2).lambda1
    est = ma_rayleigh_upper(make_disk(1.0, 1024), h=1 / 128)
    assert est.kind == "upper_bound"
    assert est.value <= 8.0
    assert lam <= est.value <= 1.05 * lam


def test_rayleigh_dominates_exact_on_ellipses():
    for a in (1.1, 1.2):
        upper = ma_rayleigh_upper(make_ellipse(a, 1 / a, 1024), h=1 / 128)
        exact = ma_eigen_ellipse(a, 1 / a)
        assert exact.value <= upper.value <= 1.05 * exact.value


def test_rayleigh_smoothed_square_epsilon_decreases():
    eps = []
    for rho in (0.5, 2.0):
        body = make_smoothed_polygon(UNIT_SQUARE, rho, 1024)
        est = ma_rayleigh_upper(body, h=1 / 128)
        eps.append(epsilon_for(body, 2, est))
    assert eps[0] > eps[1] > 0


# --- epsilon ------------------------------------------------------------------


def test_epsilon_disk_exact_zero():
    disk = make_disk(1.0, 1024)
    assert abs(epsilon_for(disk, 2, ma_eigen_ellipse(1.0, 1.0))) < 1e-10


def test_epsilon_ellipse_analytic():
    a = 1.15
    body = make_ellipse(a, 1 / a, 1024)
    eps = epsilon_for(body, 2, ma_eigen_ellipse(a, 1 / a))
    P = agm_ellipse_perimeter(a, 1 / a)
    assert eps == pytest.approx((P / (2 * pi)) ** 4 - 1, rel=1e-7)


def test_epsilon_fd_shrinks_toward_ball():
    eps = []
    for a in (1.1, 1.05):
        body = make_ellipse(a, 1 / a, 1024)
        est = laplace_eigen(body, 1 / 64, extrapolate=True)
        eps.append(epsilon_for(body, 1, est))
    assert eps[0] > eps[1] > 0


def test_epsilon_rejects_mismatched_k():
    disk = make_disk(1.0, 1024)
    with pytest.raises(ValueError):
        epsilon_for(disk, 1, ma_eigen_ellipse(1.0, 1.0))


def test_faber_krahn_small_corpus():
    bodies = [
        (make_ellipse(1.2, 1 / 1.2, 1024), (1.2, 1 / 1.2)),
        (make_smoothed_polygon(UNIT_SQUARE, 1.0, 1024), None),
    ]
    for body, axes in bodies:
        est1 = laplace_eigen(body, 1 / 64, extrapolate=True)
        assert epsilon_for(body, 1, est1) >= -1e-8
        est2 = ma_eigen_ellipse(*axes) if axes else ma_rayleigh_upper(body, 1 / 128)
        assert epsilon_for(body, 2, est2) >= -1e-8
