from math import pi

import numpy as np
import pytest

from hessfk.eigensolver2d import ma_eigen_ellipse
from hessfk.field2d import (
    dirichlet_energy,
    field_from_json,
    field_to_json,
    hessian_integral_2d,
    integral_lemma_check,
    is_k_admissible,
    levelset_lemma_check,
    lp_norm,
    make_field,
    norm_comparison,
    polya_szego_gap,
    rearrange,
    superlevel_metrics,
)
from hessfk.geometry import make_disk, make_ellipse, make_smoothed_polygon, quermass_2d

from conftest import agm_ellipse_perimeter


def paraboloid(X, Y):
    return (X ** 2 + Y ** 2 - 1) / 2


def stretched_paraboloid(a, b):
    return lambda X, Y: ((X / a) ** 2 + (Y / b) ** 2 - 1) / 2


@pytest.fixture(scope="module")
def disk_parab():
    return make_field(make_disk(1.0, 1024), 1 / 128, paraboloid)


@pytest.fixture(scope="module")
def disk_parab_fine():
    return make_field(make_disk(1.0, 1024), 1 / 256, paraboloid)


@pytest.fixture(scope="module")
def ellipse_parab():
    a = 1.2
    return make_field(make_ellipse(a, 1 / a, 1024), 1 / 256, stretched_paraboloid(a, 1 / a))


# --- level sets --------------------------------------------------------------


def test_paraboloid_level_metrics(disk_parab):
    met = superlevel_metrics(disk_parab, 0.375)
    assert met.area == pytest.approx(pi * 0.25, rel=0.02)
    assert met.perimeter == pytest.approx(pi, rel=0.02)
    assert met.hull_discrepancy < 1e-6


def test_zero_level_recovers_body(disk_parab):
    met = superlevel_metrics(disk_parab, 0.0)
    assert met.area == pytest.approx(pi, rel=0.01)
    assert met.perimeter == pytest.approx(2 * pi, rel=0.01)


def test_empty_level_raises(disk_parab):
    with pytest.raises(ValueError):
        superlevel_metrics(disk_parab, 0.5)
    with pytest.raises(ValueError):
        superlevel_metrics(disk_parab, 0.499999)


def test_level_metrics_monotone(disk_parab):
    ts = np.linspace(0, 0.45, 10)
    mets = [superlevel_metrics(disk_parab, t) for t in ts]
    areas = [m.area for m in mets]
    perims = [m.perimeter for m in mets]
    assert np.all(np.diff(areas) < 0)
    assert np.all(np.diff(perims) < 0)


def test_grid_refinement_improves_level_metrics():
    # first-order or better convergence at the curved boundary
    errs = []
    for h in (1 / 32, 1 / 64):
        fld = make_field(make_disk(1.0, 1024), h, paraboloid)
        met = superlevel_metrics(fld, 0.375)
        errs.append(abs(met.area - pi * 0.25))
    assert errs[0] / errs[1] >= 1.7


# --- rearrangement -----------------------------------------------------------


def test_rearrange_fixes_radial_fields(disk_parab):
    prof = rearrange(disk_parab, 1)
    expect = (prof.radii ** 2 - 1) / 2
    assert np.abs(prof.values - expect).max() < 2e-3


def test_rearrange_preserves_min_exactly(disk_parab):
    prof = rearrange(disk_parab, 1)
    inside_min = disk_parab.values[disk_parab.mask].min()
    assert prof.values[0] == inside_min


def test_rearrange_k2_matches_agm_per_level(ellipse_parab):
    a = 1.2
    prof = rearrange(ellipse_parab, 2, m=80)
    # level {-u > t} is the ellipse scaled by s = sqrt(1 - 2t)
    for rr, vv in zip(prof.radii[2::17], prof.values[2::17]):
        s = np.sqrt(1 + 2 * vv)
        if s < 0.2:
            continue
        expect = agm_ellipse_perimeter(a * s, s / a) / (2 * pi)
        assert rr == pytest.approx(expect, rel=5e-3)


def test_rearrange_invalid_k(disk_parab):
    with pytest.raises(ValueError):
        rearrange(disk_parab, 3)


# --- norms -------------------------------------------------------------------


def test_norm_comparison_radial_equality(disk_parab):
    for p in (1, 2, 3):
        n_u, n_star = norm_comparison(disk_parab, 1, p)
        assert n_star == pytest.approx(n_u, rel=5e-3)


def test_norm_comparison_stretched(ellipse_parab):
    for p in (1, 2, 3):
        n_u, n_star = norm_comparison(ellipse_parab, 2, p)
        assert n_star >= n_u - 1e-3


def test_linf_preserved_exactly(ellipse_parab):
    n_u, n_star = norm_comparison(ellipse_parab, 2, np.inf)
    assert n_star == n_u


def test_lp_norm_validates(disk_parab):
    with pytest.raises(ValueError):
        lp_norm(disk_parab, 0.5)


# --- Hessian integrals -------------------------------------------------------


def test_hessian_integral_k1_paraboloid(disk_parab):
    assert hessian_integral_2d(disk_parab, 1) == pytest.approx(pi / 2, rel=0.02)


def test_hessian_integral_k2_paraboloid(disk_parab):
    assert hessian_integral_2d(disk_parab, 2) == pytest.approx(pi / 4, rel=0.02)


def test_hessian_integral_zero_field():
    fld = make_field(make_disk(1.0, 512), 1 / 64, lambda X, Y: np.zeros_like(X))
    assert hessian_integral_2d(fld, 1) == 0.0
    assert hessian_integral_2d(fld, 2) == 0.0


def test_gradient_form_agrees_with_laplacian_form(disk_parab):
    i1 = hessian_integral_2d(disk_parab, 1)
    e = dirichlet_energy(disk_parab)
    assert abs(i1 - e) < 0.05 * disk_parab.h_grid  # two routes, one quantity


# --- Polya-Szego -------------------------------------------------------------


def test_polya_szego_radial_gap_vanishes(disk_parab_fine):
    assert abs(polya_szego_gap(disk_parab_fine, 1)) < 1e-3
    assert abs(polya_szego_gap(disk_parab_fine, 2)) < 1e-3


def test_polya_szego_stretched(ellipse_parab):
    assert polya_szego_gap(ellipse_parab, 1) > 0
    assert polya_szego_gap(ellipse_parab, 2) > -1e-3


# --- admissibility -----------------------------------------------------------


def test_paraboloid_admissible(disk_parab):
    assert is_k_admissible(disk_parab, 1).ok
    assert is_k_admissible(disk_parab, 2).ok


def test_sine_bump_k2_fails_near_corners():
    inner = [(0.1, 0.1), (0.9, 0.1), (0.9, 0.9), (0.1, 0.9)]
    body = make_smoothed_polygon(inner, 0.08, 1024)
    fld = make_field(body, 1 / 128, lambda X, Y: -np.sin(pi * X) * np.sin(pi * Y))
    rep1 = is_k_admissible(fld, 1)
    rep2 = is_k_admissible(fld, 2)
    assert rep1.ok
    assert not rep2.ok
    assert rep2.min_det < 0


def test_concave_field_inadmissible():
    fld = make_field(make_disk(1.0, 512), 1 / 64, lambda X, Y: -paraboloid(X, Y) - 1.0)
    assert not is_k_admissible(fld, 1).ok


# --- lemma residuals ---------------------------------------------------------


def test_levelset_lemma_ball_eigenfunction():
    fld = ma_eigen_ellipse(1.0, 1.0, field_h=1 / 128).eigenfield
    for delta in (0.01, 0.05, 0.1):
        assert levelset_lemma_check(fld, 0.0, delta, 2) >= -1e-3


def test_levelset_lemma_small_delta_nonnegative():
    fld = ma_eigen_ellipse(1.0, 1.0, field_h=1 / 128).eigenfield
    assert levelset_lemma_check(fld, 0.01, 1e-3, 2) >= -1e-3


def test_levelset_lemma_delta_range():
    fld = ma_eigen_ellipse(1.0, 1.0, field_h=1 / 128).eigenfield
    vol = quermass_2d(fld.body).area
    with pytest.raises(ValueError):
        levelset_lemma_check(fld, 0.0, 0.6 * vol ** (-1 / 3), 2)


def test_integral_lemma_integrand_pointwise_nonnegative():
    fld = ma_eigen_ellipse(1.1, 1 / 1.1, field_h=1 / 128).eigenfield
    ts = np.linspace(0.05, 0.9 * fld.max_depth(), 12)
    for t in ts:
        met = superlevel_metrics(fld, t)
        deficit = (met.perimeter / 2) ** 2 - pi * met.area
        assert deficit >= -1e-4  # isoperimetric inequality per level


def test_integral_lemma_disk_within_grid_tolerance():
    fld = ma_eigen_ellipse(1.0, 1.0, field_h=1 / 256).eigenfield
    assert abs(integral_lemma_check(fld, 0.0)) <= 1e-3


# --- serialization -----------------------------------------------------------


def test_field_json_roundtrip():
    fld = make_field(make_disk(1.0, 512), 1 / 32, paraboloid)
    back = field_from_json(field_to_json(fld))
    assert np.allclose(back.values, fld.values)
    assert back.grid.nx == fld.grid.nx
    assert np.array_equal(back.mask, fld.mask)
