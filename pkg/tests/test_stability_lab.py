import json
import math

import numpy as np
import pytest

from hessfk.stability_lab import (
    CSV_COLUMNS,
    FamilySpec,
    SweepRecord,
    check_remark_deficiency,
    check_theorem_main,
    check_theorem_main2,
    export,
    records_from_csv,
    records_from_json,
    records_to_csv,
    run_sweep,
    volume_lower_bound_gap,
    volume_ratio,
)


@pytest.fixture(scope="module")
def ellipse_records():
    spec = FamilySpec(
        kind="ellipse_unit_product",
        params=tuple(np.geomspace(1.002, 1.3, 10)),
        k=2,
        lemma_h=None,
    )
    return run_sweep(spec)


def synthetic_records(eps, d, D=None, Delta=None, dH=None):
    D = d if D is None else D
    Delta = d if Delta is None else Delta
    dH = d if dH is None else dH
    out = []
    for i, e in enumerate(eps):
        out.append(SweepRecord(
            family="synthetic", param=1.0 + i, eps=e,
            d_k=d[i], D_k=D[i], Delta=Delta[i], delta_H=dH[i],
            W0=math.pi, W1=math.pi, r_in=1, R_circ=1, R_star=1,
        ))
    return out


# --- sweeps -------------------------------------------------------------------


def test_sweep_counts_and_monotone_eps(ellipse_records):
    recs = ellipse_records
    assert len(recs) == 10
    eps = [r.eps for r in recs]
    assert np.all(np.diff(eps) > 0)  # epsilon grows away from the ball
    for r in recs:
        assert min(r.d_k, r.D_k, r.Delta, r.delta_H) >= -1e-9
        assert r.eps >= -1e-9


def test_sweep_remark_metrics_nonnegative(ellipse_records):
    for r in ellipse_records:
        assert r.remark_interior_deficit >= -1e-9
        assert r.remark_exterior_deficit >= -1e-9


def test_sweep_smoothed_polygon_deficits_decrease():
    spec = FamilySpec(
        kind="smoothed_polygon", params=(0.5, 1.5, 4.0), k=2, rayleigh_h=1 / 96,
    )
    recs = run_sweep(spec)
    eps = [r.eps for r in recs]
    d2 = [r.d_k for r in recs]
    assert eps[0] > eps[1] > eps[2] > 0
    assert d2[0] > d2[1] > d2[2] > 0


def test_family_spec_validation():
    with pytest.raises(ValueError):
        FamilySpec(kind="pentagon", params=(1.1,), k=2)
    with pytest.raises(ValueError):
        FamilySpec(kind="ellipse_area", params=(1.1,), k=3)


# --- theorem checks -----------------------------------------------------------


def test_theorem_main_on_ellipse_family(ellipse_records):
    verdicts = check_theorem_main(ellipse_records)
    quantities = [v.quantity for v in verdicts]
    assert quantities == ["d_k", "D_k", "delta_H"]
    for v in verdicts:
        assert v.passed
        assert v.exponent_fitted >= v.exponent_required - 0.05
        assert np.isfinite(v.constant_estimate)
        assert v.slope_ci[0] <= v.exponent_fitted <= v.slope_ci[1]
    # ellipse families decay like sqrt(eps), much steeper than required
    assert verdicts[0].exponent_fitted == pytest.approx(0.5, abs=0.05)


def test_remark_deficiency_verdict(ellipse_records):
    v = check_remark_deficiency(ellipse_records)
    assert v.quantity == "Delta"
    assert v.passed


def test_degenerate_family_rejected():
    recs = synthetic_records([0.0] * 8, [0.0] * 8)
    with pytest.raises(ValueError):
        check_theorem_main(recs)


def test_insufficient_range_rejected():
    eps = np.geomspace(1e-3, 5e-3, 8)
    recs = synthetic_records(eps, np.sqrt(eps))
    with pytest.raises(ValueError):
        check_theorem_main(recs)


def test_nonvanishing_deficits_fail():
    eps = np.geomspace(1e-6, 1e-1, 10)
    recs = synthetic_records(eps, [0.4] * 10)  # deficits do not tend to 0
    verdicts = check_theorem_main(recs)
    assert not any(v.passed for v in verdicts)


def test_main2_exponents_synthetic_powerlaw():
    eps = np.geomspace(1e-6, 1e-1, 10)
    recs = synthetic_records(eps, np.sqrt(eps), D=eps ** 0.25, dH=eps ** 0.25)
    verdicts = check_theorem_main2(recs, n=2, k=1)
    assert [round(v.exponent_required, 6) for v in verdicts] == [0.5, 0.2, 0.2]
    assert all(v.passed for v in verdicts)


def test_main2_alpha_value():
    v = check_theorem_main2(
        synthetic_records(np.geomspace(1e-6, 1e-1, 8),
                          np.sqrt(np.geomspace(1e-6, 1e-1, 8))),
        n=2, k=1,
    )[0]
    assert v.exponent_required == pytest.approx(0.5)


# --- volume lower bound -------------------------------------------------------


def test_volume_bound_disk_values():
    rec = SweepRecord(family="disk", param=1.0, eps=0.0, d_k=0, D_k=0, Delta=0,
                      delta_H=0, W0=math.pi, W1=math.pi, r_in=1, R_circ=1, R_star=1)
    assert volume_lower_bound_gap(rec, 2, 2) >= 0
    assert volume_ratio(rec, 2, 2) == pytest.approx(1 / math.pi, rel=1e-12)
    assert volume_ratio(rec, 2, 1) == pytest.approx(1.0, rel=1e-12)


def test_volume_bound_on_sweep(ellipse_records):
    for r in ellipse_records:
        assert r.volume_bound_gap >= -1e-8


def test_volume_ratio_scale_invariance():
    t = 3.0
    rec = SweepRecord(family="x", param=1.0, eps=0.01, d_k=0, D_k=0, Delta=0,
                      delta_H=0, W0=2.3, W1=1.9, r_in=1, R_circ=1, R_star=1)
    scaled = SweepRecord(family="x", param=1.0, eps=0.01, d_k=0, D_k=0, Delta=0,
                         delta_H=0, W0=t * t * 2.3, W1=t * 1.9, r_in=t, R_circ=t,
                         R_star=t)
    assert volume_ratio(scaled, 2, 2) == pytest.approx(volume_ratio(rec, 2, 2),
                                                       rel=1e-12)


# --- persistence --------------------------------------------------------------


def _records_equal(a, b):
    if a.family != b.family:
        return False
    for c in SweepRecord.__dataclass_fields__:
        if c == "family":
            continue
        va, vb = getattr(a, c), getattr(b, c)
        if not (va == vb or (math.isnan(va) and math.isnan(vb))):
            return False
    return True


def test_csv_header_only_for_empty():
    text = records_to_csv([])
    assert text.splitlines() == [",".join(CSV_COLUMNS)]


def test_csv_line_count(ellipse_records):
    text = records_to_csv(ellipse_records)
    assert len(text.splitlines()) == len(ellipse_records) + 1


def test_csv_roundtrip_exact(ellipse_records):
    back = records_from_csv(records_to_csv(ellipse_records))
    for a, b in zip(ellipse_records, back):
        for c in CSV_COLUMNS[1:]:
            va, vb = getattr(a, c), getattr(b, c)
            assert va == vb or (math.isnan(va) and math.isnan(vb))


def test_json_roundtrip_and_determinism(tmp_path, ellipse_records):
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    verdicts = check_theorem_main(ellipse_records)
    export(ellipse_records, verdicts, p1, format="json")
    export(ellipse_records, verdicts, p2, format="json")
    assert p1.read_bytes() == p2.read_bytes()
    back = records_from_json(p1.read_text())
    assert all(_records_equal(a, b) for a, b in zip(ellipse_records, back))
    payload = json.loads(p1.read_text())
    assert payload["verdicts"][0]["passed"] is True


def test_export_rejects_unknown_format(tmp_path, ellipse_records):
    with pytest.raises(ValueError):
        export(ellipse_records, None, tmp_path / "x.bin", format="parquet")
