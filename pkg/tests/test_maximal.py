from collections import Counter

import numpy as np
import pytest

from maxcurves import forms, groups, maximal, plane, sziklai
from maxcurves.forms import TernaryForm, fermat_form, parse_form
from maxcurves.gf import field_of_order
from maxcurves.maximal import FLEX_MU, TRIANGLE_MU, MuQuadruple

# Values confirmed by the exhaustive scan and by per-element substitution
# over all of PGL(3,4); see the decisions ledger for the discrepancy with
# the figures 72 / 840 / 3080.
HERMITIAN_STAB, HERMITIAN_ORBIT = 216, 280
TRIANGLE_STAB, TRIANGLE_ORBIT = 27, 2240
MAXIMAL_TOTAL = 2520

N_HISTOGRAM = {
    0: 960, 1: 2940, 2: 30240, 3: 20160, 4: 90720, 5: 35931, 6: 92736,
    7: 20160, 8: 40320, 9: 7980, 10: 6048, 12: 1120, 13: 210,
}


def test_cubic_array():
    arr = maximal.cubic_coefficient_array()
    assert arr.shape == (349525, 10)
    assert len(np.unique(arr, axis=0)) == len(arr)
    first = arr[np.arange(len(arr)), (arr != 0).argmax(axis=1)]
    assert (first == 1).all()
    rows = {tuple(r) for r in arr.tolist()}
    F4 = maximal.f4()
    assert fermat_form(F4, 3).coeffs in rows
    assert parse_form("x0^3 + w*x1^3 + w2*x2^3", F4).coeffs in rows


def test_enumerate_stream_prefix():
    it = maximal.enumerate_cubics_f4()
    first = [next(it) for _ in range(3)]
    assert [f.coeffs for f in first] == [tuple(r) for r in maximal.cubic_coefficient_array()[:3].tolist()]


def test_scan_totals(cubic_scan):
    assert cubic_scan.total == 349525
    assert dict(cubic_scan.n_histogram) == N_HISTOGRAM
    assert sum(cubic_scan.n_histogram.values()) == 349525
    assert max(cubic_scan.free_histogram) == 9
    assert cubic_scan.free_histogram[9] == MAXIMAL_TOTAL
    assert cubic_scan.singular_free_max_n <= 6


def test_scan_in_parallel_matches(cubic_scan):
    par = maximal.scan_cubics(jobs=2, chunk=50000)
    assert par.n_histogram == cubic_scan.n_histogram
    assert par.maximal_rows == cubic_scan.maximal_rows


def test_scan_slice_matches_per_form_computation():
    F4 = maximal.f4()
    res = maximal._scan_range((120000, 121500))
    n, free = [], []
    for row in maximal.cubic_coefficient_array()[120000:121500].tolist():
        f = TernaryForm(F4, 3, tuple(row))
        n.append(forms.count_points(f))
        if not forms.has_linear_component(f):
            free.append(n[-1])
    assert res.n_histogram == Counter(n)
    assert res.free_histogram == Counter(free)


def test_search_contains_known_curves(maximal_report):
    F4 = maximal.f4()
    found = {f.coeffs for f in maximal_report.maximal}
    assert len(found) == MAXIMAL_TOTAL
    assert fermat_form(F4, 3).coeffs in found
    assert parse_form("x0^3 + w*x1^3 + w2*x2^3", F4).coeffs in found


def test_classes(maximal_report):
    herm, tri = maximal_report.classes
    assert (herm.hermitian, herm.sziklai, herm.flex_case) == (True, False, True)
    assert (tri.hermitian, tri.sziklai, tri.flex_case) == (False, True, False)
    assert (herm.stabilizer, herm.orbit_size) == (HERMITIAN_STAB, HERMITIAN_ORBIT)
    assert (tri.stabilizer, tri.orbit_size) == (TRIANGLE_STAB, TRIANGLE_ORBIT)
    assert herm.mu == FLEX_MU and tri.mu == TRIANGLE_MU
    assert str(herm.canonical) == "x0^2*x2 + x0*x2^2 + x1^3"
    assert str(tri.canonical) == "x0^2*x2 + x0*x1^2 + x1*x2^2"
    assert herm.orbit_size + tri.orbit_size == len(maximal_report.maximal)


def test_triangle_class_is_the_family_orbit(maximal_report):
    F4 = maximal.f4()
    (rep,) = sziklai.classify(F4)
    assert groups.canonical_form(sziklai.to_form(rep)) == maximal_report.classes[1].canonical


def test_report_json(maximal_report):
    js = maximal_report.to_json()
    assert js["total_forms"] == 349525
    assert js["maximal_count"] == MAXIMAL_TOTAL
    assert [c["orbit_size"] for c in js["classes"]] == [HERMITIAN_ORBIT, TRIANGLE_ORBIT]
    assert js["n_histogram"]["13"] == 210


def test_mu_examples(F4):
    assert maximal.mu_quadruple(parse_form("x0^3 + w*x1^3 + w2*x2^3", F4)) == (3, 0, 9, 9)
    assert maximal.mu_quadruple(fermat_form(F4, 3)) == (0, 9, 0, 12)
    assert maximal.mu_identities_hold(MuQuadruple(0, 9, 0, 12))
    assert not maximal.mu_identities_hold(MuQuadruple(1, 8, 0, 12))
    with pytest.raises(ValueError):
        maximal.mu_quadruple(fermat_form(field_of_order(5), 3))


def test_mu_per_member(maximal_report):
    table = {c.canonical: c.mu for c in maximal_report.classes}
    orbit_of = {}
    for canon, orb, _ in maximal.orbit_partition(maximal_report.maximal):
        for row in orb.tolist():
            orbit_of[tuple(row)] = canon
    for f in maximal_report.maximal:
        mu = maximal.mu_quadruple(f)
        assert mu == table[orbit_of[f.coeffs]]
        assert maximal.mu_identities_hold(mu)


def test_secant_patterns_on_sample(maximal_report):
    rng = np.random.default_rng(5)
    for i in rng.choice(len(maximal_report.maximal), 60, replace=False):
        f = maximal_report.maximal[i]
        assert maximal.secant_patterns_hold(f)
        if maximal.mu_quadruple(f) == TRIANGLE_MU:
            assert len(maximal.zero_lines(f)) == 3
            assert not maximal.zero_lines_concurrent(f)


def test_flex_case(F4):
    assert maximal.flex_case_properties(fermat_form(F4, 3))
    assert not maximal.flex_case_properties(parse_form("x0^3 + w*x1^3 + w2*x2^3", F4))
    assert not maximal.flex_case_properties(parse_form("x0^3 + x1^3", F4))


def test_orbit_partition_rejects_non_invariant_sets(F4):
    with pytest.raises(maximal.InconsistencyError):
        maximal.orbit_partition([fermat_form(F4, 3)])
    assert maximal.orbit_partition([]) == []


def test_zero_lines_of_triangle_curve(F4):
    f = parse_form("x0^3 + w*x1^3 + w2*x2^3", F4)
    assert set(maximal.zero_lines(f)) == {plane.Line.of(F4, 1, 0, 0), plane.Line.of(F4, 0, 1, 0), plane.Line.of(F4, 0, 0, 1)}


def test_quartic_sample_small():
    s = maximal.quartic_bound_sample(n=5000, seed=1)
    assert s.linear_free > 4000
    assert s.max_points <= 13 or s.violators_equivalent


def test_exceptional_quartic_exceeds_bound(F4):
    q4 = forms.exceptional_quartic(F4)
    assert forms.count_points(q4) == 14
    assert not forms.has_linear_component(q4)


@pytest.mark.slow
def test_hermitian_stabilizer_by_direct_substitution(F4):
    f = fermat_form(F4, 3)
    assert sum(groups.act_on_form(M, f) == f for M in groups.pgl_enumerate(F4)) == HERMITIAN_STAB
