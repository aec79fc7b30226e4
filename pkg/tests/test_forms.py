import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from maxcurves import forms, plane
from maxcurves.forms import (
    FormSyntaxError,
    LineComponentError,
    NotOnCurveError,
    SingularPointError,
    TernaryForm,
    count_points,
    fermat_form,
    parse_form,
)
from maxcurves.gf import embedding_table, field_ctx, field_of_order
from maxcurves.plane import Line, Point


def random_forms(q, d):
    n = len(forms.monomials(d))
    return st.lists(st.integers(0, q - 1), min_size=n, max_size=n).filter(any).map(
        lambda c: TernaryForm(field_of_order(q), d, tuple(c))
    )


@pytest.fixture(scope="module")
def fermat3(F4):
    return fermat_form(F4, 3)


@pytest.fixture(scope="module")
def sz(F4):
    return parse_form("x0^3 + w*x1^3 + w2*x2^3", F4)


def test_monomial_order():
    assert forms.monomials(2) == ((2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2))
    assert len(forms.monomials(4)) == 15


def test_evaluate_examples(F4, fermat3, sz):
    assert forms.evaluate(fermat3, Point.of(F4, 0, 1, 1)) == 0
    assert forms.evaluate(fermat3, Point.of(F4, 1, 0, 0)) == 1
    assert forms.evaluate(sz, Point.of(F4, 1, 1, 1)) == 0


def test_scalar_normalization(F4, w):
    f = TernaryForm(F4, 1, (0, w, w))
    assert f.coeffs == (0, 1, 1)
    with pytest.raises(ValueError):
        TernaryForm(F4, 1, (0, 0, 0))
    with pytest.raises(ValueError):
        TernaryForm(F4, 2, (1, 0, 0))


def test_counts(F4, fermat3, sz):
    assert count_points(fermat3) == 9
    assert count_points(sz) == 9
    q4 = forms.exceptional_quartic(F4)
    assert count_points(q4) == 14 > forms.bounds(4, 4)[1]
    assert not forms.has_linear_component(q4)


def test_linear_components(F4, fermat3, sz):
    f = parse_form("x0*(x0^2 + x1*x2)", F4)
    assert forms.has_linear_component(f)
    assert forms.linear_components(f) == [Line.of(F4, 1, 0, 0)]
    assert not forms.has_linear_component(fermat3)
    assert not forms.has_linear_component(sz)
    # x0^3 + x1^3 splits into three lines over F4
    assert len(forms.linear_components(parse_form("x0^3 + x1^3", F4))) == 3


def test_division_by_line_reconstructs(F4):
    f = parse_form("x0*(x0^2 + x1*x2) + x1^3", F4)
    for l in plane.enumerate_lines(F4):
        quot, rem = forms.divide_by_line(f, l)
        lin = {e: c for e, c in zip(((1, 0, 0), (0, 1, 0), (0, 0, 1)), l.coeffs) if c}
        back = forms.poly_add(F4, forms.poly_mul(F4, quot, lin), rem)
        assert back == f.terms()


def test_spectrum_examples(F4, sz):
    assert forms.line_spectrum(sz) == {0: 3, 2: 9, 3: 9}
    F3 = field_of_order(3)
    # the degree q-1 member of the same family over F3 is a conic
    assert forms.line_spectrum(parse_form("x0^2 + x1^2 + x2^2", F3)) == {0: 3, 1: 4, 2: 6}


@given(random_forms(4, 3))
def test_spectrum_invariants_q4(f):
    spec = forms.line_spectrum(f)
    q = 4
    assert sum(spec.values()) == q * q + q + 1
    assert sum(k * v for k, v in spec.items()) == (q + 1) * count_points(f)


@given(random_forms(5, 4))
def test_spectrum_invariants_q5(f):
    spec = forms.line_spectrum(f)
    assert sum(spec.values()) == 31
    assert sum(k * v for k, v in spec.items()) == 6 * count_points(f)


def test_partials_examples(F4):
    f = parse_form("x0^3 + x1^3", F4)
    d0, d1, d2 = forms.partials(f)
    assert dict(zip(forms.monomials(2), d0))[(2, 0, 0)] == 1
    assert not any(d2)
    assert dict(zip(forms.monomials(2), d1))[(0, 2, 0)] == 1


@pytest.mark.parametrize("q,d", [(4, 3), (5, 3), (5, 4), (7, 2), (9, 3)])
def test_euler_relation(q, d):
    ctx = field_of_order(q)
    rng = np.random.default_rng(q * 10 + d)
    for _ in range(10):
        c = rng.integers(0, q, len(forms.monomials(d)))
        c[0] = 1
        f = TernaryForm(ctx, d, tuple(int(x) for x in c))
        dd = ctx.from_int(d)
        for P in plane.enumerate_points(ctx):
            g = forms.gradient(f, P)
            lhs = ctx.sum(ctx.mul(x, y) for x, y in zip(P, g))
            assert lhs == ctx.mul(dd, forms.evaluate(f, P))


def test_tangent_line(F4, fermat3, sz):
    P = Point.of(F4, 0, 1, 1)
    T = forms.tangent_line(fermat3, P)
    assert T == Line.of(F4, 0, 1, 1)
    assert forms.intersection_multiplicity(fermat3, T, P) == 3
    with pytest.raises(NotOnCurveError):
        forms.tangent_line(fermat3, Point.of(F4, 1, 0, 0))
    with pytest.raises(SingularPointError):
        forms.tangent_line(parse_form("x0^3 + x1^3", F4), Point.of(F4, 0, 0, 1))
    for f in (fermat3, sz):
        for P in forms.rational_points(f):
            T = forms.tangent_line(f, P)
            assert forms.intersection_multiplicity(f, T, P) >= 2
            others = [l for l in plane.lines_through(P) if l != T]
            assert all(forms.intersection_multiplicity(f, l, P) == 1 for l in others)


def test_intersection_multiplicity_errors(F4):
    f = parse_form("x0*(x0^2 + x1*x2)", F4)
    with pytest.raises(LineComponentError):
        forms.intersection_multiplicity(f, Line.of(F4, 1, 0, 0), Point.of(F4, 0, 1, 0))
    with pytest.raises(ValueError):
        forms.intersection_multiplicity(f, Line.of(F4, 1, 0, 0), Point.of(F4, 1, 0, 0))
    assert forms.intersection_multiplicity(f, Line.of(F4, 0, 1, 0), Point.of(F4, 1, 0, 0)) == 0


@given(random_forms(4, 3))
def test_section_multiplicities_bounded_by_degree(f):
    for l in plane.enumerate_lines(f.ctx):
        try:
            total = sum(forms.intersection_multiplicity(f, l, P) for P in plane.points_on(l))
        except LineComponentError:
            continue
        assert total <= f.d


def test_flexes(F4, fermat3, sz):
    assert len(forms.flexes(fermat3)) == 9
    assert forms.flexes(sz) == []


def test_one_line_point_is_flex(F4, fermat3):
    # collect every 1-line of a few smooth cubics and check its point
    seen = 0
    for f in (fermat3, parse_form("x0^2*x2 + x0*x2^2 + x1^3", F4), parse_form("x0^3 + x1^2*x2 + x1*x2^2", F4)):
        fl = set(forms.flexes(f))
        mask = forms.zero_mask(f)
        pts = plane.enumerate_points(F4)
        for l in plane.enumerate_lines(F4):
            on = [P for P in plane.points_on(l) if mask[plane.point_index(F4)[P.coords]]]
            if len(on) == 1:
                assert on[0] in fl
                seen += 1
        assert len(pts) == 21
    assert seen > 0


def test_smoothness_examples(F4, fermat3, sz):
    assert forms.is_smooth(fermat3)
    assert forms.is_smooth(sz)
    assert not forms.is_smooth(parse_form("x0^3 + x1^3", F4))
    with pytest.raises(ValueError):
        forms.smooth_mask(F4, 5, np.zeros((1, 21), dtype=np.int64))


def _smooth_oracle(f, kmax):
    # look for a common zero of f and its partials over every F_{q^k}, k <= kmax
    ctx = f.ctx
    parts = forms.partials(f)
    for k in range(1, kmax + 1):
        ext = field_ctx(ctx.p, ctx.n * k)
        emb = embedding_table(ctx, ext)
        polys = [forms.evaluate_batch(ext, f.d, emb[np.array([f.coeffs])])[0]]
        polys += [forms.evaluate_batch(ext, f.d - 1, emb[np.array([p])])[0] for p in parts]
        if ((np.array(polys) == 0).all(axis=0)).any():
            return False
    return True


@pytest.mark.parametrize("d", [2, 3])
def test_smoothness_matches_full_extension_search_q2(d):
    F2 = field_of_order(2)
    n = len(forms.monomials(d))
    vecs = [v for v in itertools.product(range(2), repeat=n) if any(v)]
    mask = forms.smooth_mask(F2, d, np.array(vecs))
    for v, got in zip(vecs, mask):
        assert bool(got) == _smooth_oracle(TernaryForm(F2, d, v), d * (d - 1))


def test_smoothness_matches_full_search_quartic_sample():
    F2 = field_of_order(2)
    rng = np.random.default_rng(7)
    vecs = rng.integers(0, 2, (40, 15))
    vecs[:, 0] = 1
    mask = forms.smooth_mask(F2, 4, vecs)
    # F_{2^k} for k > 8 is too large to scan point by point here
    for v, got in zip(vecs.tolist(), mask):
        assert bool(got) == _smooth_oracle(TernaryForm(F2, 4, tuple(v)), 8)


def test_bounds():
    assert forms.bounds(3, 4) == (9, 9)
    assert forms.bounds(3, 16) == (25, 33)
    assert forms.bounds(4, 4) == (17, 13)
    # r + 1 = d gives r^3 + 1 for both
    for r in (2, 3, 4, 5):
        assert forms.bounds(r + 1, r * r) == (r**3 + 1, r**3 + 1)
    with pytest.raises(ValueError):
        forms.bounds(1, 4)


def test_vanishing_space(F4):
    F3 = field_of_order(3)
    got, want = forms.torus_kernel(F3)
    assert got == want
    m1 = F3.neg(1)
    assert got == [{(2, 0): 1, (0, 0): m1}, {(0, 2): 1, (0, 0): m1}]
    assert len(forms.torus_kernel(F4)[0]) == 2
    assert len(forms.vanishing_space([], 1, F4)) == 3
    with pytest.raises(ValueError):
        forms.vanishing_space([], 4, F4)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 11, 13, 16])
def test_torus_kernel_is_the_two_binomials(q):
    got, want = forms.torus_kernel(field_of_order(q))
    assert got == want


def test_vanishing_space_vectors_vanish(F4):
    pts = [(1, 2), (2, 3), (3, 3), (0, 1)]
    for poly in forms.vanishing_space(pts, 2, F4):
        for a, b in pts:
            val = F4.sum(F4.mul(c, F4.mul(F4.pow(a, i), F4.pow(b, j))) for (i, j), c in poly.items())
            assert val == 0


def test_parse_and_format_roundtrip(F4, w):
    f = parse_form("(x0 + x1 + x2)^2 + w*x0*x1", F4)
    assert f.d == 2
    assert parse_form(str(f), F4) == f
    assert parse_form(forms.format_raw(f)) == f
    assert forms.format_raw(f).startswith("q=4 d=2 coeffs=[")
    assert str(parse_form("x0^3 + w*x1^3 + w2*x2^3", F4)) == "x0^3 + w*x1^3 + w2*x2^3"


@given(random_forms(4, 3))
def test_roundtrip_random(f):
    assert parse_form(str(f), f.ctx) == f
    assert parse_form(forms.format_raw(f)) == f


@pytest.mark.parametrize("text", ["x0^2 + x1", "x0 + ", "x3^2", "0", "x0^2 +* x1", "(x0 + x1"])
def test_parse_errors(F4, text):
    with pytest.raises(FormSyntaxError):
        parse_form(text, F4)


def test_parse_degree_and_field_checks(F4):
    with pytest.raises(FormSyntaxError):
        parse_form("x0^2", F4, 3)
    with pytest.raises(FormSyntaxError):
        parse_form("q=5 d=1 coeffs=[1, 0, 0]", F4)
    with pytest.raises(FormSyntaxError):
        parse_form("x0^2")


def test_sziklai_bound_for_linear_free_cubics(cubic_scan):
    assert max(cubic_scan.free_histogram) <= forms.bounds(3, 4)[1]
