import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from maxcurves import gf
from maxcurves.gf import FieldError, arith, embed, field_ctx, field_of_order, frobenius

SMALL_Q = [q for q in range(2, 65) if gf.prime_power(q)]


def _polymul_mod(a, b, modulus, p):
    # schoolbook product of coefficient lists (low -> high), then reduce by the monic modulus
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    n = len(modulus) - 1
    for k in range(len(prod) - 1, n - 1, -1):
        c = prod[k]
        if c:
            for i in range(n + 1):
                prod[k - n + i] = (prod[k - n + i] - c * modulus[i]) % p
    return (prod + [0] * n)[:n]


def _digits(ctx, h):
    v = int(ctx.vec[h])
    return [(v // ctx.p**i) % ctx.p for i in range(ctx.n)]


@pytest.mark.parametrize("q", SMALL_Q)
def test_tables_match_polynomial_arithmetic(q):
    ctx = field_of_order(q)
    dig = [_digits(ctx, h) for h in range(q)]
    index = {tuple(d): h for h, d in enumerate(dig)}
    assert len(index) == q
    mod = list(ctx.modulus)
    for a in range(q):
        for b in range(q):
            s = tuple((x + y) % ctx.p for x, y in zip(dig[a], dig[b]))
            assert ctx.add_table[a, b] == index[s]
            assert ctx.add(a, b) == index[s]
            m = tuple(_polymul_mod(dig[a], dig[b], mod, ctx.p))
            assert ctx.mul_table[a, b] == index[m] == ctx.mul(a, b)


@pytest.mark.parametrize("q", SMALL_Q)
def test_field_axioms_exhaustive(q):
    ctx = field_of_order(q)
    A, M = ctx.add_table.astype(np.int64), ctx.mul_table.astype(np.int64)
    h = np.arange(q)
    a, b, c = np.meshgrid(h, h, h, indexing="ij")
    assert (A[A[a, b], c] == A[a, A[b, c]]).all()
    assert (M[M[a, b], c] == M[a, M[b, c]]).all()
    assert (M[a, A[b, c]] == A[M[a, b], M[a, c]]).all()
    assert (A == A.T).all() and (M == M.T).all()
    assert (A[h, ctx.neg_table] == 0).all()
    assert (M[h[1:], ctx.inv_table[1:]] == 1).all()
    for x in ctx.nonzero():
        assert ctx.pow(x, q - 1) == 1
        assert ctx.log[ctx.vec[x]] == x


@pytest.mark.parametrize("q", [4, 8, 9, 16, 25, 27, 32, 49, 64, 81, 128, 243, 256, 512, 729, 1024])
def test_generator_is_primitive_and_modulus_irreducible(q):
    ctx = field_of_order(q)
    g = ctx.gen
    order = next(k for k in range(1, q) if ctx.pow(g, k) == 1)
    assert order == q - 1
    assert gf.is_irreducible(list(ctx.modulus), ctx.p)


def test_known_moduli():
    assert field_ctx(2, 2).modulus == (1, 1, 1)
    assert field_ctx(2, 1).gen == 1
    assert field_ctx(3, 2).q == 9
    F5 = field_ctx(5, 1)
    assert F5.format(F5.gen) == "3"  # least primitive root mod 5


def test_f4_examples(F4, w):
    w2 = F4.mul(w, w)
    assert F4.parse("w2") == w2
    assert F4.add(w, w) == 0
    assert F4.add(w2, w) == 1
    assert F4.pow(w, 3) == 1
    assert arith(F4, w, w, "mul") == w2
    assert arith(F4, w, None, "inv") == w2
    with pytest.raises(ZeroDivisionError):
        arith(F4, w, 0, "div")
    with pytest.raises(ValueError):
        arith(F4, w, w, "xor")


def test_construction_errors():
    with pytest.raises(FieldError):
        field_ctx(4, 1)
    with pytest.raises(FieldError):
        field_ctx(2, 11)
    with pytest.raises(FieldError):
        field_of_order(6)


@pytest.mark.parametrize("q", [4, 5, 9, 16, 27])
def test_parse_format_roundtrip(q):
    ctx = field_of_order(q)
    for a in ctx.elements():
        assert ctx.parse(ctx.format(a)) == a
        if a:
            assert ctx.parse(f"g^{a - 1}") == a
    with pytest.raises(FieldError):
        ctx.parse("banana")


def test_frobenius_fixed_field():
    F4, F16 = field_of_order(4), field_of_order(16)
    sub = {embed(a, F4, F16) for a in F4.elements()}
    for a in F16.elements():
        fa = frobenius(a, F16, F4)
        assert (fa == a) == (a in sub)
        assert frobenius(fa, F16, F4) == a
    assert all(frobenius(a, F4) == a for a in F4.elements())
    with pytest.raises(FieldError):
        frobenius(1, F16, field_of_order(8))


def test_embed_f4_into_f16(w):
    F4, F16 = field_of_order(4), field_of_order(16)
    assert embed(0, F4, F16) == 0 and embed(1, F4, F16) == 1
    assert embed(w, F4, F16) == F16.power_of_gen(5)
    with pytest.raises(FieldError):
        embed(1, F4, field_of_order(8))


@pytest.mark.parametrize("src,dst", [(2, 64), (4, 16), (4, 64), (8, 64), (16, 256), (3, 27), (3, 81), (9, 81), (5, 25), (4, 1024), (32, 1024)])
def test_embed_is_ring_homomorphism(src, dst):
    S, D = field_of_order(src), field_of_order(dst)
    for a, b in itertools.product(S.elements(), repeat=2):
        ea, eb = embed(a, S, D), embed(b, S, D)
        assert embed(S.add(a, b), S, D) == D.add(ea, eb)
        assert embed(S.mul(a, b), S, D) == D.mul(ea, eb)


@pytest.mark.parametrize("chain", [(2, 4, 16), (4, 16, 256), (2, 8, 64), (4, 64, 64), (3, 9, 81), (2, 32, 1024)])
def test_embeddings_compose(chain):
    A, B, C = (field_of_order(q) for q in chain)
    for a in A.elements():
        assert embed(embed(a, A, B), B, C) == embed(a, A, C)


def test_roots_with_multiplicity(F4, w):
    w2 = F4.mul(w, w)
    assert gf.roots_with_multiplicity([0, 0, 0, 1], F4) == [(0, 3)]
    m1 = F4.neg(1)
    assert gf.roots_with_multiplicity([m1, 0, 0, 1], F4) == [(1, 1), (w, 1), (w2, 1)]
    assert gf.roots_with_multiplicity([1, 1, 1], field_of_order(2)) == []
    with pytest.raises(ValueError):
        gf.roots_with_multiplicity([0, 0], F4)


@given(st.lists(st.integers(0, 8), min_size=1, max_size=5), st.lists(st.integers(0, 8), min_size=1, max_size=4))
def test_root_multiplicities_add_under_products(a, b):
    ctx = field_of_order(9)
    # build prod_{r in a} (x - r) * prod_{r in b} (x - r) and compare counts
    poly = [1]
    for r in a + b:
        nxt = [0] * (len(poly) + 1)
        for i, c in enumerate(poly):
            nxt[i + 1] = ctx.add(nxt[i + 1], c)
            nxt[i] = ctx.sub(nxt[i], ctx.mul(c, r))
        poly = nxt
    expect = {}
    for r in a + b:
        expect[r] = expect.get(r, 0) + 1
    assert dict(gf.roots_with_multiplicity(poly, ctx)) == expect


def test_rref_and_nullspace(F4):
    rows = [[1, 1, 0], [0, 1, 1]]
    basis = gf.nullspace(F4, rows, 3)
    assert len(basis) == 1
    v = basis[0]
    for r in rows:
        assert F4.sum(F4.mul(x, y) for x, y in zip(r, v)) == 0
    red, piv = gf.rref(F4, [[1, 2, 3], [2, 3, 1], [3, 1, 2]])
    assert piv == list(range(len(red)))
