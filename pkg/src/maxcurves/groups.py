"""PGL(3, q) acting on ternary forms, plus generic orbit counting.

The action is substitution: ``M . f = f(M x)``, normalized.  Under this
convention ``(MN) . f = N . (M . f)``, i.e. it is a right action; on
coefficient row vectors the substitution operators satisfy
``Op(MN) = Op(M) @ Op(N)`` up to a scalar.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from . import forms, plane
from .forms import TernaryForm, monomials, monomial_index
from .gf import Fe, FieldCtx, fdot

MAX_PGL_Q = 8


class BurnsideMismatch(RuntimeError):
    """Fixed-point count and direct orbit partition disagree: the action is broken."""


def pgl_order(q: int) -> int:
    return q**3 * (q**3 - 1) * (q**2 - 1)


def _det(ctx: FieldCtx, m) -> Fe:
    r0, r1, r2 = m[0:3], m[3:6], m[6:9]
    c = plane.cross(ctx, r0, r1)
    return ctx.sum(ctx.mul(a, b) for a, b in zip(c, r2))


@dataclass(frozen=True)
class ProjMap:
    """An element of PGL(3, q): a 3x3 matrix, row-major, first nonzero entry 1."""

    ctx: FieldCtx
    entries: tuple[Fe, ...]

    def __post_init__(self):
        e = tuple(int(x) for x in self.entries)
        if len(e) != 9:
            raise ValueError("a projective map needs nine entries")
        lead = next((x for x in e if x), 0)
        if lead == 0 or _det(self.ctx, e) == 0:
            raise ValueError("matrix is singular")
        if lead != 1:
            s = self.ctx.inv(lead)
            e = tuple(self.ctx.mul(s, x) for x in e)
        object.__setattr__(self, "entries", e)

    @classmethod
    def identity(cls, ctx: FieldCtx) -> ProjMap:
        return cls(ctx, (1, 0, 0, 0, 1, 0, 0, 0, 1))

    @classmethod
    def from_rows(cls, ctx: FieldCtx, rows) -> ProjMap:
        return cls(ctx, tuple(int(x) for r in rows for x in r))

    @property
    def rows(self) -> tuple[tuple[Fe, ...], ...]:
        e = self.entries
        return e[0:3], e[3:6], e[6:9]

    def __matmul__(self, other: ProjMap) -> ProjMap:
        ctx = self.ctx
        a, b = self.rows, other.rows
        out = [
            ctx.sum(ctx.mul(a[i][k], b[k][j]) for k in range(3)) for i in range(3) for j in range(3)
        ]
        return ProjMap(ctx, tuple(out))

    def apply(self, P: plane.Point) -> plane.Point:
        ctx = self.ctx
        return plane.Point.of(ctx, [ctx.sum(ctx.mul(r[j], P[j]) for j in range(3)) for r in self.rows])

    def format(self) -> list[str]:
        return [self.ctx.format(x) for x in self.entries]


# -- enumeration -------------------------------------------------------------

def _cross_many(ctx: FieldCtx, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    M = ctx.mul_table
    S = lambda x, y: ctx.add_table[x, ctx.neg_table[y]]  # noqa: E731
    return np.stack(
        [
            S(M[a[..., 1], b[..., 2]], M[a[..., 2], b[..., 1]]),
            S(M[a[..., 2], b[..., 0]], M[a[..., 0], b[..., 2]]),
            S(M[a[..., 0], b[..., 1]], M[a[..., 1], b[..., 0]]),
        ],
        axis=-1,
    )


@functools.lru_cache(maxsize=None)
def pgl_array(ctx: FieldCtx) -> np.ndarray:
    """All of PGL(3, q) as an (N, 3, 3) handle array, in lexicographic order."""
    if ctx.q > MAX_PGL_Q:
        raise ValueError(f"PGL(3,{ctx.q}) is too large to enumerate (q <= {MAX_PGL_Q})")
    vecs = np.array(list(itertools.product(range(ctx.q), repeat=3)), dtype=ctx.dtype)
    blocks = []
    for r0 in plane.point_array(ctx):
        c = _cross_many(ctx, np.broadcast_to(r0, vecs.shape), vecs)
        keep = (c != 0).any(axis=1)
        r1, c1 = vecs[keep], c[keep]
        det = fdot(ctx, c1, vecs.T)
        i1, i2 = np.nonzero(det)
        blk = np.empty((len(i1), 3, 3), dtype=ctx.dtype)
        blk[:, 0] = r0
        blk[:, 1] = r1[i1]
        blk[:, 2] = vecs[i2]
        blocks.append(blk)
    out = np.concatenate(blocks)
    out.setflags(write=False)
    if len(out) != pgl_order(ctx.q):
        raise AssertionError("PGL enumeration produced the wrong number of elements")
    return out


def pgl_enumerate(ctx: FieldCtx) -> list[ProjMap]:
    return [ProjMap(ctx, tuple(m.ravel().tolist())) for m in pgl_array(ctx)]


# -- substitution operators --------------------------------------------------

@functools.lru_cache(maxsize=None)
def _product_pairs(a: int, b: int):
    ia, ib, it = [], [], []
    target = monomial_index(a + b)
    for u, eu in enumerate(monomials(a)):
        for v, ev in enumerate(monomials(b)):
            ia.append(u)
            ib.append(v)
            it.append(target[tuple(x + y for x, y in zip(eu, ev))])
    return ia, ib, it


def _batch_mul(ctx: FieldCtx, A: np.ndarray, a: int, B: np.ndarray, b: int) -> np.ndarray:
    add, mul = ctx.add_table, ctx.mul_table
    out = np.zeros((A.shape[0], len(monomials(a + b))), dtype=ctx.dtype)
    for u, v, t in zip(*_product_pairs(a, b)):
        out[:, t] = add[out[:, t], mul[A[:, u], B[:, v]]]
    return out


def substitution_operators(ctx: FieldCtx, d: int, mats: np.ndarray) -> np.ndarray:
    """Op[g, k, j] = coefficient of monomial j in (monomial k)(M_g x)."""
    n = len(mats)
    one = np.ones((n, 1), dtype=ctx.dtype)
    powers = []
    for i in range(3):
        L = np.ascontiguousarray(mats[:, i, :])
        pw = [one]
        for e in range(1, d + 1):
            pw.append(_batch_mul(ctx, pw[-1], e - 1, L, 1))
        powers.append(pw)
    m = len(monomials(d))
    ops = np.empty((n, m, m), dtype=ctx.dtype)
    partial: dict = {}
    for k, (e0, e1, e2) in enumerate(monomials(d)):
        key = (e0, e1)
        if key not in partial:
            partial[key] = _batch_mul(ctx, powers[0][e0], e0, powers[1][e1], e1)
        ops[:, k, :] = _batch_mul(ctx, partial[key], e0 + e1, powers[2][e2], e2)
    return ops


def normalize_rows(ctx: FieldCtx, arr: np.ndarray) -> np.ndarray:
    nz = arr != 0
    lead = arr[np.arange(len(arr)), nz.argmax(axis=1)]
    return ctx.mul_table[arr, ctx.inv_table[lead][:, None]]


def lexmin_row(arr: np.ndarray) -> np.ndarray:
    rows = arr
    for j in range(arr.shape[1]):
        rows = rows[rows[:, j] == rows[:, j].min()]
        if len(rows) == 1:
            break
    return rows[0]


class ActionTable:
    """Substitution operators of every element of PGL(3, q) on degree-d forms.

    Operators are computed in chunks; they are kept in memory when the full
    table is small enough (e.g. cubics over F_4: 60480 x 10 x 10 bytes).
    """

    CACHE_LIMIT = 40_000_000
    CHUNK = 65536

    def __init__(self, ctx: FieldCtx, d: int):
        self.ctx = ctx
        self.d = d
        self.group = pgl_array(ctx)
        self.m = len(monomials(d))
        self._ops = None
        if len(self.group) * self.m * self.m <= self.CACHE_LIMIT:
            self._ops = substitution_operators(ctx, d, self.group)

    def __len__(self):
        return len(self.group)

    def _chunks(self):
        if self._ops is not None:
            yield 0, self._ops
            return
        for start in range(0, len(self.group), self.CHUNK):
            yield start, substitution_operators(self.ctx, self.d, self.group[start:start + self.CHUNK])

    def operator(self, M: ProjMap) -> np.ndarray:
        mat = np.array(M.entries, dtype=self.ctx.dtype).reshape(1, 3, 3)
        return substitution_operators(self.ctx, self.d, mat)[0]

    def images(self, f: TernaryForm) -> np.ndarray:
        """Normalized coefficient vectors of M . f for every M, in group order."""
        if f.ctx != self.ctx or f.d != self.d:
            raise ValueError("form does not match this action table")
        add, mul = self.ctx.add_table, self.ctx.mul_table
        out = np.empty((len(self.group), self.m), dtype=self.ctx.dtype)
        for start, ops in self._chunks():
            acc = np.zeros((len(ops), self.m), dtype=self.ctx.dtype)
            for k, c in enumerate(f.coeffs):
                if c:
                    acc = add[acc, mul[c, ops[:, k, :]]]
            out[start:start + len(ops)] = normalize_rows(self.ctx, acc)
        return out

    def orbit(self, f: TernaryForm) -> np.ndarray:
        return np.unique(self.images(f), axis=0)


@functools.lru_cache(maxsize=8)
def action_table(ctx: FieldCtx, d: int) -> ActionTable:
    return ActionTable(ctx, d)


# -- the action on individual forms ------------------------------------------

def act_on_form(M: ProjMap, f: TernaryForm) -> TernaryForm:
    """Substitute x_i -> sum_j M[i][j] x_j in f and normalize."""
    ctx = f.ctx
    lin = [{tuple(int(k == j) for k in range(3)): a for j, a in enumerate(r) if a} for r in M.rows]
    out: dict = {}
    for e, c in f.terms().items():
        t = {(0, 0, 0): c}
        for i in range(3):
            t = forms.poly_mul(ctx, t, forms.poly_pow(ctx, lin[i], e[i]))
        out = forms.poly_add(ctx, out, t)
    return TernaryForm.from_terms(ctx, out, f.d)


def canonical_form(f: TernaryForm) -> TernaryForm:
    """Lexicographically least normalized coefficient vector in the PGL-orbit of f."""
    return TernaryForm(f.ctx, f.d, tuple(lexmin_row(action_table(f.ctx, f.d).images(f)).tolist()))


def stabilizer_order(f: TernaryForm) -> int:
    imgs = action_table(f.ctx, f.d).images(f)
    return int((imgs == np.array(f.coeffs, dtype=imgs.dtype)).all(axis=1).sum())


def orbit_size(f: TernaryForm) -> int:
    return len(action_table(f.ctx, f.d).orbit(f))


def are_equivalent(f: TernaryForm, g: TernaryForm) -> tuple[bool, ProjMap | None]:
    """Is there M in PGL(3, q) with M . f = g?  Returns a witness when there is."""
    if f.ctx != g.ctx or f.d != g.d:
        return False, None
    if f == g:
        return True, ProjMap.identity(f.ctx)
    # cheap invariants first
    if forms.line_spectrum(f) != forms.line_spectrum(g):
        return False, None
    table = action_table(f.ctx, f.d)
    imgs = table.images(f)
    hit = np.flatnonzero((imgs == np.array(g.coeffs, dtype=imgs.dtype)).all(axis=1))
    if len(hit) == 0:
        return False, None
    return True, ProjMap(f.ctx, tuple(table.group[hit[0]].ravel().tolist()))


# -- Burnside ----------------------------------------------------------------

def burnside_count(
    action: Callable,
    group: Sequence,
    items: Iterable[Hashable],
    identity=None,
    compose: Callable | None = None,
) -> tuple[int, list]:
    """Count orbits twice: by averaging fixed points and by union-find.

    ``identity`` and ``compose`` are optional; when given, the identity axiom
    and one compatibility sample are spot-checked.  Returns the orbit count
    and the least item of each orbit, sorted.
    """
    items = list(items)
    index = {x: i for i, x in enumerate(items)}
    if len(index) != len(items):
        raise ValueError("items must be distinct")
    if not items:
        return 0, []
    group = list(group)

    if identity is not None and any(action(identity, x) != x for x in items):
        raise BurnsideMismatch("identity does not act trivially")
    if compose is not None and len(group) >= 2:
        g, h = group[0], group[-1]
        x = items[0]
        if action(compose(g, h), x) != action(g, action(h, x)):
            raise BurnsideMismatch("action is not compatible with composition")

    parent = list(range(len(items)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    fixed = 0
    for g in group:
        seen = set()
        for i, x in enumerate(items):
            y = action(g, x)
            j = index.get(y)
            if j is None:
                raise BurnsideMismatch(f"action leaves the item set: {x!r} -> {y!r}")
            seen.add(j)
            if j == i:
                fixed += 1
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
        if len(seen) != len(items):
            raise BurnsideMismatch("a group element does not act bijectively")

    by_fixed, rem = divmod(fixed, len(group))
    roots = {find(i) for i in range(len(items))}
    if rem or by_fixed != len(roots):
        raise BurnsideMismatch(
            f"fixed-point average {fixed}/{len(group)} disagrees with {len(roots)} orbits"
        )
    orbits: dict = {}
    for i, x in enumerate(items):
        orbits.setdefault(find(i), []).append(x)
    return by_fixed, sorted(min(o) for o in orbits.values())
