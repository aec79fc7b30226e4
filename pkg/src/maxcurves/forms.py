"""Homogeneous ternary forms over F_q and the plane curves they cut out.

A form of degree d is a dense vector over the monomials
``x0^e0 * x1^e1 * x2^e2`` (``e0 + e1 + e2 = d``) listed in descending
lexicographic order of ``(e0, e1, e2)``.  Forms are kept scalar-normalized
(first nonzero coefficient is 1), so a form *is* a curve.

Most per-curve questions (point counts, delta-line spectra) reduce to bulk
table lookups over all points of P^2(F_q), which is also how the exhaustive
scans in :mod:`maxcurves.maximal` evaluate hundreds of thousands of forms.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass

import numpy as np

from . import plane
from .gf import Fe, FieldCtx, FieldError, embedding_table, fdot, field_ctx, field_of_order, nullspace, root_multiplicity
from .plane import Line, Point


class CurveError(ValueError):
    pass


class NotOnCurveError(CurveError):
    pass


class SingularPointError(CurveError):
    pass


class LineComponentError(CurveError):
    """The line is a component of the curve, so its intersection multiplicity is undefined."""


class FormSyntaxError(ValueError):
    def __init__(self, msg: str, pos: int | None = None):
        super().__init__(msg if pos is None else f"{msg} (at position {pos})")
        self.pos = pos


# -- monomials and sparse polynomials ----------------------------------------

@functools.lru_cache(maxsize=None)
def monomials(d: int) -> tuple[tuple[int, int, int], ...]:
    return tuple(
        (e0, e1, d - e0 - e1) for e0 in range(d, -1, -1) for e1 in range(d - e0, -1, -1)
    )


@functools.lru_cache(maxsize=None)
def monomial_index(d: int) -> dict[tuple[int, int, int], int]:
    return {e: i for i, e in enumerate(monomials(d))}


def poly_add(ctx: FieldCtx, a: dict, b: dict) -> dict:
    out = dict(a)
    for e, c in b.items():
        v = ctx.add(out.get(e, 0), c)
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def poly_scale(ctx: FieldCtx, a: dict, c: Fe) -> dict:
    if c == 0:
        return {}
    return {e: ctx.mul(v, c) for e, v in a.items()}


def poly_mul(ctx: FieldCtx, a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            v = ctx.add(out.get(e, 0), ctx.mul(ca, cb))
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


def poly_pow(ctx: FieldCtx, a: dict, k: int, nvars: int = 3) -> dict:
    out = {(0,) * nvars: 1}
    base = a
    while k:
        if k & 1:
            out = poly_mul(ctx, out, base)
        k >>= 1
        if k:
            base = poly_mul(ctx, base, base)
    return out


# -- the form type -----------------------------------------------------------

@dataclass(frozen=True)
class TernaryForm:
    ctx: FieldCtx
    d: int
    coeffs: tuple[Fe, ...]

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("degree must be at least 1")
        c = tuple(int(x) for x in self.coeffs)
        if len(c) != len(monomials(self.d)):
            raise ValueError(f"degree {self.d} forms have {len(monomials(self.d))} coefficients, got {len(c)}")
        if any(x < 0 or x >= self.ctx.q for x in c):
            raise ValueError("coefficient handle out of range")
        lead = next((x for x in c if x), 0)
        if lead == 0:
            raise ValueError("the zero form does not define a curve")
        if lead != 1:
            s = self.ctx.inv(lead)
            c = tuple(self.ctx.mul(s, x) for x in c)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_terms(cls, ctx: FieldCtx, terms: dict, d: int | None = None) -> TernaryForm:
        terms = {e: c for e, c in terms.items() if c}
        degs = {sum(e) for e in terms}
        if not terms:
            raise ValueError("the zero form does not define a curve")
        if len(degs) != 1:
            raise ValueError("polynomial is not homogeneous")
        (deg,) = degs
        if d is not None and d != deg:
            raise ValueError(f"degree mismatch: expected {d}, got {deg}")
        idx = monomial_index(deg)
        vec = [0] * len(idx)
        for e, c in terms.items():
            vec[idx[tuple(e)]] = c
        return cls(ctx, deg, tuple(vec))

    def terms(self) -> dict[tuple[int, int, int], Fe]:
        return {e: c for e, c in zip(monomials(self.d), self.coeffs) if c}

    def __str__(self):
        return format_form(self)


def fermat_form(ctx: FieldCtx, d: int) -> TernaryForm:
    return TernaryForm.from_terms(ctx, {(d, 0, 0): 1, (0, d, 0): 1, (0, 0, d): 1})


def hermitian_form(ctx: FieldCtx) -> TernaryForm:
    """x0^(r+1) + x1^(r+1) + x2^(r+1) with r = sqrt(q)."""
    r = math.isqrt(ctx.q)
    if r * r != ctx.q:
        raise ValueError(f"q={ctx.q} is not a square")
    return fermat_form(ctx, r + 1)


# -- evaluation and point counts ---------------------------------------------

def _pow_table(ctx: FieldCtx, dmax: int) -> np.ndarray:
    h = np.arange(ctx.q)[:, None]
    e = np.arange(dmax + 1)[None, :]
    t = ((h - 1) * e) % (ctx.q - 1) + 1
    t = np.where(h == 0, np.where(e == 0, 1, 0), t)
    return t.astype(ctx.dtype)


@functools.lru_cache(maxsize=None)
def monomial_values(ctx: FieldCtx, d: int) -> np.ndarray:
    """(points x monomials) table of monomial values at every point of P^2(F_q)."""
    pts = plane.point_array(ctx).astype(np.int64)
    pw = _pow_table(ctx, d)
    M = ctx.mul_table
    out = np.empty((len(pts), len(monomials(d))), dtype=ctx.dtype)
    for k, (e0, e1, e2) in enumerate(monomials(d)):
        out[:, k] = M[M[pw[pts[:, 0], e0], pw[pts[:, 1], e1]], pw[pts[:, 2], e2]]
    return out


def evaluate_coeffs(ctx: FieldCtx, d: int, coeffs, P) -> Fe:
    """Evaluate a raw (possibly zero, unnormalized) coefficient vector at a triple."""
    acc = 0
    x = tuple(P)
    for c, (e0, e1, e2) in zip(coeffs, monomials(d)):
        if c:
            t = ctx.mul(ctx.mul(ctx.pow(x[0], e0), ctx.pow(x[1], e1)), ctx.pow(x[2], e2))
            acc = ctx.add(acc, ctx.mul(c, t))
    return acc


def evaluate(f: TernaryForm, P) -> Fe:
    return evaluate_coeffs(f.ctx, f.d, f.coeffs, P)


def evaluate_batch(ctx: FieldCtx, d: int, coeffs: np.ndarray) -> np.ndarray:
    """Values of many forms (rows of ``coeffs``) at every point: shape (N, points)."""
    coeffs = np.asarray(coeffs, dtype=ctx.dtype).reshape(-1, len(monomials(d)))
    return fdot(ctx, coeffs, monomial_values(ctx, d).T)


def zero_mask(f: TernaryForm) -> np.ndarray:
    return evaluate_batch(f.ctx, f.d, np.array([f.coeffs]))[0] == 0


def count_points(f: TernaryForm) -> int:
    return int(zero_mask(f).sum())


def rational_points(f: TernaryForm) -> list[Point]:
    pts = plane.enumerate_points(f.ctx)
    return [pts[i] for i in np.flatnonzero(zero_mask(f))]


# -- linear components -------------------------------------------------------

def divide_by_line(f: TernaryForm, l: Line) -> tuple[dict, dict]:
    """Long division of f by the linear form of l; returns (quotient, remainder).

    The pivot variable is the first one with a nonzero coefficient in l (which
    is 1 after normalization); the remainder is free of that variable.
    """
    ctx = f.ctx
    piv = next(i for i, a in enumerate(l.coeffs) if a)
    lin = {tuple(int(i == j) for j in range(3)): a for i, a in enumerate(l.coeffs) if a}
    rem = f.terms()
    quot: dict = {}
    while True:
        lead = max((e for e in rem if e[piv] > 0), default=None)
        if lead is None:
            break
        c = rem[lead]
        step = tuple(x - (i == piv) for i, x in enumerate(lead))
        quot = poly_add(ctx, quot, {step: c})
        rem = poly_add(ctx, rem, poly_scale(ctx, poly_mul(ctx, {step: 1}, lin), ctx.neg(c)))
    return quot, rem


def linear_components(f: TernaryForm) -> list[Line]:
    return [l for l in plane.enumerate_lines(f.ctx) if not divide_by_line(f, l)[1]]


def has_linear_component(f: TernaryForm) -> bool:
    return any(not divide_by_line(f, l)[1] for l in plane.enumerate_lines(f.ctx))


@functools.lru_cache(maxsize=None)
def restriction_matrix(ctx: FieldCtx, d: int, l: Line) -> np.ndarray:
    """(monomials x (d+1)) matrix R with f|_l (s, t) = sum_i (f @ R)[i] s^(d-i) t^i."""
    A, B = plane.parameterize_line(l)
    R = np.zeros((len(monomials(d)), d + 1), dtype=ctx.dtype)
    for k, e in enumerate(monomials(d)):
        prod = [1]
        for j in range(3):
            for _ in range(e[j]):
                nxt = [0] * (len(prod) + 1)
                for i, c in enumerate(prod):
                    nxt[i] = ctx.add(nxt[i], ctx.mul(c, A[j]))
                    nxt[i + 1] = ctx.add(nxt[i + 1], ctx.mul(c, B[j]))
                prod = nxt
        R[k, :] = prod
    return R


def restrict(f: TernaryForm, l: Line) -> list[Fe]:
    """Binary form f(sA + tB) as coefficients of s^(d-i) t^i, i = 0..d."""
    R = restriction_matrix(f.ctx, f.d, l)
    return [int(x) for x in fdot(f.ctx, np.array([f.coeffs], dtype=f.ctx.dtype), R)[0]]


@functools.lru_cache(maxsize=None)
def _stacked_restrictions(ctx: FieldCtx, d: int) -> np.ndarray:
    return np.concatenate([restriction_matrix(ctx, d, l) for l in plane.enumerate_lines(ctx)], axis=1)


def linear_component_mask(ctx: FieldCtx, d: int, coeffs: np.ndarray) -> np.ndarray:
    """Bulk test: does each form vanish identically on some F_q-line?"""
    coeffs = np.asarray(coeffs, dtype=ctx.dtype).reshape(-1, len(monomials(d)))
    out = fdot(ctx, coeffs, _stacked_restrictions(ctx, d))
    per_line = out.reshape(len(coeffs), -1, d + 1)
    return (per_line == 0).all(axis=2).any(axis=1)


# -- delta-line spectra ------------------------------------------------------

def deltas_from_mask(ctx: FieldCtx, mask: np.ndarray) -> np.ndarray:
    """|l ∩ C(F_q)| for every line, given zero masks of shape (..., points)."""
    inc = plane.incidence_matrix(ctx).astype(np.int32)
    return mask.astype(np.int32) @ inc.T


def line_deltas(f: TernaryForm) -> np.ndarray:
    return deltas_from_mask(f.ctx, zero_mask(f))


def line_spectrum(f: TernaryForm) -> dict[int, int]:
    vals, counts = np.unique(line_deltas(f), return_counts=True)
    return {int(v): int(c) for v, c in zip(vals, counts)}


# -- derivatives, tangents, multiplicities -----------------------------------

def partials_of(ctx: FieldCtx, d: int, coeffs) -> tuple[tuple[Fe, ...], ...]:
    out = []
    idx = monomial_index(d - 1) if d > 1 else {(0, 0, 0): 0}
    for i in range(3):
        vec = [0] * len(idx)
        for c, e in zip(coeffs, monomials(d)):
            if c and e[i] and e[i] % ctx.p:
                de = tuple(x - (j == i) for j, x in enumerate(e))
                vec[idx[de]] = ctx.add(vec[idx[de]], ctx.mul(ctx.from_int(e[i]), c))
        out.append(tuple(vec))
    return tuple(out)


def partials(f: TernaryForm) -> tuple[tuple[Fe, ...], ...]:
    """Raw coefficient vectors of df/dx0, df/dx1, df/dx2 (degree d-1, may be zero)."""
    return partials_of(f.ctx, f.d, f.coeffs)


def gradient(f: TernaryForm, P) -> tuple[Fe, Fe, Fe]:
    return tuple(evaluate_coeffs(f.ctx, f.d - 1, g, P) for g in partials(f))


def tangent_line(f: TernaryForm, P: Point) -> Line:
    if evaluate(f, P) != 0:
        raise NotOnCurveError(f"{P} is not on the curve")
    grad = gradient(f, P)
    if not any(grad):
        raise SingularPointError(f"{P} is a singular point")
    return Line.of(f.ctx, grad)


def intersection_multiplicity(f: TernaryForm, l: Line, P: Point) -> int:
    if not plane.incident(l, P):
        raise ValueError(f"{P} does not lie on {l}")
    ctx = f.ctx
    c = restrict(f, l)
    if not any(c):
        raise LineComponentError(f"{l} is a component of the curve")
    s0, t0 = plane.line_parameters(l)[P]
    if s0 == 0:
        return root_multiplicity(list(reversed(c)), 0, ctx)
    return root_multiplicity(c, t0, ctx)


def flexes(f: TernaryForm) -> list[Point]:
    """Rational points whose tangent meets the curve with multiplicity >= 3.

    A point whose tangent line is a component of the curve counts as a flex.
    """
    out = []
    for P in rational_points(f):
        T = tangent_line(f, P)
        try:
            m = intersection_multiplicity(f, T, P)
        except LineComponentError:
            m = f.d + 1
        if m >= 3:
            out.append(P)
    return out


def singular_points(f: TernaryForm) -> list[Point]:
    """F_q-rational singular points."""
    return [P for P in rational_points(f) if not any(gradient(f, P))]


def _smooth_extension_degrees(d: int) -> list[int]:
    # A reduced plane curve of degree d has at most d(d-1)/2 singular points, so
    # each closed singular point has residue degree <= d(d-1)/2.  Non-reduced
    # forms of degree <= 4 have a repeated factor defined over F_q of degree
    # <= 2, which already has F_q-points.  Only the maximal k under
    # divisibility need checking.
    K = max(1, d * (d - 1) // 2)
    return [k for k in range(1, K + 1) if 2 * k > K]


def smooth_mask(ctx: FieldCtx, d: int, coeffs: np.ndarray) -> np.ndarray:
    """Bulk smoothness test for forms of degree d <= 4."""
    if not 1 <= d <= 4:
        raise ValueError(f"smoothness test supports degrees 1..4, got {d}")
    coeffs = np.asarray(coeffs, dtype=np.int64).reshape(-1, len(monomials(d)))
    smooth = np.ones(len(coeffs), dtype=bool)
    if d == 1:
        return smooth
    parts = np.array([partials_of(ctx, d, row) for row in coeffs.tolist()], dtype=np.int64)
    for k in _smooth_extension_degrees(d):
        try:
            ext = field_ctx(ctx.p, ctx.n * k)
        except FieldError as exc:
            raise ValueError(f"degree {d} over F_{ctx.q} needs F_{ctx.q}^{k}, beyond the field cap") from exc
        emb = embedding_table(ctx, ext)
        ev_f = evaluate_batch(ext, d, emb[coeffs])
        ev_p = evaluate_batch(ext, d - 1, emb[parts.reshape(-1, parts.shape[-1])])
        ev_p = ev_p.reshape(len(coeffs), 3, -1)
        common = (ev_f == 0) & (ev_p == 0).all(axis=1)
        smooth &= ~common.any(axis=1)
    return smooth


def is_smooth(f: TernaryForm) -> bool:
    return bool(smooth_mask(f.ctx, f.d, np.array([f.coeffs]))[0])


# -- bounds and the vanishing ideal of the torus -----------------------------

def bounds(d: int, q: int) -> tuple[int, int]:
    """(Aubry-Perret, Sziklai) upper bounds on N_q for a degree-d curve.

    The first is floor(q + 1 + (d-1)(d-2) sqrt(q)), the second (d-1)q + 1.
    """
    if d < 2:
        raise ValueError("bounds are stated for curves without F_q-linear components (d >= 2)")
    k = (d - 1) * (d - 2)
    return q + 1 + math.isqrt(k * k * q), (d - 1) * q + 1


def exceptional_quartic(ctx: FieldCtx | None = None) -> TernaryForm:
    """(x0+x1+x2)^4 + (x0x1+x1x2+x2x0)^2 + x0x1x2(x0+x1+x2) over F_4.

    Has 14 rational points and no F_4-linear component, one more than the
    (d-1)q + 1 bound allows.
    """
    ctx = ctx or field_of_order(4)
    if ctx.q != 4:
        raise ValueError("the exceptional quartic lives over F_4")
    s1 = {(1, 0, 0): 1, (0, 1, 0): 1, (0, 0, 1): 1}
    s2 = {(1, 1, 0): 1, (0, 1, 1): 1, (1, 0, 1): 1}
    terms = poly_add(ctx, poly_pow(ctx, s1, 4), poly_pow(ctx, s2, 2))
    terms = poly_add(ctx, terms, poly_mul(ctx, {(1, 1, 1): 1}, s1))
    return TernaryForm.from_terms(ctx, terms, 4)


def bivariate_monomials(max_deg: int) -> list[tuple[int, int]]:
    """x^i y^j with i + j <= max_deg, by descending degree then descending i."""
    return [(i, deg - i) for deg in range(max_deg, -1, -1) for i in range(deg, -1, -1)]


def vanishing_space(points, max_deg: int, ctx: FieldCtx) -> list[dict[tuple[int, int], Fe]]:
    """Row-reduced basis of polynomials of degree <= max_deg vanishing on the affine points."""
    if max_deg > ctx.q - 1:
        raise ValueError("max_deg must be at most q-1")
    mons = bivariate_monomials(max_deg)
    rows = [[ctx.mul(ctx.pow(a, i), ctx.pow(b, j)) for i, j in mons] for a, b in points]
    if not rows:
        rows = [[0] * len(mons)]
    basis = nullspace(ctx, rows, len(mons))
    return [{m: c for m, c in zip(mons, v) if c} for v in basis]


def torus_kernel(ctx: FieldCtx) -> tuple[list[dict], list[dict]]:
    """Polynomials of degree <= q-1 vanishing on (F_q^*)^2, next to the
    expected basis {x^(q-1) - 1, y^(q-1) - 1}."""
    pts = [(a, b) for a in ctx.nonzero() for b in ctx.nonzero()]
    m1 = ctx.neg(1)
    e = ctx.q - 1
    return vanishing_space(pts, e, ctx), [{(e, 0): 1, (0, 0): m1}, {(0, e): 1, (0, 0): m1}]


def format_bivariate(ctx: FieldCtx, poly: dict) -> str:
    if not poly:
        return "0"
    parts = []
    for (i, j), c in sorted(poly.items(), key=lambda t: (-sum(t[0]), -t[0][0])):
        mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in (("x", i), ("y", j)) if k)
        if not mono:
            parts.append(ctx.format(c))
        else:
            parts.append(mono if c == 1 else f"{ctx.format(c)}*{mono}")
    return " + ".join(parts)


# -- text grammar ------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(x[0-2])|(g\^\d+|g|w2|w1|w|\d+)|(\^)|(\*)|(\+)|(-)|(\()|(\)))")


def _tokenize(text):
    pos = 0
    toks = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormSyntaxError(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos)
        kinds = ("var", "elem", "^", "*", "+", "-", "(", ")")
        kind = next(k for k, g in zip(kinds, m.groups()) if g is not None)
        toks.append((kind, m.group(m.lastindex), m.start(m.lastindex)))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text, ctx):
        self.ctx = ctx
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind and tok[0] != kind:
            raise FormSyntaxError(f"expected {kind!r}, found {tok[1] or 'end of input'!r}", tok[2])
        self.i += 1
        return tok

    def expr(self):
        neg = False
        if self.peek()[0] in "+-":
            neg = self.take()[0] == "-"
        acc = self.term()
        if neg:
            acc = poly_scale(self.ctx, acc, self.ctx.neg(1))
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            t = self.term()
            if op == "-":
                t = poly_scale(self.ctx, t, self.ctx.neg(1))
            acc = poly_add(self.ctx, acc, t)
        return acc

    def term(self):
        acc = self.power()
        while self.peek()[0] == "*":
            self.take()
            acc = poly_mul(self.ctx, acc, self.power())
        return acc

    def power(self):
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            tok = self.take("elem")
            if not tok[1].isdigit():
                raise FormSyntaxError("exponent must be a nonnegative integer", tok[2])
            base = poly_pow(self.ctx, base, int(tok[1]))
        return base

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "var":
            self.take()
            e = [0, 0, 0]
            e[int(val[1])] = 1
            return {tuple(e): 1}
        if kind == "elem":
            self.take()
            try:
                c = self.ctx.parse(val)
            except FieldError as exc:
                raise FormSyntaxError(str(exc), pos) from None
            return {(0, 0, 0): c} if c else {}
        if kind == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            return inner
        raise FormSyntaxError(f"unexpected {val or 'end of input'!r}", pos)


_RAW = re.compile(r"^\s*q\s*=\s*(\d+)\s+d\s*=\s*(\d+)\s+coeffs\s*=\s*\[(.*)\]\s*$")


def parse_form(text: str, ctx: FieldCtx | None = None, d: int | None = None) -> TernaryForm:
    """Parse a curve from the expression grammar or the raw coefficient form.

    Expressions are sums of products of ``x0, x1, x2`` and field elements
    (``0, 1, g^k``; ``w, w2`` when q = 4), with ``^`` powers and parentheses.
    The raw form is ``q=<q> d=<d> coeffs=[c0, c1, ...]`` in monomial order.
    """
    m = _RAW.match(text)
    if m:
        q, deg = int(m.group(1)), int(m.group(2))
        rctx = field_of_order(q)
        if ctx is not None and ctx != rctx:
            raise FormSyntaxError(f"raw form is over F_{q}, expected F_{ctx.q}")
        if d is not None and d != deg:
            raise FormSyntaxError(f"degree mismatch: expected {d}, got {deg}")
        items = [s for s in m.group(3).split(",") if s.strip()]
        try:
            vec = tuple(rctx.parse(s) for s in items)
            return TernaryForm(rctx, deg, vec)
        except ValueError as exc:
            raise FormSyntaxError(str(exc)) from None
    if ctx is None:
        raise FormSyntaxError("expression input needs a field")
    p = _Parser(text, ctx)
    poly = p.expr()
    p.take("end")
    if not poly:
        raise FormSyntaxError("the zero polynomial does not define a curve")
    degs = {sum(e) for e in poly}
    if len(degs) != 1:
        raise FormSyntaxError(f"non-homogeneous polynomial (degrees {sorted(degs)})")
    try:
        return TernaryForm.from_terms(ctx, poly, d)
    except ValueError as exc:
        raise FormSyntaxError(str(exc)) from None


def format_form(f: TernaryForm) -> str:
    parts = []
    for e, c in f.terms().items():
        factors = [] if c == 1 else [f.ctx.format(c)]
        for i, k in enumerate(e):
            if k:
                factors.append(f"x{i}" if k == 1 else f"x{i}^{k}")
        parts.append("*".join(factors) if factors else f.ctx.format(c))
    return " + ".join(parts)


def format_raw(f: TernaryForm) -> str:
    return f"q={f.ctx.q} d={f.d} coeffs=[{', '.join(f.ctx.format(c) for c in f.coeffs)}]"
