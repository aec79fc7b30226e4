"""Points and lines of the projective plane P^2(F_q)."""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass

import numpy as np

from .gf import Fe, FieldCtx


def normalize(ctx: FieldCtx, coords) -> tuple[Fe, Fe, Fe]:
    """Scale a nonzero triple so its first nonzero entry is 1."""
    coords = tuple(int(c) for c in coords)
    lead = next((c for c in coords if c), 0)
    if lead == 0:
        raise ValueError("the zero vector is not a projective point")
    s = ctx.inv(lead)
    return tuple(ctx.mul(s, c) for c in coords)


@dataclass(frozen=True, order=True)
class Point:
    coords: tuple[Fe, Fe, Fe]
    ctx: FieldCtx

    @classmethod
    def of(cls, ctx: FieldCtx, *coords) -> Point:
        if len(coords) == 1:
            coords = coords[0]
        return cls(normalize(ctx, coords), ctx)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __str__(self):
        return "(" + ":".join(self.ctx.format(c) for c in self.coords) + ")"


@dataclass(frozen=True, order=True)
class Line:
    """The line a0*x0 + a1*x1 + a2*x2 = 0."""

    coeffs: tuple[Fe, Fe, Fe]
    ctx: FieldCtx

    @classmethod
    def of(cls, ctx: FieldCtx, *coeffs) -> Line:
        if len(coeffs) == 1:
            coeffs = coeffs[0]
        return cls(normalize(ctx, coeffs), ctx)

    def __iter__(self):
        return iter(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    def __str__(self):
        return "(" + ":".join(self.ctx.format(c) for c in self.coeffs) + ")"

    def contains(self, P: Point) -> bool:
        return incident(self, P)


def _dot(ctx, a, b):
    return ctx.add(ctx.add(ctx.mul(a[0], b[0]), ctx.mul(a[1], b[1])), ctx.mul(a[2], b[2]))


def cross(ctx: FieldCtx, a, b) -> tuple[Fe, Fe, Fe]:
    m, s = ctx.mul, ctx.sub
    return (
        s(m(a[1], b[2]), m(a[2], b[1])),
        s(m(a[2], b[0]), m(a[0], b[2])),
        s(m(a[0], b[1]), m(a[1], b[0])),
    )


def incident(l: Line, P: Point) -> bool:
    return _dot(l.ctx, l.coeffs, P.coords) == 0


@functools.lru_cache(maxsize=None)
def normalized_triples(ctx: FieldCtx) -> tuple[tuple[Fe, Fe, Fe], ...]:
    """All normalized nonzero triples, in lexicographic order of handles."""
    out = []
    for t in itertools.product(range(ctx.q), repeat=3):
        lead = next((c for c in t if c), 0)
        if lead == 1:
            out.append(t)
    return tuple(out)


@functools.lru_cache(maxsize=None)
def enumerate_points(ctx: FieldCtx) -> tuple[Point, ...]:
    return tuple(Point(t, ctx) for t in normalized_triples(ctx))


@functools.lru_cache(maxsize=None)
def enumerate_lines(ctx: FieldCtx) -> tuple[Line, ...]:
    return tuple(Line(t, ctx) for t in normalized_triples(ctx))


@functools.lru_cache(maxsize=None)
def point_array(ctx: FieldCtx) -> np.ndarray:
    return np.array(normalized_triples(ctx), dtype=ctx.dtype).reshape(-1, 3)


@functools.lru_cache(maxsize=None)
def point_index(ctx: FieldCtx) -> dict[tuple, int]:
    return {t: i for i, t in enumerate(normalized_triples(ctx))}


@functools.lru_cache(maxsize=None)
def incidence_matrix(ctx: FieldCtx) -> np.ndarray:
    """Boolean (lines x points) incidence matrix in enumeration order."""
    from .gf import fdot

    pts = point_array(ctx)
    return fdot(ctx, pts, pts.T) == 0


def points_on(l: Line) -> list[Point]:
    ctx = l.ctx
    row = incidence_matrix(ctx)[point_index(ctx)[l.coeffs]]
    pts = enumerate_points(ctx)
    return [pts[i] for i in np.flatnonzero(row)]


def lines_through(P: Point) -> list[Line]:
    ctx = P.ctx
    col = incidence_matrix(ctx)[:, point_index(ctx)[P.coords]]
    lines = enumerate_lines(ctx)
    return [lines[i] for i in np.flatnonzero(col)]


def line_through(P: Point, Q: Point) -> Line:
    if P == Q:
        raise ValueError("a line needs two distinct points")
    return Line.of(P.ctx, cross(P.ctx, P.coords, Q.coords))


def meet(l: Line, m: Line) -> Point:
    if l == m:
        raise ValueError("identical lines do not meet in a single point")
    return Point.of(l.ctx, cross(l.ctx, l.coeffs, m.coeffs))


def parameterize_line(l: Line) -> tuple[Point, Point]:
    """The first two points of l; every point of l is s*A + t*B for a unique (s:t)."""
    pts = points_on(l)
    return pts[0], pts[1]


@functools.lru_cache(maxsize=None)
def line_parameters(l: Line) -> dict[Point, tuple[Fe, Fe]]:
    """Map each point of l to its normalized parameter (s:t) w.r.t. parameterize_line."""
    ctx = l.ctx
    A, B = parameterize_line(l)
    out = {}
    params = [(0, 1)] + [(1, t) for t in ctx.elements()]
    for s, t in params:
        v = tuple(ctx.add(ctx.mul(s, a), ctx.mul(t, b)) for a, b in zip(A, B))
        out[Point.of(ctx, v)] = (s, t)
    if len(out) != ctx.q + 1:
        raise AssertionError("line parameterization is not injective")
    return out


_TRIPLE = re.compile(r"^\s*[\(\[]\s*([^:]+):([^:]+):([^:\)\]]+)[\)\]]\s*$")


def parse_point(text: str, ctx: FieldCtx) -> Point:
    m = _TRIPLE.match(text)
    if not m:
        raise ValueError(f"cannot parse point {text!r}; expected (a:b:c)")
    return Point.of(ctx, [ctx.parse(g) for g in m.groups()])


def parse_line(text: str, ctx: FieldCtx) -> Line:
    m = _TRIPLE.match(text)
    if not m:
        raise ValueError(f"cannot parse line {text!r}; expected (a:b:c)")
    return Line.of(ctx, [ctx.parse(g) for g in m.groups()])
