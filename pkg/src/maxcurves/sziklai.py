"""Sziklai's curves a*x0^(q-1) + b*x1^(q-1) + c*x2^(q-1) with abc != 0, a+b+c = 0.

Members are identified with the point (a : b) of P^1; projective equivalence
inside the family reduces to permuting (a, b, c), i.e. to an action of S_3
on P^1 minus {(0:1), (1:0), (1:-1)}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import forms, plane
from .forms import TernaryForm, monomial_index
from .gf import Fe, FieldCtx, prime_power
from .groups import burnside_count

# Fixed order used everywhere (reports, fixed-point rows).
S3 = ("(1)", "(1,2)", "(2,3)", "(1,3)", "(1,2,3)", "(1,3,2)")

# where each entry of the permuted triple comes from
_TRIPLE_PERM = {
    "(1)": (0, 1, 2),
    "(1,2)": (1, 0, 2),
    "(2,3)": (0, 2, 1),
    "(1,3)": (2, 1, 0),
    "(1,2,3)": (2, 0, 1),
    "(1,3,2)": (1, 2, 0),
}


@dataclass(frozen=True, order=True)
class SziklaiTriple:
    coeffs: tuple[Fe, Fe, Fe]
    ctx: FieldCtx

    def __post_init__(self):
        ctx = self.ctx
        a, b, c = plane.normalize(ctx, self.coeffs)
        if not (a and b and c):
            raise ValueError("all three coefficients must be nonzero")
        if ctx.add(ctx.add(a, b), c) != 0:
            raise ValueError("coefficients must sum to zero")
        object.__setattr__(self, "coeffs", (a, b, c))

    def rho(self) -> RhoPoint:
        return RhoPoint((self.coeffs[0], self.coeffs[1]), self.ctx)

    def __str__(self):
        return "(" + ":".join(self.ctx.format(c) for c in self.coeffs) + ")"


@dataclass(frozen=True, order=True)
class RhoPoint:
    """(a : b) in P^1, with (a, b, -(a+b)) a member of the family."""

    ab: tuple[Fe, Fe]
    ctx: FieldCtx

    def __post_init__(self):
        ctx = self.ctx
        a, b = (int(x) for x in self.ab)
        lead = a or b
        if not lead:
            raise ValueError("(0:0) is not a point of P^1")
        s = ctx.inv(lead)
        a, b = ctx.mul(s, a), ctx.mul(s, b)
        if a == 0 or b == 0 or ctx.add(a, b) == 0:
            raise ValueError(f"({a}:{b}) is not in the image")
        object.__setattr__(self, "ab", (a, b))

    def triple(self) -> SziklaiTriple:
        a, b = self.ab
        return SziklaiTriple((a, b, self.ctx.neg(self.ctx.add(a, b))), self.ctx)

    def __str__(self):
        return "(" + ":".join(self.ctx.format(c) for c in self.ab) + ")"


def family_members(ctx: FieldCtx) -> list[SziklaiTriple]:
    out = []
    for b in ctx.nonzero():
        c = ctx.neg(ctx.add(1, b))
        if c:
            out.append(SziklaiTriple((1, b, c), ctx))
    return out


def image_points(ctx: FieldCtx) -> list[RhoPoint]:
    return [t.rho() for t in family_members(ctx)]


def to_form(t: SziklaiTriple) -> TernaryForm:
    d = t.ctx.q - 1
    return TernaryForm.from_terms(
        t.ctx, {(d, 0, 0): t.coeffs[0], (0, d, 0): t.coeffs[1], (0, 0, d): t.coeffs[2]}
    )


def permute_triple(perm: str, t: SziklaiTriple) -> SziklaiTriple:
    src = _TRIPLE_PERM[perm]
    return SziklaiTriple(tuple(t.coeffs[i] for i in src), t.ctx)


def s3_act(perm: str, r: RhoPoint) -> RhoPoint:
    """The S_3 action on (a : b), written out formula by formula."""
    ctx = r.ctx
    a, b = r.ab
    s = ctx.neg(ctx.add(a, b))  # -(a + b)
    new = {
        "(1)": (a, b),
        "(1,2)": (b, a),
        "(2,3)": (a, s),
        "(1,3)": (s, b),
        "(1,2,3)": (s, a),
        "(1,3,2)": (b, s),
    }[perm]
    return RhoPoint(new, ctx)


def _compose(g: str, h: str) -> str:
    # (g h)(x) = g(h(x)) on triples
    t = tuple(_TRIPLE_PERM[h][i] for i in _TRIPLE_PERM[g])
    return next(k for k, v in _TRIPLE_PERM.items() if v == t)


def fixed_point_row(ctx: FieldCtx) -> tuple[int, ...]:
    """|Fix(sigma)| on the image for each sigma in S3 order, by enumeration."""
    pts = image_points(ctx)
    return tuple(sum(s3_act(g, r) == r for r in pts) for g in S3)


def case_label(q: int) -> str:
    pp = prime_power(q)
    if pp is None:
        raise ValueError(f"{q} is not a prime power")
    p, n = pp
    if p == 2:
        return "III-i" if n % 2 else "III-ii"
    if p == 3:
        return "II"
    return "I-i" if q % 3 == 2 else "I-ii"


def expected_fixed_row(q: int) -> tuple[int, ...]:
    """The closed-form fixed-point counts for the case of q, in S3 order."""
    trans, cyc = {
        "I-i": (1, 0),
        "I-ii": (1, 2),
        "II": (1, 1),
        "III-i": (0, 0),
        "III-ii": (0, 2),
    }[case_label(q)]
    return (q - 2, trans, trans, trans, cyc, cyc)


def nu_formula(q: int) -> int:
    num = {"I-i": q + 1, "I-ii": q + 5, "II": q + 3, "III-i": q - 2, "III-ii": q + 2}[case_label(q)]
    nu, rem = divmod(num, 6)
    if rem:
        raise ArithmeticError(f"class-count formula is not integral at q={q}")
    return nu


def nu_direct(ctx: FieldCtx) -> int:
    return burnside_count(s3_act, S3, image_points(ctx), identity="(1)", compose=_compose)[0]


def orbits(ctx: FieldCtx) -> list[list[SziklaiTriple]]:
    """S_3-orbits on the family, each sorted, ordered by representative."""
    pts = image_points(ctx)
    _, reps = burnside_count(s3_act, S3, pts, identity="(1)", compose=_compose)
    out = []
    for rep in reps:
        orb = sorted({s3_act(g, rep) for g in S3})
        out.append([r.triple() for r in orb])
    return out


def classify(ctx: FieldCtx, check_pgl: bool = False) -> list[SziklaiTriple]:
    """Lex-least representative of each class.

    With ``check_pgl`` the S_3 partition is compared with the partition by
    PGL(3, q)-equivalence of the actual curves (needs q <= 5 in practice).
    """
    orbs = orbits(ctx)
    if check_pgl:
        from .groups import canonical_form

        by_canon: dict = {}
        for orb in orbs:
            for t in orb:
                by_canon.setdefault(canonical_form(to_form(t)), set()).add(t)
        pgl_parts = sorted(sorted(s) for s in by_canon.values())
        if pgl_parts != sorted(orbs):
            raise RuntimeError("PGL classes and S_3 orbits disagree")
    return [orb[0] for orb in orbs]


# -- membership --------------------------------------------------------------

def triangle_complement_mask(ctx: FieldCtx) -> np.ndarray:
    pts = plane.point_array(ctx)
    return (pts != 0).all(axis=1)


def sziklai_by_points(f: TernaryForm) -> bool:
    return bool((forms.zero_mask(f) == triangle_complement_mask(f.ctx)).all())


def sziklai_by_coefficients(f: TernaryForm) -> bool:
    ctx = f.ctx
    d = f.d
    idx = monomial_index(d)
    pure = [idx[(d, 0, 0)], idx[(0, d, 0)], idx[(0, 0, d)]]
    c = f.coeffs
    if any(x for i, x in enumerate(c) if i not in pure):
        return False
    a, b, g = (c[i] for i in pure)
    return bool(a and b and g) and ctx.add(ctx.add(a, b), g) == 0


def is_sziklai(f: TernaryForm) -> bool:
    """Membership in the family, decided by the rational point set and
    cross-checked against the coefficient pattern."""
    if f.d != f.ctx.q - 1:
        raise ValueError(f"family members have degree q-1 = {f.ctx.q - 1}, got {f.d}")
    by_pts = sziklai_by_points(f)
    if by_pts != sziklai_by_coefficients(f):
        raise RuntimeError(f"point-set and coefficient membership disagree for {f}")
    return by_pts


def sziklai_masks(ctx: FieldCtx, coeffs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Bulk version of both membership routes for forms of degree q-1."""
    d = ctx.q - 1
    coeffs = np.asarray(coeffs, dtype=ctx.dtype)
    zero = forms.evaluate_batch(ctx, d, coeffs) == 0
    by_pts = (zero == triangle_complement_mask(ctx)[None, :]).all(axis=1)

    idx = monomial_index(d)
    pure = [idx[(d, 0, 0)], idx[(0, d, 0)], idx[(0, 0, d)]]
    other = np.ones(coeffs.shape[1], dtype=bool)
    other[pure] = False
    a, b, g = (coeffs[:, i] for i in pure)
    A = ctx.add_table
    by_coef = (
        ~(coeffs[:, other] != 0).any(axis=1)
        & (a != 0) & (b != 0) & (g != 0)
        & (A[A[a, b], g] == 0)
    )
    return by_pts, by_coef


def nu_table_rows(qs) -> list[dict]:
    from .gf import field_of_order

    rows = []
    for q in qs:
        ctx = field_of_order(q)
        rows.append({
            "q": q,
            "case": case_label(q),
            "nu_formula": nu_formula(q),
            "nu_direct": nu_direct(ctx),
            "fix": fixed_point_row(ctx),
        })
    return rows
