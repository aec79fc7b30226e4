"""Exhaustive search for plane cubics over F_4 with 9 rational points.

Every scalar-normalized cubic form over F_4 (349525 of them) is evaluated at
all 21 points of the plane; forms with N = 9 and no F_4-linear component are
then split into PGL(3, 4)-orbits.  The expected outcome is two classes: the
Hermitian (= Fermat) cubic and x0^3 + w*x1^3 + w^2*x2^3.
"""

from __future__ import annotations

import functools
import logging
import multiprocessing
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

import numpy as np

from . import forms, plane, sziklai
from .forms import TernaryForm, monomials
from .gf import FieldCtx, fdot, field_of_order
from .groups import action_table, canonical_form, pgl_order

log = logging.getLogger(__name__)

Q = 4
D = 3
N_MAX = 9
# fixed invariants of the two classes of maximal cubics
FLEX_MU = (0, 9, 0, 12)
TRIANGLE_MU = (3, 0, 9, 9)


class InconsistencyError(RuntimeError):
    """Two computations that must agree did not."""


class MuQuadruple(NamedTuple):
    mu0: int
    mu1: int
    mu2: int
    mu3: int


def f4() -> FieldCtx:
    return field_of_order(Q)


@functools.lru_cache(maxsize=None)
def cubic_coefficient_array() -> np.ndarray:
    """All normalized cubic coefficient vectors over F_4, in lexicographic order."""
    m = len(monomials(D))
    codes = np.arange(Q**m, dtype=np.int64)
    digits = (codes[:, None] // Q ** np.arange(m - 1, -1, -1)[None, :]) % Q
    # first nonzero digit must be 1 (the zero vector has first digit 0)
    first = digits[np.arange(len(digits)), (digits != 0).argmax(axis=1)]
    out = digits[first == 1].astype(np.uint8)
    out.setflags(write=False)
    return out


def enumerate_cubics_f4() -> Iterator[TernaryForm]:
    ctx = f4()
    for row in cubic_coefficient_array().tolist():
        yield TernaryForm(ctx, D, tuple(row))


@functools.lru_cache(maxsize=None)
def _gradient_tables(ctx: FieldCtx, d: int) -> np.ndarray:
    """(3, monomials, points): coefficient vector -> value of df/dx_i at each point."""
    m = len(monomials(d))
    vals = forms.monomial_values(ctx, d - 1).T
    out = []
    for i in range(3):
        lin = np.zeros((m, len(monomials(d - 1))), dtype=ctx.dtype)
        for k in range(m):
            unit = [0] * m
            unit[k] = 1
            lin[k] = forms.partials_of(ctx, d, unit)[i]
        out.append(fdot(ctx, lin, vals))
    return np.stack(out)


def rational_singular_mask(ctx: FieldCtx, d: int, coeffs: np.ndarray) -> np.ndarray:
    """Does each form have a singular F_q-rational point?"""
    coeffs = np.asarray(coeffs, dtype=ctx.dtype)
    zero = forms.evaluate_batch(ctx, d, coeffs) == 0
    for G in _gradient_tables(ctx, d):
        zero &= fdot(ctx, coeffs, G) == 0
    return zero.any(axis=1)


# -- the scan ----------------------------------------------------------------

@dataclass
class ScanResult:
    total: int = 0
    n_histogram: Counter = field(default_factory=Counter)
    free_histogram: Counter = field(default_factory=Counter)  # linear-component-free forms only
    maximal_rows: list = field(default_factory=list)
    singular_free_max_n: int = -1
    sziklai_members: int = 0
    sziklai_disagreements: int = 0

    def merge(self, other: ScanResult) -> ScanResult:
        self.total += other.total
        self.n_histogram.update(other.n_histogram)
        self.free_histogram.update(other.free_histogram)
        self.maximal_rows.extend(other.maximal_rows)
        self.singular_free_max_n = max(self.singular_free_max_n, other.singular_free_max_n)
        self.sziklai_members += other.sziklai_members
        self.sziklai_disagreements += other.sziklai_disagreements
        return self


def _scan_range(bounds: tuple[int, int]) -> ScanResult:
    ctx = f4()
    start, stop = bounds
    rows = cubic_coefficient_array()[start:stop]
    zero = forms.evaluate_batch(ctx, D, rows) == 0
    n = zero.sum(axis=1)
    free = ~forms.linear_component_mask(ctx, D, rows)
    sing = rational_singular_mask(ctx, D, rows[free])
    by_pts, by_coef = sziklai.sziklai_masks(ctx, rows)

    res = ScanResult(total=len(rows))
    res.n_histogram.update(n.tolist())
    res.free_histogram.update(n[free].tolist())
    res.maximal_rows = [tuple(r) for r in rows[free & (n == N_MAX)].tolist()]
    if sing.any():
        res.singular_free_max_n = int(n[free][sing].max())
    res.sziklai_members = int(by_pts.sum())
    res.sziklai_disagreements = int((by_pts != by_coef).sum())
    return res


def scan_cubics(jobs: int = 1, chunk: int = 16384) -> ScanResult:
    """Evaluate every normalized cubic over F_4; chunks may run in parallel."""
    total = len(cubic_coefficient_array())
    ranges = [(s, min(s + chunk, total)) for s in range(0, total, chunk)]
    out = ScanResult()
    if jobs > 1:
        with multiprocessing.get_context("fork").Pool(jobs) as pool:
            parts = pool.map(_scan_range, ranges)
    else:
        parts = map(_scan_range, ranges)
    for part in parts:
        out.merge(part)
    out.maximal_rows.sort()
    return out


def _check_scan(res: ScanResult) -> None:
    if res.total != (Q**10 - 1) // (Q - 1):
        raise InconsistencyError(f"scanned {res.total} forms")
    worst = max(res.free_histogram)
    if worst > forms.bounds(D, Q)[1]:
        raise InconsistencyError(f"a cubic without linear components has {worst} points")
    if res.singular_free_max_n > 6:
        raise InconsistencyError(
            f"a singular cubic without linear components has {res.singular_free_max_n} points"
        )
    if res.sziklai_disagreements:
        raise InconsistencyError("point-set and coefficient membership in the Sziklai family disagree")


def search_maximal(
    jobs: int = 1, scan: ScanResult | None = None, check_division: bool = True
) -> list[TernaryForm]:
    """Cubics over F_4 with 9 points and no F_4-linear component, each checked smooth."""
    res = scan if scan is not None else scan_cubics(jobs)
    _check_scan(res)
    ctx = f4()
    rows = np.array(res.maximal_rows, dtype=ctx.dtype).reshape(-1, len(monomials(D)))
    if len(rows) and not forms.smooth_mask(ctx, D, rows).all():
        raise InconsistencyError("a maximal cubic is singular")
    found = [TernaryForm(ctx, D, r) for r in res.maximal_rows]
    if check_division and any(forms.has_linear_component(f) for f in found):
        raise InconsistencyError("line division finds a component the restriction test missed")
    return found


def mu_quadruple(f: TernaryForm) -> MuQuadruple:
    if f.d != D or f.ctx.q != Q:
        raise ValueError("defined for cubics over F_4")
    spec = forms.line_spectrum(f)
    return MuQuadruple(*(spec.get(k, 0) for k in range(4)))


def mu_identities_hold(mu: MuQuadruple) -> bool:
    return sum(mu) == 21 and mu.mu1 + 2 * mu.mu2 + 3 * mu.mu3 == 45 and mu.mu1 + mu.mu2 == 9


# -- geometric checks on individual maximal cubics -----------------------------

def secant_multiplicities(f: TernaryForm) -> dict[int, list[tuple[int, ...]]]:
    """For 1- and 2-lines: sorted intersection multiplicities at their rational points."""
    mask = forms.zero_mask(f)
    out: dict[int, list] = {1: [], 2: []}
    for l, delta in zip(plane.enumerate_lines(f.ctx), forms.line_deltas(f)):
        if delta in (1, 2):
            on = [P for P in plane.points_on(l) if mask[plane.point_index(f.ctx)[P.coords]]]
            out[int(delta)].append(tuple(sorted(forms.intersection_multiplicity(f, l, P) for P in on)))
    return out


def secant_patterns_hold(f: TernaryForm) -> bool:
    """1-lines are flex tangents (3P) and 2-lines are simple tangents (2P1 + P2)."""
    ms = secant_multiplicities(f)
    return all(m == (3,) for m in ms[1]) and all(m == (1, 2) for m in ms[2])


def zero_lines(f: TernaryForm) -> list[plane.Line]:
    lines = plane.enumerate_lines(f.ctx)
    return [lines[i] for i in np.flatnonzero(forms.line_deltas(f) == 0)]


def zero_lines_concurrent(f: TernaryForm) -> bool:
    ls = zero_lines(f)
    if len(ls) < 3:
        return True
    P = plane.meet(ls[0], ls[1])
    return all(plane.incident(l, P) for l in ls[2:])


def flex_case_properties(f: TernaryForm) -> bool:
    """Smooth cubic with 9 points, every rational point a flex, and every
    point off the curve on exactly three 1-lines."""
    ctx = f.ctx
    if f.d != D or ctx.q != Q or forms.count_points(f) != N_MAX or not forms.is_smooth(f):
        return False
    for P in forms.rational_points(f):
        if forms.intersection_multiplicity(f, forms.tangent_line(f, P), P) != 3:
            return False
    deltas = forms.line_deltas(f)
    inc = plane.incidence_matrix(ctx)
    off = ~forms.zero_mask(f)
    one_lines = inc[deltas == 1]
    return bool((one_lines[:, off].sum(axis=0) == 3).all())


# -- orbit decomposition -----------------------------------------------------

@dataclass(frozen=True)
class ClassRecord:
    canonical: TernaryForm
    orbit_size: int
    stabilizer: int
    mu: MuQuadruple
    hermitian: bool
    sziklai: bool
    flex_case: bool


@dataclass
class ClassificationReport:
    total: int
    n_histogram: dict[int, int]
    free_histogram: dict[int, int]
    maximal: list[TernaryForm]
    classes: list[ClassRecord]
    singular_free_max_n: int
    sziklai_members: int

    def to_json(self) -> dict:
        return {
            "q": Q,
            "degree": D,
            "total_forms": self.total,
            "n_histogram": {str(k): v for k, v in sorted(self.n_histogram.items())},
            "linear_free_histogram": {str(k): v for k, v in sorted(self.free_histogram.items())},
            "maximal_count": len(self.maximal),
            "singular_linear_free_max_points": self.singular_free_max_n,
            "classes": [
                {
                    "canonical_form": str(c.canonical),
                    "orbit_size": c.orbit_size,
                    "stabilizer_order": c.stabilizer,
                    "mu": list(c.mu),
                    "hermitian": c.hermitian,
                    "sziklai": c.sziklai,
                    "flex_case": c.flex_case,
                }
                for c in self.classes
            ],
        }


def orbit_partition(found: list[TernaryForm]) -> list[tuple[TernaryForm, np.ndarray, int]]:
    """Split a PGL-invariant set of forms into orbits: (canonical, members, stabilizer)."""
    if not found:
        return []
    ctx, d = found[0].ctx, found[0].d
    table = action_table(ctx, d)
    index = {f.coeffs: i for i, f in enumerate(found)}
    assigned = np.zeros(len(found), dtype=bool)
    out = []
    for i, f in enumerate(found):
        if assigned[i]:
            continue
        imgs = table.images(f)
        stab = int((imgs == np.array(f.coeffs, dtype=imgs.dtype)).all(axis=1).sum())
        orb = np.unique(imgs, axis=0)
        for row in orb.tolist():
            j = index.get(tuple(row))
            if j is None:
                raise InconsistencyError(f"orbit of {f} leaves the searched set")
            if assigned[j]:
                raise InconsistencyError("orbits overlap")
            assigned[j] = True
        if len(orb) * stab != len(table):
            raise InconsistencyError(f"orbit {len(orb)} x stabilizer {stab} != |PGL| for {f}")
        out.append((TernaryForm(ctx, d, tuple(orb[0].tolist())), orb, stab))
    return out


def classify_maximal(jobs: int = 1, scan: ScanResult | None = None) -> ClassificationReport:
    res = scan if scan is not None else scan_cubics(jobs)
    found = search_maximal(scan=res)
    ctx = f4()
    fermat = forms.hermitian_form(ctx)
    members = [sziklai.to_form(t) for t in sziklai.family_members(ctx)]

    classes = []
    for canon, orb, stab in orbit_partition(found):
        rows = {tuple(r) for r in orb.tolist()}
        mu = mu_quadruple(canon)
        herm = fermat.coeffs in rows
        szk = any(g.coeffs in rows for g in members)
        if szk and not all(g.coeffs in rows for g in members):
            raise InconsistencyError("the Sziklai family splits over several classes")
        classes.append(ClassRecord(canon, len(orb), stab, mu, herm, szk, flex_case_properties(canon)))
        log.info("class %s: orbit %d, stabilizer %d, mu %s", canon, len(orb), stab, tuple(mu))

    if len(classes) != 2:
        raise InconsistencyError(f"expected 2 classes of maximal cubics, found {len(classes)}")
    if sorted(c.mu for c in classes) != sorted([FLEX_MU, TRIANGLE_MU]):
        raise InconsistencyError(f"unexpected mu quadruples {[c.mu for c in classes]}")
    for c in classes:
        expect_herm = c.mu == FLEX_MU
        if c.hermitian != expect_herm or c.sziklai == expect_herm or c.flex_case != expect_herm:
            raise InconsistencyError(f"class {c.canonical} has inconsistent flags")
        if canonical_form(c.canonical) != c.canonical:
            raise InconsistencyError("orbit minimum differs from canonical_form")
        if c.orbit_size * c.stabilizer != pgl_order(Q):
            raise InconsistencyError("orbit-stabilizer mismatch")
    classes.sort(key=lambda c: not c.hermitian)

    return ClassificationReport(
        total=res.total,
        n_histogram=dict(res.n_histogram),
        free_histogram=dict(res.free_histogram),
        maximal=found,
        classes=classes,
        singular_free_max_n=res.singular_free_max_n,
        sziklai_members=res.sziklai_members,
    )


# -- the quartic exception to the (d-1)q + 1 bound ---------------------------

@dataclass
class QuarticSample:
    sampled: int
    linear_free: int
    max_points: int
    violators: list[TernaryForm]
    violators_equivalent: bool


def quartic_bound_sample(n: int = 100_000, seed: int = 0, batch: int = 20_000) -> QuarticSample:
    """Random quartics over F_4: those without linear components stay within
    (d-1)q + 1 = 13 points unless projectively equal to the exceptional quartic."""
    ctx = f4()
    d = 4
    m = len(monomials(d))
    limit = forms.bounds(d, Q)[1]
    rng = np.random.default_rng(seed)
    free_total = 0
    worst = 0
    bad = []
    done = 0
    while done < n:
        k = min(batch, n - done)
        rows = rng.integers(0, Q, size=(k, m)).astype(ctx.dtype)
        rows = rows[(rows != 0).any(axis=1)]
        free = ~forms.linear_component_mask(ctx, d, rows)
        npts = (forms.evaluate_batch(ctx, d, rows[free]) == 0).sum(axis=1)
        free_total += int(free.sum())
        if len(npts):
            worst = max(worst, int(npts.max()))
        bad.extend(TernaryForm(ctx, d, tuple(r)) for r in rows[free][npts > limit].tolist())
        done += k
    equivalent = True
    if bad:
        canon = canonical_form(forms.exceptional_quartic(ctx))
        equivalent = all(canonical_form(f) == canon for f in bad)
    return QuarticSample(n, free_total, worst, bad, equivalent)
