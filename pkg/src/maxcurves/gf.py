"""Arithmetic in small finite fields F_{p^n}.

Elements are integer handles: 0 is zero and ``k >= 1`` stands for
``g**(k-1)`` where ``g`` generates the multiplicative group.  Scalar
arithmetic goes through log/exp (Zech) tables; the full ``q x q`` addition
and multiplication tables are also kept as numpy arrays so that bulk
evaluation can be done by fancy indexing.
"""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass, field

import numpy as np

MAX_ORDER = 1024

Fe = int


class FieldError(ValueError):
    """Raised for unsupported field parameters or malformed elements."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    i = 2
    while i * i <= n:
        if n % i == 0:
            out.append(i)
            while n % i == 0:
                n //= i
        i += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, n)`` with ``q == p**n``, or None if q is not a prime power."""
    if q < 2:
        return None
    ps = prime_factors(q)
    if len(ps) != 1:
        return None
    p = ps[0]
    n = 0
    while q > 1:
        q //= p
        n += 1
    return p, n


# -- polynomials over F_p, coefficient lists low -> high ---------------------

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, m, p):
    a = _trim(a)
    m = _trim(m)
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        a = _trim(a)
    return a


def _poly_mulmod(a, b, m, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_mod(out, m, p)


def _poly_powmod(a, e, m, p):
    result = [1]
    base = _poly_mod(a, m, p)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, m, p)
        base = _poly_mulmod(base, base, m, p)
        e >>= 1
    return result


def _poly_eval_at(poly, x, m, p):
    """Evaluate an F_p-polynomial at an element x of F_p[t]/(m) (Horner)."""
    acc = []
    for c in reversed(poly):
        acc = _poly_mulmod(acc, x, m, p)
        acc = _trim([(acc[0] if acc else 0) + c] + acc[1:]) if (acc or c) else []
        acc = [a % p for a in acc]
        acc = _trim(acc)
    return acc


def _monic(deg, p):
    # lexicographic in (c_{deg-1}, ..., c_0)
    for top in itertools.product(range(p), repeat=deg):
        yield list(reversed(top)) + [1]


def is_irreducible(poly: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    poly = _trim(poly)
    n = len(poly) - 1
    if n < 1:
        return False
    for d in range(1, n // 2 + 1):
        for g in _monic(d, p):
            if not _poly_mod(poly, g, p):
                return False
    return True


def _is_primitive(modulus, p, n):
    order = p**n - 1
    if _poly_powmod([0, 1], order, modulus, p) != [1]:
        return False
    for r in prime_factors(order):
        if _poly_powmod([0, 1], order // r, modulus, p) == [1]:
            return False
    return True


@functools.lru_cache(maxsize=None)
def _modulus(p: int, n: int) -> tuple[int, ...]:
    # Least primitive polynomial whose root also norms down onto the
    # generators of every proper subfield, so that subfield embeddings
    # g_small -> g_big**((Q-1)/(q-1)) are ring homomorphisms.
    subs = [(m, _modulus(p, m)) for m in range(1, n) if n % m == 0]
    for cand in _monic(n, p):
        if not is_irreducible(cand, p) or not _is_primitive(cand, p, n):
            continue
        ok = True
        for m, sub in subs:
            e = (p**n - 1) // (p**m - 1)
            y = _poly_powmod([0, 1], e, cand, p)
            if _poly_eval_at(list(sub), y, cand, p):
                ok = False
                break
        if ok:
            return tuple(cand)
    raise FieldError(f"no compatible primitive polynomial for p={p}, n={n}")


# -- field context -----------------------------------------------------------

_POWER = re.compile(r"^g(?:\^(\d+))?$")


@dataclass(frozen=True, eq=False)
class FieldCtx:
    p: int
    n: int
    q: int
    modulus: tuple[int, ...]
    gen: Fe
    vec: np.ndarray = field(repr=False)      # handle -> packed F_p coefficient vector
    log: np.ndarray = field(repr=False)      # packed vector -> handle
    zech: np.ndarray = field(repr=False)     # k -> handle of 1 + g^k
    add_table: np.ndarray = field(repr=False)
    mul_table: np.ndarray = field(repr=False)
    neg_table: np.ndarray = field(repr=False)
    inv_table: np.ndarray = field(repr=False)

    def __eq__(self, other):
        return isinstance(other, FieldCtx) and (self.p, self.n) == (other.p, other.n)

    def __hash__(self):
        return hash((self.p, self.n))

    def __repr__(self):
        return f"GF({self.p}^{self.n})" if self.n > 1 else f"GF({self.p})"

    @property
    def zero(self) -> Fe:
        return 0

    @property
    def one(self) -> Fe:
        return 1

    @property
    def dtype(self):
        return np.uint8 if self.q <= 256 else np.uint16

    def elements(self) -> range:
        return range(self.q)

    def nonzero(self) -> range:
        return range(1, self.q)

    # scalar arithmetic
    def add(self, a: Fe, b: Fe) -> Fe:
        if a == 0:
            return b
        if b == 0:
            return a
        z = int(self.zech[(b - a) % (self.q - 1)])
        if z == 0:
            return 0
        return (a + z - 2) % (self.q - 1) + 1

    def neg(self, a: Fe) -> Fe:
        return int(self.neg_table[a])

    def sub(self, a: Fe, b: Fe) -> Fe:
        return self.add(a, int(self.neg_table[b]))

    def mul(self, a: Fe, b: Fe) -> Fe:
        if a == 0 or b == 0:
            return 0
        return (a + b - 2) % (self.q - 1) + 1

    def inv(self, a: Fe) -> Fe:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return (1 - a) % (self.q - 1) + 1

    def div(self, a: Fe, b: Fe) -> Fe:
        return self.mul(a, self.inv(b))

    def pow(self, a: Fe, e: int) -> Fe:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("zero to a negative power")
            return 1 if e == 0 else 0
        return ((a - 1) * e) % (self.q - 1) + 1

    def from_int(self, m: int) -> Fe:
        """Image of the integer m in the prime subfield."""
        return int(self.log[m % self.p])

    def power_of_gen(self, k: int) -> Fe:
        return k % (self.q - 1) + 1

    def sum(self, items) -> Fe:
        acc = 0
        for x in items:
            acc = self.add(acc, x)
        return acc

    # text syntax
    def parse(self, text: str) -> Fe:
        s = text.strip()
        if s == "0":
            return 0
        if s == "1":
            return 1
        if self.q == 4 and s in ("w", "w1"):
            return 2
        if self.q == 4 and s == "w2":
            return 3
        m = _POWER.match(s)
        if m:
            k = int(m.group(1)) if m.group(1) is not None else 1
            return self.power_of_gen(k)
        if self.n == 1 and s.isdigit():
            return self.from_int(int(s))
        raise FieldError(f"cannot parse field element {text!r} in {self!r}")

    def format(self, a: Fe) -> str:
        a = int(a)
        if a < 2:
            return str(a)
        if self.q == 4:
            return "w" if a == 2 else "w2"
        if self.n == 1:
            return str(int(self.vec[a]))
        return f"g^{a - 1}"


@functools.lru_cache(maxsize=None)
def field_ctx(p: int, n: int = 1) -> FieldCtx:
    """Build (and cache) the context for F_{p^n}."""
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if n < 1 or p**n > MAX_ORDER:
        raise FieldError(f"field order {p}^{n} out of range (max {MAX_ORDER})")
    q = p**n
    modulus = _modulus(p, n)

    packed = np.zeros(q, dtype=np.int64)
    cur = [1]
    for k in range(1, q):
        packed[k] = sum(c * p**i for i, c in enumerate(cur))
        cur = _poly_mulmod(cur, [0, 1], list(modulus), p)
    log = np.zeros(q, dtype=np.int64)
    log[packed] = np.arange(q)
    if len(set(packed.tolist())) != q:
        raise FieldError("generator is not primitive")

    digits = np.array([[(v // p**i) % p for i in range(n)] for v in packed], dtype=np.int64)
    weights = p ** np.arange(n, dtype=np.int64)
    summed = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
    add_table = log[summed]
    neg_table = log[((-digits) % p) @ weights]

    h = np.arange(q)
    mul_table = np.where(
        (h[:, None] == 0) | (h[None, :] == 0), 0, (h[:, None] + h[None, :] - 2) % (q - 1) + 1
    )
    inv_table = np.where(h == 0, 0, (1 - h) % (q - 1) + 1)
    zech = np.array([add_table[1, k + 1] for k in range(q - 1)], dtype=np.int64)

    dt = np.uint8 if q <= 256 else np.uint16
    return FieldCtx(
        p=p, n=n, q=q, modulus=modulus, gen=2 if q > 2 else 1,
        vec=packed, log=log, zech=zech,
        add_table=add_table.astype(dt), mul_table=mul_table.astype(dt),
        neg_table=neg_table.astype(dt), inv_table=inv_table.astype(dt),
    )


def field_of_order(q: int) -> FieldCtx:
    pp = prime_power(q)
    if pp is None:
        raise FieldError(f"{q} is not a prime power")
    return field_ctx(*pp)


_OPS = {"add", "sub", "mul", "div", "pow", "inv", "neg"}


def arith(ctx: FieldCtx, a: Fe, b, op: str) -> Fe:
    """Dispatch a named field operation; ``b`` is ignored for inv/neg and is
    an integer exponent for pow."""
    if op not in _OPS:
        raise ValueError(f"unknown operation {op!r}")
    if op in ("inv", "neg"):
        return getattr(ctx, op)(a)
    return getattr(ctx, op)(a, b)


def frobenius(a: Fe, ctx: FieldCtx, base: FieldCtx | int | None = None) -> Fe:
    """Return ``a**r`` where r is the order of the base field (default: ctx itself).

    With ``ctx = F_16`` and ``base = F_4`` this is the F_4-Frobenius on F_16.
    """
    r = ctx.q if base is None else (base if isinstance(base, int) else base.q)
    m, t = 0, 1
    while t < r:
        t *= ctx.p
        m += 1
    if t != r or ctx.n % m:
        raise FieldError(f"F_{r} is not a subfield of {ctx!r}")
    return ctx.pow(a, r)


def embed(a: Fe, src: FieldCtx, dst: FieldCtx) -> Fe:
    if src.p != dst.p or dst.n % src.n:
        raise FieldError(f"{dst!r} is not an extension of {src!r}")
    if a == 0:
        return 0
    e = (dst.q - 1) // (src.q - 1)
    return ((a - 1) * e) % (dst.q - 1) + 1


def embedding_table(src: FieldCtx, dst: FieldCtx) -> np.ndarray:
    return np.array([embed(a, src, dst) for a in src.elements()], dtype=dst.dtype)


def roots_with_multiplicity(coeffs, ctx: FieldCtx) -> list[tuple[Fe, int]]:
    """Roots in F_q of a univariate polynomial (coefficients low -> high)."""
    c = _trim(int(x) for x in coeffs)
    if not c:
        raise ValueError("zero polynomial has no well-defined roots")
    out = []
    for r in ctx.elements():
        m = root_multiplicity(c, r, ctx)
        if m:
            out.append((r, m))
    return out


def root_multiplicity(coeffs, r: Fe, ctx: FieldCtx) -> int:
    """Largest m with (x - r)^m dividing the polynomial, by synthetic division."""
    c = _trim(int(x) for x in coeffs)
    if not c:
        raise ValueError("zero polynomial")
    m = 0
    while len(c) > 1:
        # divide by (x - r): quotient via Horner, remainder is c(r)
        acc = 0
        quot = []
        for x in reversed(c):
            acc = ctx.add(ctx.mul(acc, r), x)
            quot.append(acc)
        if quot[-1] != 0:
            break
        c = list(reversed(quot[:-1]))
        m += 1
    return m


# -- bulk helpers over numpy handle arrays -----------------------------------

def fdot(ctx: FieldCtx, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Field matrix product ``a @ b`` for handle arrays (a: (..., k), b: (k, m))."""
    A, M = ctx.add_table, ctx.mul_table
    out = np.zeros(a.shape[:-1] + (b.shape[1],), dtype=ctx.dtype)
    for k in range(a.shape[-1]):
        out = A[out, M[a[..., k, None], b[k]]]
    return out


def rref(ctx: FieldCtx, rows) -> tuple[list[list[Fe]], list[int]]:
    """Reduced row echelon form over F_q; returns (nonzero rows, pivot columns)."""
    mat = [list(map(int, r)) for r in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        s = ctx.inv(mat[r][c])
        mat[r] = [ctx.mul(s, x) for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [ctx.sub(x, ctx.mul(f, y)) for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def nullspace(ctx: FieldCtx, rows, ncols: int) -> list[list[Fe]]:
    """Basis of {v : rows @ v = 0}, returned in reduced row echelon form."""
    red, pivots = rref(ctx, rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for row, pc in zip(red, pivots):
            v[pc] = ctx.neg(row[f])
        basis.append(v)
    return rref(ctx, basis)[0]
