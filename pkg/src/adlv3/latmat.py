"""3x3 matrices over truncated Laurent series, normal forms and lattices.

Lattices are column spans L = M * O^3.  The canonical representative of the
coset M*K (K = GL_3(O)) is the column Hermite form: upper triangular with
diagonal t^{d_1}, t^{d_2}, t^{d_3} and off-diagonal (i, j) entries reduced to
Laurent polynomials with exponents < d_i.  A ``Vertex`` is the homothety
class, normalized so that d_1 + d_2 + d_3 lies in {0, 1, 2}; its entries are
exact polynomials, so vertex equality is plain structural equality.
"""

from __future__ import annotations

import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .ff import FieldCtx, field
from .series import TSeries, ZeroToPrecision

PREC_CAP = 64


class PrecisionError(ArithmeticError):
    """Precision doubling hit the cap without resolving a pivot."""


class SingularMatrix(ArithmeticError):
    pass


def _pmin(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class Mat3:
    """Row-major 3x3 matrix of TSeries."""

    __slots__ = ("ctx", "e")

    def __init__(self, ctx: FieldCtx, entries: Sequence[TSeries]):
        if len(entries) != 9:
            raise ValueError("Mat3 needs 9 entries")
        self.ctx = ctx
        self.e = list(entries)

    # construction --------------------------------------------------------------------

    @classmethod
    def from_rows(cls, ctx: FieldCtx, rows, prec: Optional[int] = None) -> "Mat3":
        """Rows of entries given as TSeries, ints (field codes) or {exp: code} dicts."""
        out = []
        for row in rows:
            for x in row:
                if isinstance(x, TSeries):
                    out.append(x)
                elif isinstance(x, dict):
                    out.append(TSeries.from_terms(ctx, x.items(), prec))
                else:
                    out.append(TSeries.const(ctx, x, prec))
        return cls(ctx, out)

    @classmethod
    def identity(cls, ctx: FieldCtx) -> "Mat3":
        return cls.diag_t(ctx, (0, 0, 0))

    @classmethod
    def diag_t(cls, ctx: FieldCtx, lam: Sequence[int]) -> "Mat3":
        z = TSeries.zero(ctx)
        e = [z] * 9
        for i in range(3):
            e[4 * i] = TSeries.monomial(ctx, lam[i])
        return cls(ctx, e)

    def __getitem__(self, ij) -> TSeries:
        i, j = ij
        return self.e[3 * i + j]

    def rows(self) -> list[list[TSeries]]:
        return [self.e[3 * i: 3 * i + 3] for i in range(3)]

    # arithmetic ----------------------------------------------------------------------

    def __mul__(self, other: "Mat3") -> "Mat3":
        a, b = self.e, other.e
        out = []
        for i in range(3):
            for j in range(3):
                s = None
                for k in range(3):
                    x, y = a[3 * i + k], b[3 * k + j]
                    if (not x.c and x.prec is None) or (not y.c and y.prec is None):
                        continue
                    t = x * y
                    s = t if s is None else s + t
                out.append(s if s is not None else TSeries.zero(self.ctx))
        return Mat3(self.ctx, out)

    def __add__(self, other: "Mat3") -> "Mat3":
        return Mat3(self.ctx, [x + y for x, y in zip(self.e, other.e)])

    def __sub__(self, other: "Mat3") -> "Mat3":
        return Mat3(self.ctx, [x - y for x, y in zip(self.e, other.e)])

    def scale_t(self, k: int) -> "Mat3":
        return Mat3(self.ctx, [x.shift(k) for x in self.e])

    def sigma(self, k: int = 1) -> "Mat3":
        return Mat3(self.ctx, [x.sigma(k) for x in self.e])

    def with_prec(self, prec: int) -> "Mat3":
        return Mat3(self.ctx, [x.with_prec(prec) for x in self.e])

    def transpose(self) -> "Mat3":
        e = self.e
        return Mat3(self.ctx, [e[3 * j + i] for i in range(3) for j in range(3)])

    @property
    def exact(self) -> bool:
        return all(x.prec is None for x in self.e)

    def minors2(self) -> list[TSeries]:
        e = self.e
        out = []
        for r1, r2 in ((0, 1), (0, 2), (1, 2)):
            for c1, c2 in ((0, 1), (0, 2), (1, 2)):
                out.append(e[3 * r1 + c1] * e[3 * r2 + c2] - e[3 * r1 + c2] * e[3 * r2 + c1])
        return out

    def det(self) -> TSeries:
        e = self.e
        return (e[0] * (e[4] * e[8] - e[5] * e[7])
                - e[1] * (e[3] * e[8] - e[5] * e[6])
                + e[2] * (e[3] * e[7] - e[4] * e[6]))

    def adj(self) -> "Mat3":
        """Adjugate: adj(M) * M = det(M) * 1."""
        e = self.e

        def cof(r, c):
            rs = [i for i in range(3) if i != r]
            cs = [j for j in range(3) if j != c]
            m = (e[3 * rs[0] + cs[0]] * e[3 * rs[1] + cs[1]]
                 - e[3 * rs[0] + cs[1]] * e[3 * rs[1] + cs[0]])
            return -m if (r + c) % 2 else m

        return Mat3(self.ctx, [cof(j, i) for i in range(3) for j in range(3)])

    def inverse(self, prec: Optional[int] = None) -> "Mat3":
        d = self.det()
        di = d.invert(prec)
        return Mat3(self.ctx, [x * di for x in self.adj().e])

    def agrees(self, other: "Mat3") -> bool:
        return all(x.agrees(y) for x, y in zip(self.e, other.e))

    def to_text(self) -> str:
        return "\n".join("  ".join(x.to_text() for x in row) for row in self.rows())

    def __repr__(self) -> str:
        return f"Mat3(\n{self.to_text()}\n)"


def minval(xs: Iterable[TSeries]) -> int:
    """Minimal valuation of a family of series, raising if it is undetermined."""
    best = None
    bound = None
    for x in xs:
        if x.c:
            if best is None or x.lo < best:
                best = x.lo
        elif x.prec is not None:
            bound = x.prec if bound is None else min(bound, x.prec)
    if best is None:
        if bound is None:
            raise SingularMatrix("all entries are exactly zero")
        raise ZeroToPrecision(bound)
    if bound is not None and bound < best:
        raise ZeroToPrecision(bound)
    return best


def det_valuation(M: Mat3) -> int:
    return M.det().valuation()


def elementary_divisors(M: Mat3) -> tuple[int, int, int]:
    """Dominant lambda with M in K t^lambda K, from gcds of minors."""
    v1 = minval(M.e)
    v2 = minval(M.minors2())
    v3 = M.det().valuation()
    return (v3 - v2, v2 - v1, v1)


# ---------------------------------------------------------------------------------
# Hermite form
# ---------------------------------------------------------------------------------

def _remainder(x: TSeries, d: int) -> tuple[TSeries, TSeries]:
    """Split x = r + t^d * s with r an exact polynomial of exponents < d."""
    ctx = x.ctx
    if x.prec is not None and x.prec < d:
        raise ZeroToPrecision(x.prec, "Hermite reduction needs more precision")
    r_terms = [(e, a) for e, a in x.terms() if e < d]
    r = TSeries.from_terms(ctx, r_terms)
    if x.c and x.end() > d:
        k = max(d - x.lo, 0)
        s = TSeries(ctx, x.lo + k - d, None if x.prec is None else x.prec - d, x.c[k:])
    elif x.prec is None:
        s = TSeries.zero(ctx)
    else:
        s = TSeries.zero(ctx, x.prec - d)
    return r, s


def _hermite_columns(ctx: FieldCtx, cols: list[list[TSeries]]):
    """Column Hermite reduction of three windowed columns (precision-tracked)."""
    active = [list(c) for c in cols]
    piv: dict[int, list[TSeries]] = {}
    d = [0, 0, 0]
    zero = TSeries.zero(ctx)
    for row in (2, 1, 0):
        entries = [c[row] for c in active]
        v = minval(entries)
        ci = next(i for i, x in enumerate(entries) if x.c and x.lo == v)
        col = active.pop(ci)
        u_inv = col[row].shift(-v).invert()
        col = [x * u_inv for x in col]
        col[row] = TSeries.monomial(ctx, v)
        for r in range(row + 1, 3):
            col[r] = zero
        for c in active:
            a = c[row]
            if a.c:
                f = a.shift(-v)
                c[:] = [x - f * y for x, y in zip(c, col)]
            c[row] = zero
        piv[row] = col
        d[row] = v
    return _finish(ctx, d, piv[1][0], piv[2][0], piv[2][1])


def _finish(ctx: FieldCtx, d, h12: TSeries, h13: TSeries, h23: TSeries):
    # reduce column 3 by column 2, then everything by column 1
    r23, s = _remainder(h23, d[1])
    if s.c:
        h13 = h13 - s * h12
    r13, _ = _remainder(h13, d[0])
    r12, _ = _remainder(h12, d[0])
    return tuple(d), r12, r13, r23


def _trunc(x: TSeries, b: int) -> TSeries:
    """Exact polynomial made of the terms of x with exponent < b."""
    if not x.c:
        return TSeries.zero(x.ctx)
    if x.end() <= b and x.prec is None:
        return x
    k = max(b - x.lo, 0)
    return TSeries(x.ctx, x.lo, None, x.c[:k])


def _hermite_mod(ctx: FieldCtx, cols: list[list[TSeries]], b: int):
    """Hermite form of span(cols) + t^b O^3, computed exactly modulo t^b O^3.

    Every column operation is only needed modulo the sublattice t^b O^3, so
    entries are truncated below t^b and unit inverses are taken mod t^(b-v);
    all arithmetic stays exact.
    """
    zero = TSeries.zero(ctx)
    active = [[_trunc(x, b) for x in c] for c in cols]
    for i in range(3):
        col = [zero] * 3
        col[i] = TSeries.monomial(ctx, b)
        active.append(col)
    piv: dict[int, list[TSeries]] = {}
    d = [0, 0, 0]
    for row in (2, 1, 0):
        best, ci = None, None
        for i, c in enumerate(active):
            x = c[row]
            if x.c and (best is None or x.lo < best):
                best, ci = x.lo, i
        v = best
        col = active.pop(ci)
        u = col[row].shift(-v)
        if len(u.c) != 1 or u.c[0] != 1:
            if len(u.c) == 1:
                ui = TSeries.const(ctx, ctx.inv(u.c[0]))
            else:
                w = u.invert(b - v)
                ui = TSeries(ctx, w.lo, None, w.c)
            col = [_trunc(x * ui, b) for x in col]
        col[row] = TSeries.monomial(ctx, v)
        for r in range(row + 1, 3):
            col[r] = zero
        for c in active:
            a = c[row]
            if a.c:
                f = a.shift(-v)
                c[:] = [_trunc(x - f * y, b) for x, y in zip(c, col)]
            c[row] = zero
        piv[row] = col
        d[row] = v
    return _finish(ctx, d, piv[1][0], piv[2][0], piv[2][1])


def containment_bound(M: Mat3) -> int:
    """Least b with t^b O^3 inside M O^3 (M exact)."""
    return M.det().valuation() - minval(M.adj().e)


def _reduce_upper_exact(ctx: FieldCtx, diag: Sequence[TSeries], h12: TSeries, h13: TSeries,
                        h23: TSeries):
    """Hermite form of an exact upper-triangular matrix with monomial diagonal."""
    d = []
    scal = []
    for x in diag:
        if len(x.c) != 1:
            raise ValueError("diagonal entries must be monomials")
        d.append(x.lo)
        scal.append(ctx.inv(x.c[0]))
    # normalize columns so the diagonal is t^{d_i}
    return _finish(ctx, d, h12.scale(scal[1]), h13.scale(scal[2]), h23.scale(scal[2]))


def _is_upper_monomial(M: Mat3) -> bool:
    e = M.e
    return (M.exact and not e[3].c and not e[6].c and not e[7].c
            and all(len(e[4 * i].c) == 1 for i in range(3)))


def hermite_data(M: Mat3):
    """(d, h12, h13, h23) of the Hermite form of M."""
    ctx = M.ctx
    e = M.e
    if _is_upper_monomial(M):
        return _reduce_upper_exact(ctx, (e[0], e[4], e[8]), e[1], e[2], e[5])
    cols = [[e[j], e[3 + j], e[6 + j]] for j in range(3)]
    if M.exact:
        return _hermite_mod(ctx, cols, containment_bound(M))
    return _hermite_columns(ctx, cols)


def _upper(ctx: FieldCtx, d, h12, h13, h23) -> Mat3:
    z = TSeries.zero(ctx)
    return Mat3(ctx, [TSeries.monomial(ctx, d[0]), h12, h13,
                      z, TSeries.monomial(ctx, d[1]), h23,
                      z, z, TSeries.monomial(ctx, d[2])])


def hermite_form(M: Mat3) -> Mat3:
    return _upper(M.ctx, *hermite_data(M))


def hermite_of_generators(ctx: FieldCtx, cols: list[list[TSeries]], b: int) -> Mat3:
    """Hermite basis of span(cols) + t^b O^3 for exact columns."""
    return _upper(ctx, *_hermite_mod(ctx, cols, b))


def lattice_sum(mats: Sequence[Mat3]) -> Mat3:
    """Hermite basis of the sum of the lattices spanned by exact matrices."""
    ctx = mats[0].ctx
    b = min(containment_bound(M) for M in mats)
    cols = [[M.e[j], M.e[3 + j], M.e[6 + j]] for M in mats for j in range(3)]
    return hermite_of_generators(ctx, cols, b)


def dual(M: Mat3) -> Mat3:
    """A basis of the dual lattice {x : x^T L in O}, i.e. (M^-1)^T (M exact)."""
    d = M.det()
    if len(d.c) != 1:
        raise ValueError("dual() needs a monomial determinant (e.g. a Hermite basis)")
    di = d.invert()
    return Mat3(M.ctx, [x * di for x in M.adj().transpose().e])


def lattice_intersection(mats: Sequence[Mat3]) -> Mat3:
    duals = [dual(hermite_form(M)) for M in mats]
    return hermite_form(dual(lattice_sum(duals)))


def contains(big: Mat3, small: Mat3) -> bool:
    """small O^3 inside big O^3 (exact matrices)."""
    A = big.adj() * small
    return minval(A.e) >= big.det().valuation()


# ---------------------------------------------------------------------------------
# Smith decomposition
# ---------------------------------------------------------------------------------

def _smith_windowed(M: Mat3):
    ctx = M.ctx
    A = [list(r) for r in M.rows()]
    K1 = [list(r) for r in Mat3.identity(ctx).rows()]
    K2 = [list(r) for r in Mat3.identity(ctx).rows()]
    zero = TSeries.zero(ctx)
    vals = []
    for s in range(3):
        sub = [(i, j) for i in range(s, 3) for j in range(s, 3)]
        v = minval(A[i][j] for i, j in sub)
        pi, pj = next((i, j) for i, j in sub if A[i][j].c and A[i][j].lo == v)
        if pi != s:
            A[s], A[pi] = A[pi], A[s]
            for r in K1:
                r[s], r[pi] = r[pi], r[s]
        if pj != s:
            for r in A:
                r[s], r[pj] = r[pj], r[s]
            K2[s], K2[pj] = K2[pj], K2[s]
        u = A[s][s].shift(-v)
        ui = u.invert()
        A[s] = [x * ui for x in A[s]]
        for r in K1:
            r[s] = r[s] * u
        A[s][s] = TSeries.monomial(ctx, v)
        for i in range(s + 1, 3):
            if A[i][s].c:
                c = A[i][s].shift(-v)
                A[i] = [x - c * y for x, y in zip(A[i], A[s])]
                for r in K1:
                    r[s] = r[s] + c * r[i]
            A[i][s] = zero
        for j in range(s + 1, 3):
            if A[s][j].c:
                c = A[s][j].shift(-v)
                for r in A[s + 1:]:
                    r[j] = r[j] - c * r[s]
                K2[s] = [x + c * y for x, y in zip(K2[s], K2[j])]
            A[s][j] = zero
        vals.append(v)
    lam = (vals[2], vals[1], vals[0])
    k1 = _common_window(Mat3(ctx, [K1[i][2 - j] for i in range(3) for j in range(3)]))
    k2 = _common_window(Mat3(ctx, [K2[2 - i][j] for i in range(3) for j in range(3)]))
    return k1, lam, k2


def _common_window(M: Mat3) -> Mat3:
    # entries never touched by elimination are only known to the same window as the rest
    precs = [x.prec for x in M.e if x.prec is not None]
    if not precs:
        return M
    p = min(precs)
    return Mat3(M.ctx, [x.with_prec(p) if x.prec is None else x for x in M.e])


def smith_decompose(M: Mat3, prec: Optional[int] = None):
    """M = k1 * t^lam * k2 with k1, k2 in GL_3(O) and lam dominant.

    Exact input is windowed at increasing precision until every pivot is
    resolved; windowed input is used as is.
    """
    if not M.exact:
        return _smith_windowed(M)
    vdet = M.det().valuation()
    base = vdet - 2 * minval(M.e)
    extra = prec if prec is not None else 4
    while True:
        try:
            return _smith_windowed(M.with_prec(base + extra))
        except ZeroToPrecision:
            if extra >= PREC_CAP:
                raise PrecisionError(f"Smith form unresolved at extra precision {extra}")
            extra *= 2


# ---------------------------------------------------------------------------------
# Vertices
# ---------------------------------------------------------------------------------

def _entry_key(ctx: FieldCtx, x: TSeries) -> tuple:
    return tuple((e, tuple(ctx.digits(a))) for e, a in x.terms())


@dataclass(frozen=True, eq=False)
class Vertex:
    """Homothety class of a lattice, stored by its normalized Hermite form."""

    ctx: FieldCtx
    d: tuple
    h12: TSeries
    h13: TSeries
    h23: TSeries

    @property
    def raw(self) -> tuple:
        return (self.d, self.h12.lo, self.h12.c, self.h13.lo, self.h13.c,
                self.h23.lo, self.h23.c)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Vertex):
            return NotImplemented
        return self.raw == other.raw

    def __hash__(self) -> int:
        return hash(self.raw)

    @property
    def type(self) -> int:
        return sum(self.d) % 3

    @property
    def det_val(self) -> int:
        return sum(self.d)

    def matrix(self) -> Mat3:
        return _upper(self.ctx, self.d, self.h12, self.h13, self.h23)

    def sort_key(self) -> tuple:
        c = self.ctx
        return (self.d, _entry_key(c, self.h12), _entry_key(c, self.h13),
                _entry_key(c, self.h23))

    def to_json(self) -> dict:
        c = self.ctx
        return {"diag": list(self.d),
                "entries": [[[e, list(dg)] for e, dg in _entry_key(c, x)]
                            for x in (self.h12, self.h13, self.h23)]}

    def to_text(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    def is_rational(self) -> bool:
        return sigma_vertex(self) == self

    def __repr__(self) -> str:
        return f"Vertex({self.to_text()})"

    def __lt__(self, other: "Vertex") -> bool:
        return self.sort_key() < other.sort_key()


def _normalized(ctx: FieldCtx, d, h12, h13, h23) -> Vertex:
    c = sum(d) // 3
    if c:
        d = tuple(x - c for x in d)
        h12, h13, h23 = h12.shift(-c), h13.shift(-c), h23.shift(-c)
    return Vertex(ctx, tuple(d), h12, h13, h23)


def lattice_of(M: Mat3) -> Vertex:
    """Hermite form *without* homothety normalization (a lattice, not a class)."""
    return Vertex(M.ctx, *hermite_data(M))


def vertex_of(M: Mat3) -> Vertex:
    return _normalized(M.ctx, *hermite_data(M))


def vertex_from_hermite(ctx: FieldCtx, d, h12, h13, h23) -> Vertex:
    return _normalized(ctx, d, h12, h13, h23)


def vertex_eq(V: Vertex, W: Vertex) -> bool:
    return V == W


def act(g: Mat3, V: Vertex) -> Vertex:
    return vertex_of(g * V.matrix())


def sigma_vertex(V: Vertex, k: int = 1) -> Vertex:
    # sigma preserves the shape of a reduced Hermite form
    return Vertex(V.ctx, V.d, V.h12.sigma(k), V.h13.sigma(k), V.h23.sigma(k))


def standard_vertex(ctx: FieldCtx, i: int = 0) -> Vertex:
    """[Lambda_i]: Lambda_0 = O^3, Lambda_1 = tO+O+O, Lambda_2 = tO+tO+O."""
    d = [(0, 0, 0), (1, 0, 0), (1, 1, 0)][i % 3]
    return vertex_of(Mat3.diag_t(ctx, d))


# ---------------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------------

def _polys(ctx: FieldCtx, lo: int, hi: int, alphabet: Sequence[int]) -> Iterator[TSeries]:
    if hi <= lo:
        yield TSeries.zero(ctx)
        return
    for digs in itertools.product(alphabet, repeat=hi - lo):
        yield TSeries(ctx, lo, None, digs)


def diagonal_patterns(a: int, b: int, eta: int) -> list[tuple[int, int, int]]:
    """Diagonals (d1, d2, d3) with a <= d_i <= b and sum eta, lexicographic."""
    out = []
    for d1 in range(a, b + 1):
        for d2 in range(a, b + 1):
            d3 = eta - d1 - d2
            if a <= d3 <= b:
                out.append((d1, d2, d3))
    return out


def _pattern_lattices(ctx: FieldCtx, a: int, b: int, d, alphabet) -> list[Vertex]:
    """Lattices t^b Lambda <= L <= t^a Lambda with Hermite diagonal d (not normalized)."""
    d1, d2, d3 = d
    out = []
    zero = TSeries.zero(ctx)
    c = d1 + d3 - b
    free_lo = max(a, c)
    for h12 in _polys(ctx, max(a, d1 + d2 - b), d1, alphabet):
        for h23 in _polys(ctx, max(a, d2 + d3 - b), d2, alphabet):
            T = (h12 * h23).shift(-d2) if (h12.c and h23.c) else zero
            ok = True
            det_terms = []
            for e, x in T.terms():
                if e >= c:
                    break
                if e < a or e >= d1:
                    ok = False
                    break
                det_terms.append((e, x))
            if not ok:
                continue
            fixed = TSeries.from_terms(ctx, det_terms)
            for free in _polys(ctx, free_lo, d1, alphabet):
                h13 = fixed + free if free.c else fixed
                out.append(Vertex(ctx, d, h12, h13, h23))
    out.sort(key=Vertex.sort_key)
    return out


def lattices_between(ctx: FieldCtx, a: int, b: int, eta: int,
                     alphabet: Optional[Sequence[int]] = None) -> Iterator[Vertex]:
    """Lattices L with t^b Lambda <= L <= t^a Lambda and v(det L) = eta (un-normalized)."""
    alphabet = list(range(ctx.Q)) if alphabet is None else list(alphabet)
    for d in diagonal_patterns(a, b, eta):
        yield from _pattern_lattices(ctx, a, b, d, alphabet)


def _shard_job(args):
    p, s, m, a, b, patterns, rational = args
    ctx = field(p, s, m)
    alphabet = ctx.subfield() if rational else list(range(ctx.Q))
    out = []
    for d in patterns:
        out.append((d, [v.raw for v in _pattern_lattices(ctx, a, b, d, alphabet)]))
    return out


def _from_raw(ctx: FieldCtx, raw) -> Vertex:
    d, l12, c12, l13, c13, l23, c23 = raw
    return Vertex(ctx, d, TSeries(ctx, l12, None, c12), TSeries(ctx, l13, None, c13),
                  TSeries(ctx, l23, None, c23))


def enumerate_lattices(ctx: FieldCtx, N: int, eta: int, shards: int = 1,
                       rational: bool = False) -> Iterator[Vertex]:
    """Classes with a representative t^N Lambda <= L <= t^-N Lambda, v(det L) = eta.

    Distinct L in the shell with the same eta are never homothetic, so the
    lattices themselves are yielded (normalized to their class when eta is
    already in {0, 1, 2}).  Output order is lexicographic in (d, entries) and
    does not depend on ``shards``.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    patterns = diagonal_patterns(-N, N, eta)
    if shards <= 1:
        alphabet = ctx.subfield() if rational else list(range(ctx.Q))
        for d in patterns:
            for L in _pattern_lattices(ctx, -N, N, d, alphabet):
                yield _normalized(ctx, L.d, L.h12, L.h13, L.h23)
        return
    jobs = [(ctx.p, ctx.s, ctx.m, -N, N, patterns[k::shards], rational) for k in range(shards)]
    results = {}
    with ProcessPoolExecutor(max_workers=shards) as ex:
        for chunk in ex.map(_shard_job, jobs):
            for d, raws in chunk:
                results[d] = raws
    for d in patterns:
        for raw in results[d]:
            L = _from_raw(ctx, raw)
            yield _normalized(ctx, L.d, L.h12, L.h13, L.h23)
