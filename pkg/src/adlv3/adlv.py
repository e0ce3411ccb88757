"""Affine Deligne-Lusztig sets X_lambda(b) for GL_3 and basic b.

A point is a lattice class P = [L] with inv(L, b sigma(L)) = lambda.  This
module houses the three basic elements, the membership test, the
non-emptiness criterion and dimension, the anchoring sets M and M', the
component geometry and its predicted point counts, point enumeration and
the assignment of points to components.
"""

from __future__ import annotations

import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import comb
from typing import Iterator, Optional, Sequence

from .building import Chamber, LinkPos, chamber_relpos, first_chamber, flag_distance
from .cartan import CochClass, inv, inv_prime, is_dominant
from .ff import FieldCtx, field, rank, rref, subspaces
from .latmat import (Mat3, Vertex, contains, enumerate_lattices, hermite_data,
                     lattice_intersection, lattice_sum, lattices_between, standard_vertex,
                     vertex_of, _normalized, _reduce_upper_exact, _upper, _from_raw,
                     containment_bound, minval)
from .series import TSeries


class ADLVError(ValueError):
    pass


# ---------------------------------------------------------------------------------
# basic elements
# ---------------------------------------------------------------------------------

_TAGS = ("one", "b1", "b2")


@dataclass(frozen=True)
class BasicB:
    tag: str

    def __post_init__(self):
        if self.tag not in _TAGS:
            raise ADLVError(f"unknown basic element {self.tag!r}")

    @classmethod
    def parse(cls, s: str) -> "BasicB":
        s = str(s).strip()
        return cls("one" if s in ("1", "one") else s)

    @property
    def eta_b(self) -> int:
        return _TAGS.index(self.tag)

    @property
    def newton_num(self) -> int:
        # nu_b = (i/3, i/3, i/3)
        return self.eta_b

    @property
    def defect(self) -> int:
        return 0 if self.tag == "one" else 2

    @property
    def superbasic(self) -> bool:
        return self.tag != "one"

    def matrix(self, ctx: FieldCtx) -> Mat3:
        t = TSeries.monomial(ctx, 1)
        o, z = TSeries.const(ctx, 1), TSeries.zero(ctx)
        if self.tag == "one":
            return Mat3.identity(ctx)
        if self.tag == "b1":
            return Mat3(ctx, [z, z, t, o, z, z, z, o, z])
        return Mat3(ctx, [z, t, z, z, z, t, o, z, z])

    def shift_a1(self, ctx: FieldCtx) -> Mat3:
        """A sigma-fixed element of J_b with eta = 1."""
        if self.tag == "one":
            return Mat3.diag_t(ctx, (1, 0, 0))
        # b1 itself; for b2 the element t * b2^-1, which is again the b1 matrix
        return BasicB("b1").matrix(ctx)

    def shift_inverse(self, ctx: FieldCtx) -> Mat3:
        if self.tag == "one":
            return Mat3.diag_t(ctx, (-1, 0, 0))
        t1 = TSeries.monomial(ctx, -1)
        o, z = TSeries.const(ctx, 1), TSeries.zero(ctx)
        return Mat3(ctx, [z, o, z, z, z, o, t1, z, z])

    def __str__(self) -> str:
        return "1" if self.tag == "one" else self.tag


ONE, B1, B2 = BasicB("one"), BasicB("b1"), BasicB("b2")


def sigma_conj(x: Mat3, b: BasicB, prec: int = 16) -> Mat3:
    """x^-1 b sigma(x); exact when det(x) is a monomial, else windowed at ``prec``."""
    ctx = x.ctx
    d = x.det()
    if len(d.c) == 1 and d.exact:
        di = d.invert()
    else:
        di = d.invert(prec)
    A = x.adj() * b.matrix(ctx) * x.sigma()
    return Mat3(ctx, [y * di for y in A.e])


# ---------------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------------

def _lam(lam) -> tuple:
    lam = tuple(int(v) for v in lam)
    if len(lam) != 3 or not is_dominant(lam):
        raise ADLVError(f"lambda={lam} is not a dominant triple")
    return lam


def membership_matrix(x: Mat3, lam, b: BasicB) -> bool:
    """inv(x, b sigma(x)) == lambda for an explicit basis x."""
    lam = _lam(lam)
    if sum(lam) != b.eta_b:
        return False
    return inv(x, b.matrix(x.ctx) * x.sigma()).m == lam


def membership(P: Vertex, lam, b: BasicB) -> bool:
    """P lies in X_lambda(b).  Uses the exact Hermite basis of P."""
    lam = _lam(lam)
    if sum(lam) != b.eta_b:
        return False
    H = P.matrix()
    ctx = P.ctx
    A = H.adj() * b.matrix(ctx) * H.sigma()
    D = P.det_val
    v1 = minval(A.e) - D
    if v1 != lam[2]:
        return False
    v2 = minval(A.minors2()) - 2 * D
    return v2 - v1 == lam[1]


def central_shift_check(P: Vertex, lam, b: BasicB, m: int) -> bool:
    """membership(P, lam, b) == membership(P, lam + (m,m,m), t^m b)."""
    lam = _lam(lam)
    left = membership(P, lam, b)
    H = P.matrix()
    ctx = P.ctx
    tb = b.matrix(ctx).scale_t(m)
    right = inv(H, tb * H.sigma()).m == tuple(v + m for v in lam)
    return left == right


# ---------------------------------------------------------------------------------
# non-emptiness and dimension
# ---------------------------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    value: bool
    reason: str

    def __bool__(self) -> bool:
        return self.value


def nonempty(lam, b: BasicB) -> Verdict:
    lam = _lam(lam)
    i = b.newton_num
    m1, m2, m3 = lam
    if sum(lam) != b.eta_b:
        return Verdict(False, f"v(det b) = {b.eta_b} differs from m1+m2+m3 = {sum(lam)}")
    # m1 >= i/3 and m1 + m2 >= 2i/3, cleared of denominators
    if 3 * m1 < i:
        return Verdict(False, f"m1 = {m1} < {i}/3")
    if 3 * (m1 + m2) < 2 * i:
        return Verdict(False, f"m1 + m2 = {m1 + m2} < {2 * i}/3")
    return Verdict(True, f"m1 >= {i}/3, m1+m2 >= {2 * i}/3, sum = {i}")


def dimension(lam, b: BasicB) -> int:
    lam = _lam(lam)
    if not nonempty(lam, b):
        raise ADLVError(f"X_{lam}({b}) is empty")
    d = lam[0] - lam[2] if b.tag == "one" else lam[0] - lam[2] - 1
    # <rho, lambda - nu_b> - def(b)/2 with rho = (1, 0, -1) and central nu_b
    assert 2 * d == 2 * (lam[0] - lam[2]) - b.defect
    return d


# ---------------------------------------------------------------------------------
# the sets M and M'
# ---------------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class MEntry:
    cls: CochClass
    m_I: int
    m_II: int
    m_III: int
    anchor_type: int

    @classmethod
    def of(cls, mu) -> "MEntry":
        c = mu if isinstance(mu, CochClass) else CochClass.of(mu)
        a, cc = c[0] - c[1], c[1] - c[2]
        return cls(c, min(a, cc), min(a + 1, cc), min(a, cc + 1), (-sum(c.e)) % 3)

    @property
    def a(self) -> int:
        return self.cls[0] - self.cls[1]

    @property
    def c(self) -> int:
        return self.cls[1] - self.cls[2]

    @property
    def length(self) -> int:
        return self.cls.length

    def consistent(self) -> bool:
        return self == MEntry.of(self.cls)

    def __str__(self) -> str:
        return str(self.cls)


def _classes_of_length(L: int) -> list[MEntry]:
    """All classes [e1,e2,e3] with e1 - e3 = L, ordered by e1 - e2."""
    if L < 0:
        return []
    return [MEntry.of((L, L - a, 0)) for a in range(L + 1)]


def compute_M(lam, b: BasicB) -> list[MEntry]:
    lam = _lam(lam)
    if not nonempty(lam, b):
        raise ADLVError(f"X_{lam}({b}) is empty")
    m1, m2, m3 = lam
    if b.tag == "one":
        if m2 == 0:
            return _classes_of_length(m1)
        if m2 < 0:
            return [e for e in _classes_of_length(m1) if e.m_I >= -m2]
        return [e for e in _classes_of_length(-m3) if e.m_I >= m2]
    if b.tag == "b1":
        if m2 == 0:
            return _classes_of_length(m1 - 1)
        if m2 < 0:
            return [e for e in _classes_of_length(m1 - 1) if e.m_I >= -m2]
        return [e for e in _classes_of_length(-m3) if max(e.m_II, e.m_III) >= m2]
    if m2 == 1:
        return _classes_of_length(m1 - 1)
    if m2 < 1:
        return [e for e in _classes_of_length(m1 - 1) if max(e.m_II, e.m_III) >= 1 - m2]
    return [e for e in _classes_of_length(-m3) if e.m_I >= m2 - 1]


def compute_M_prime(lam, b: BasicB) -> list[MEntry]:
    lam = _lam(lam)
    M = compute_M(lam, b)
    m2 = lam[1]
    if b.tag == "b1" and m2 > 0:
        return [e for e in M if e.m_II >= m2]
    if b.tag == "b2" and m2 < 1:
        return [e for e in M if e.m_III >= 1 - m2]
    return M


def component_branch(lam, b: BasicB) -> Optional[str]:
    """The branch recorded for components in the doubly-described superbasic cases."""
    m2 = _lam(lam)[1]
    if b.tag == "b1" and m2 > 0:
        return "II"
    if b.tag == "b2" and m2 < 1:
        return "III"
    return None


def anchor_sets(lam, b: BasicB) -> list[MEntry]:
    """The classes indexing components: M for b = 1, M' for superbasic b."""
    return compute_M(lam, b) if b.tag == "one" else compute_M_prime(lam, b)


def enumeration_bound(lam, b: BasicB) -> int:
    """Heuristic shell radius N = max{e1 - e3 : [mu] in M} + 1."""
    return max(e.length for e in compute_M(lam, b)) + 1


# ---------------------------------------------------------------------------------
# component geometry and point counts
# ---------------------------------------------------------------------------------

_BASES = ("pt", "Omega", "P2-P2(k)", "X_I")


@dataclass(frozen=True)
class Geometry:
    """base x G_m^gm x A^affine (an affine bundle of that rank for the last two bases)."""

    base: str
    gm: int = 0
    affine: int = 0

    def __post_init__(self):
        if self.base not in _BASES or self.gm not in (0, 1) or self.affine < 0:
            raise ADLVError(f"unsupported geometry ({self.base!r}, gm={self.gm}, affine={self.affine})")

    @property
    def dim(self) -> int:
        return {"pt": 0, "Omega": 2, "P2-P2(k)": 2, "X_I": 3}[self.base] + self.gm + self.affine

    def __str__(self) -> str:
        parts = []
        if self.base != "pt":
            parts.append({"Omega": "Ω", "P2-P2(k)": "(ℙ²∖ℙ²(k))", "X_I": "X_I"}[self.base])
        if self.gm:
            parts.append("G_m")
        if self.affine:
            parts.append(f"𝔸^{self.affine}")
        return "×".join(parts) if parts else "point"


def component_geometry(lam, b: BasicB, e: MEntry) -> Geometry:
    lam = _lam(lam)
    m1, m2, m3 = lam
    d = m1 - m3
    if b.tag == "one":
        if m2 == 0:
            if e.a == 0 and e.c == 0:
                return Geometry("pt")
            if e.a == 0 or e.c == 0:
                return Geometry("P2-P2(k)", 0, d - 2)
            return Geometry("X_I", 0, d - 3)
        if e.m_I == abs(m2):
            return Geometry("Omega", 0, d - 2)
        return Geometry("Omega", 1, d - 3)
    if (b.tag == "b1" and m2 == 0) or (b.tag == "b2" and m2 == 1):
        if e.a == 0 and e.c == 0:
            return Geometry("pt")
        sharp = e.a == 0 or e.c == 0
    elif b.tag == "b1":
        sharp = e.m_I == -m2 if m2 < 0 else e.m_II == m2
    else:
        sharp = e.m_III == 1 - m2 if m2 < 1 else e.m_I == m2 - 1
    return Geometry("pt", 0, d - 1) if sharp else Geometry("pt", 1, d - 2)


def omega_count(q: int, m: int, p: Optional[int] = None) -> int:
    """|Omega(F_{q^m})| by inclusion-exclusion over the F_q-rational lines of P^2.

    Any two or more distinct rational lines meet in at most one point, which is
    rational; so a subset S of lines contributes q^m + 1 if |S| = 1 and 1 or 0
    otherwise, according to whether the lines are concurrent.
    """
    Q = q ** m
    total = Q * Q + Q + 1
    nlines = q * q + q + 1
    if nlines <= 13:
        pp, s = _prime_power(q)
        F = field(pp, s, 1)
        # rational points, and the rational lines in dual coordinates
        points = lines = [tuple(r[0]) for r in subspaces(F, 3, 1)]
        incid = [frozenset(i for i, L in enumerate(lines)
                           if _dot(F, L, P) == 0) for P in points]
        union = 0
        for k in range(1, nlines + 1):
            sign = 1 if k % 2 else -1
            for S in itertools.combinations(range(nlines), k):
                if k == 1:
                    size = Q + 1
                else:
                    Sset = set(S)
                    size = sum(1 for inc in incid if Sset <= inc)
                union += sign * size
        return total - union
    # grouped inclusion-exclusion: each rational point lies on q+1 rational lines
    union = nlines * (Q + 1)
    # subsets of size >= 2 all through one point P contribute sum_{k>=2} (-1)^(k+1) C(q+1, k)
    corr = sum((-1) ** (k + 1) * comb(q + 1, k) for k in range(2, q + 2))
    union += nlines * corr
    return total - union


def _prime_power(q: int) -> tuple[int, int]:
    for p in range(2, q + 1):
        if q % p == 0:
            s, r = 0, q
            while r % p == 0:
                r //= p
                s += 1
            if r != 1:
                raise ADLVError(f"q={q} is not a prime power")
            return p, s
    raise ADLVError(f"q={q} is not a prime power")


def _dot(F: FieldCtx, u, v) -> int:
    acc = 0
    for a, b in zip(u, v):
        acc = F.add(acc, F.mul(a, b))
    return acc


def p2_minus_rational_count(q: int, m: int) -> int:
    Q = q ** m
    return Q * Q + Q - q * q - q


def xi_count(q: int, m: int) -> int:
    """Flags (l, pi) over F_{q^m} in general position with (sigma l, sigma pi): brute force."""
    p, s = _prime_power(q)
    F = field(p, s, m)
    if F.Q > 64:
        raise ADLVError("X_I brute force is limited to q^m <= 64")
    count = 0
    for line in subspaces(F, 3, 1):
        for plane in subspaces(F, 3, 2):
            if rank_ok(F, line, plane):
                sl = [[F.frob(x) for x in v] for v in line]
                sp = [[F.frob(x) for x in v] for v in plane]
                if flag_distance(F, (line, plane), (rref(F, sl), rref(F, sp))) == 3:
                    count += 1
    return count


def rank_ok(F: FieldCtx, line, plane) -> bool:
    return rank(F, list(line) + list(plane)) == 2


def predicted_count(geom: Geometry, q: int, m: int) -> int:
    Q = q ** m
    base = {"pt": lambda: 1, "Omega": lambda: omega_count(q, m),
            "P2-P2(k)": lambda: p2_minus_rational_count(q, m),
            "X_I": lambda: xi_count(q, m)}[geom.base]()
    return base * (Q - 1) ** geom.gm * Q ** geom.affine


# ---------------------------------------------------------------------------------
# fibration classifier
# ---------------------------------------------------------------------------------

_FAMILIES = {
    "one": [("(2r,-r,-r)", lambda r: (2 * r, -r, -r)),
            ("(r,r,-2r)", lambda r: (r, r, -2 * r)),
            ("(2r+3,-r-1,-r-2)", lambda r: (2 * r + 3, -r - 1, -r - 2)),
            ("(r+2,r+1,-2r-3)", lambda r: (r + 2, r + 1, -2 * r - 3))],
    "b1": [("(2r+1,-r,-r)", lambda r: (2 * r + 1, -r, -r)),
           ("(r+1,r+1,-2r-1)", lambda r: (r + 1, r + 1, -2 * r - 1)),
           ("(r+1,r,-2r)", lambda r: (r + 1, r, -2 * r)),
           ("(2r+2,-r,-r-1)", lambda r: (2 * r + 2, -r, -r - 1))],
    "b2": [("(r+1,r+1,-2r)", lambda r: (r + 1, r + 1, -2 * r)),
           ("(2r+2,-r,-r)", lambda r: (2 * r + 2, -r, -r)),
           ("(2r+1,-r+1,-r)", lambda r: (2 * r + 1, -r + 1, -r)),
           ("(r+2,r+1,-2r-1)", lambda r: (r + 2, r + 1, -2 * r - 1))],
}


@dataclass(frozen=True)
class FibrationCase:
    value: bool
    family: Optional[str] = None
    r: Optional[int] = None

    def __bool__(self) -> bool:
        return self.value


def fibration_case(lam, b: BasicB) -> FibrationCase:
    lam = _lam(lam)
    # every family is linear in r with a coefficient of +-1, 2 or 3 in some slot;
    # solve from the third coordinate and check
    for name, f in _FAMILIES[b.tag]:
        c0, c1 = f(0)[2], f(1)[2] - f(0)[2]
        if (lam[2] - c0) % c1 == 0:
            r = (lam[2] - c0) // c1
            if r >= 0 and f(r) == lam:
                return FibrationCase(True, name, r)
    return FibrationCase(False)


# ---------------------------------------------------------------------------------
# classification report
# ---------------------------------------------------------------------------------

def classify(lam, b: BasicB, ms: Sequence[int] = (1, 2, 3), q: int = 2) -> dict:
    lam = _lam(lam)
    ne = nonempty(lam, b)
    rep = {"lambda": list(lam), "b": str(b), "nonempty": ne.value, "reason": ne.reason}
    if not ne:
        rep.update({"dimension": None, "M": [], "M_prime": [], "components": [],
                    "fibration_case": None})
        return rep
    M = compute_M(lam, b)
    Mp = compute_M_prime(lam, b)
    comps = []
    for e in anchor_sets(lam, b):
        g = component_geometry(lam, b, e)
        counts = {}
        for m in ms:
            try:
                counts[str(m)] = predicted_count(g, q, m)
            except ADLVError:
                counts[str(m)] = None
        comps.append({"anchor_type": e.anchor_type, "anchor": f"Λ{e.anchor_type}",
                      "mu": str(e), "branch": component_branch(lam, b),
                      "geometry": str(g), "dim": g.dim, "predicted_counts": counts})
    fc = fibration_case(lam, b)
    rep.update({"dimension": dimension(lam, b), "M": [str(e) for e in M],
                "M_prime": [str(e) for e in Mp], "components": comps,
                "fibration_case": {"value": fc.value, "family": fc.family, "r": fc.r}})
    return rep


# ---------------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------------

def _upper_subspace_matrix(ctx: FieldCtx, S) -> Mat3:
    """Upper triangular N with N O^3 = lifts of S + t O^3 (S in echelon form with
    pivot = last nonzero coordinate)."""
    z = TSeries.zero(ctx)
    cols = []
    piv = {}
    for v in S:
        p = max(i for i in range(3) if v[i])
        piv[p] = v
    for j in range(3):
        if j in piv:
            cols.append([TSeries.const(ctx, x) if x else z for x in piv[j]])
        else:
            cols.append([TSeries.monomial(ctx, 1) if i == j else z for i in range(3)])
    return Mat3(ctx, [cols[j][i] for i in range(3) for j in range(3)])


def _reversed_subspaces(ctx: FieldCtx) -> list:
    """All subspaces of F^3 in echelon form w.r.t. the reversed coordinate order."""
    out = []
    for k in range(4):
        for rows in subspaces(ctx, 3, k):
            out.append([list(reversed(r)) for r in rows])
    return out


class _Pruner:
    def __init__(self, ctx: FieldCtx, lam, b: BasicB, N: int, eta: int):
        self.ctx, self.lam, self.b, self.N, self.eta = ctx, lam, b, N, eta
        self.B = b.matrix(ctx)
        self.beta3 = 0  # t^0 O^3 contains b O^3 for all three b
        self.beta1 = 0 if b.tag == "one" else 1  # t^beta1 O^3 inside b O^3
        self.subs = _reversed_subspaces(ctx)
        self.Nmats = [(S, _upper_subspace_matrix(ctx, S)) for S in self.subs]

    def level(self, path, j: int) -> Mat3:
        k0 = -self.N
        if j <= k0:
            return Mat3.diag_t(self.ctx, (j, j, j))
        return path[j - k0]

    def ok(self, path, k: int) -> bool:
        lam = self.lam
        H = path[-1]
        bs = self.B * H.sigma()
        j = min(k, k + self.beta3 - lam[2])
        if not contains(self.level(path, j).scale_t(lam[2]), bs):
            return False
        j = k + self.beta1 - lam[0]
        if j <= k and not contains(bs, self.level(path, j).scale_t(lam[0])):
            return False
        return True


def _hermite_upper(M: Mat3) -> Mat3:
    e = M.e
    return _upper(M.ctx, *_reduce_upper_exact(M.ctx, (e[0], e[4], e[8]), e[1], e[2], e[5]))


def _pruned_points(ctx: FieldCtx, lam, b: BasicB, N: int, eta: int,
                   shard: int = 0, nshards: int = 1) -> list[Vertex]:
    pr = _Pruner(ctx, lam, b, N, eta)
    out: list[Vertex] = []
    root = Mat3.diag_t(ctx, (-N, -N, -N))
    path = [root]

    def rec(k: int) -> None:
        H = path[-1]
        dv = sum(hermite_diag(H))
        if dv > eta or eta - dv > 3 * (N - k):
            return
        if not pr.ok(path, k):
            return
        if k == N:
            if dv == eta:
                V = _normalized(ctx, *hermite_data(H))
                if membership(V, lam, b):
                    out.append(V)
            return
        # image of t^k O^3 in L_k / t L_k
        d = H.det()
        di = d.invert()
        A = [x * di for x in H.adj().scale_t(k).e]
        T = [[A[3 * i + j].coeff(0) if A[3 * i + j].c else 0 for i in range(3)]
             for j in range(3)]
        rT = len(rref(ctx, [v for v in T if any(v)])) if any(any(v) for v in T) else 0
        for idx, (S, NS) in enumerate(pr.Nmats):
            if k == -N and idx % nshards != shard:
                continue
            if len(S) + rT < 3:
                continue
            if rT < 3 and len(rref(ctx, [v for v in T if any(v)] + S)) < 3:
                continue
            path.append(_hermite_upper(H * NS))
            rec(k + 1)
            path.pop()

    rec(-N)
    out.sort(key=Vertex.sort_key)
    return out


def _pruned_job(args):
    p, s, m, lam, tag, N, eta, shard, nshards = args
    ctx = field(p, s, m)
    return [P.raw for P in _pruned_points(ctx, lam, BasicB(tag), N, eta, shard, nshards)]


def hermite_diag(H: Mat3) -> tuple:
    return (H.e[0].lo, H.e[4].lo, H.e[8].lo)


def enumerate_points(lam, b: BasicB, ctx: FieldCtx, N: int, eta_level: int = 0,
                     method: str = "pruned", shards: int = 1) -> Iterator[Vertex]:
    """Points P = [L] of X_lambda(b) with t^N O^3 <= L <= t^-N O^3, v(det L) = eta_level.

    ``method="shell"`` filters the full shell enumeration; ``"pruned"`` walks the
    chain L + t^k O^3 (k = -N..N) and cuts branches violating the containments
    t^lambda1 L <= b sigma(L) <= t^lambda3 L in their truncated form.
    """
    lam = _lam(lam)
    if sum(lam) != b.eta_b:
        return iter(())
    if method == "shell":
        return (P for P in enumerate_lattices(ctx, N, eta_level, shards=shards)
                if membership(P, lam, b))
    if method == "pruned":
        if shards <= 1:
            return iter(_pruned_points(ctx, lam, b, N, eta_level))
        jobs = [(ctx.p, ctx.s, ctx.m, lam, b.tag, N, eta_level, i, shards)
                for i in range(shards)]
        with ProcessPoolExecutor(max_workers=shards) as ex:
            raws = [r for chunk in ex.map(_pruned_job, jobs) for r in chunk]
        pts = [_from_raw(ctx, r) for r in raws]
        pts.sort(key=Vertex.sort_key)
        return iter(pts)
    raise ADLVError(f"unknown enumeration method {method!r}")


def cell_points(lam, b: BasicB, Q: Vertex, mu: MEntry) -> list[Vertex]:
    """Points P of X_lambda(b) with inv'(Q, P) = [mu] (Q a standard vertex)."""
    ctx = Q.ctx
    e = mu.cls.e
    g = Q.matrix()
    out = []
    seen = set()
    for L in lattices_between(ctx, e[2], e[0], sum(e)):
        if inv(Mat3.identity(ctx), L.matrix()).m != e:
            continue
        P = vertex_of(g * L.matrix())
        if P in seen:
            continue
        seen.add(P)
        if membership(P, lam, b):
            out.append(P)
    out.sort(key=Vertex.sort_key)
    return out


# ---------------------------------------------------------------------------------
# component assignment
# ---------------------------------------------------------------------------------

@dataclass(frozen=True)
class ComponentKey:
    b: str
    eta_level: int
    anchor: Vertex
    mu: CochClass
    branch: Optional[str] = None

    def to_json(self) -> dict:
        return {"b": self.b, "eta_level": self.eta_level, "anchor": self.anchor.to_json(),
                "mu": str(self.mu), "branch": self.branch}


@dataclass(frozen=True)
class StratumLabel:
    position: str
    j: Optional[int] = None

    def __str__(self) -> str:
        return self.position if self.j is None else f"{self.position},j={self.j}"


def eta_level(P: Vertex, b: BasicB) -> int:
    return P.det_val


def to_level_zero(P: Vertex, b: BasicB) -> tuple[int, Vertex]:
    """(r, a^-r P) with a = shift_a1 and r the eta-level of P."""
    r = eta_level(P, b)
    ctx = P.ctx
    X = P.matrix()
    Ai = b.shift_inverse(ctx)
    for _ in range(r):
        X = Ai * X
    V = vertex_of(X)
    # vertex_of normalizes the determinant; level-zero lattices have det 0 already
    return r, V


def _rational_anchor_candidates(P: Vertex, mu: MEntry) -> list[Vertex]:
    """F_q-rational vertices Q with inv'(Q, P) = [mu] (P at level 0)."""
    ctx = P.ctx
    H = P.matrix()
    conj = [H]
    X = H
    for _ in range(ctx.m - 1):
        X = X.sigma()
        conj.append(X)
    S = lattice_sum(conj)
    Icap = lattice_intersection(conj)
    e = mu.cls.e
    # t^e1 M <= L <= t^e3 M  <=>  t^-e3 L <= M <= t^-e1 L
    big = Icap.scale_t(-e[0])
    small = S.scale_t(-e[2])
    if not contains(big, small):
        return []
    # M in coordinates of big: Lambda >= g^-1 M >= g^-1 small
    g = big
    d = g.det()
    gi = Mat3(ctx, [y * d.invert() for y in g.adj().e])
    sm = gi * small
    kk = containment_bound(sm)
    det_target = P.det_val - sum(e) - big.det().valuation()
    out = []
    for Mv in lattices_between(ctx, 0, kk, det_target, alphabet=ctx.subfield()):
        Mm = Mv.matrix()
        if not contains(Mm, sm):
            continue
        Q = vertex_of(g * Mm)
        if inv_prime(Q, P) == mu.cls:
            out.append(Q)
    return out


def _label_b1_one(lam, mu: MEntry) -> StratumLabel:
    m2 = lam[1]
    if m2 == 0:
        return StratumLabel("I")
    if m2 < 0:
        return StratumLabel("II", -m2)
    return StratumLabel("III", m2)


def superbasic_label_value(b: BasicB, mu: MEntry, position: str, j: Optional[int]) -> CochClass:
    """inv'(P, b sigma P) for a point in the given superbasic stratum."""
    e1, e2, e3 = mu.cls.e
    L = e1 - e3
    if b.tag == "b1":
        if position in ("C_M-II", "C_M-III"):
            return CochClass.of((L + 1 - j, j, -L))
        if position == "D-I":
            return CochClass.of((L + 1, 0, -L))
        if position == "D-II":
            return CochClass.of((L + 1, -j, -L + j))
    else:
        if position in ("C_M-II", "C_M-III"):
            return CochClass.of((L + 1, 1 - j, -L + j))
        if position == "D'-I":
            return CochClass.of((L + 1, 1, -L))
        if position == "D'-III":
            return CochClass.of((L + 1 - j, 1 + j, -L))
    raise ADLVError(f"position {position} does not apply to {b}")


def _superbasic_label_options(b: BasicB, mu: MEntry):
    """(position, j) pairs allowed for mu, with the bend bounds of each stratum."""
    opts = []

    def rng(mb):
        return range(min(1, mb), mb + 1)

    for j in rng(mu.m_II):
        opts.append(("C_M-II", j))
    for j in rng(mu.m_III):
        opts.append(("C_M-III", j))
    if b.tag == "b1":
        opts.append(("D-I", None))
        for j in rng(mu.m_I):
            opts.append(("D-II", j))
    else:
        opts.append(("D'-I", None))
        for j in rng(mu.m_I):
            opts.append(("D'-III", j))
    return opts


def superbasic_label(lam, b: BasicB, mu: MEntry, pos: Optional[LinkPos] = None,
                     branch: Optional[str] = None) -> StratumLabel:
    target = CochClass.of(lam)
    opts = [(p, j) for p, j in _superbasic_label_options(b, mu)
            if superbasic_label_value(b, mu, p, j) == target]
    if pos is not None and not pos.degenerate:
        want = {"I": ("D-I", "D-II", "D'-I", "D'-III"), "II": ("C_M-II",),
                "III": ("C_M-III",)}[pos.tag]
        narrowed = [o for o in opts if o[0] in want]
        opts = narrowed or opts
    if branch is not None:
        narrowed = [o for o in opts if o[0] == "C_M-" + branch]
        opts = narrowed or opts
    if not opts:
        raise ADLVError(f"no stratum of {b} at {mu} realizes {target}")
    order = ["C_M-II", "C_M-III", "D-I", "D-II", "D'-I", "D'-III"]
    opts.sort(key=lambda o: (order.index(o[0]), o[1] or 0))
    return StratumLabel(*opts[0])


def _cm_position(Q: Vertex, P: Vertex) -> Optional[LinkPos]:
    """Relative position of C_M and the first chamber of cl(Q, P) at Q (None for walls)."""
    ctx = Q.ctx
    C0 = first_chamber(Q, P)
    if not isinstance(C0, Chamber):
        return None
    CM = Chamber(*(standard_vertex(ctx, i) for i in range(3)))
    return chamber_relpos(CM, C0, Q)


def assign_component(P: Vertex, lam, b: BasicB) -> list[tuple[ComponentKey, StratumLabel]]:
    lam = _lam(lam)
    if not membership(P, lam, b):
        raise ADLVError("point is not in X_lambda(b)")
    ctx = P.ctx
    r, P0 = to_level_zero(P, b)
    M = compute_M(lam, b)
    out = []
    if b.tag == "one":
        for e in M:
            for Q in _rational_anchor_candidates(P0, e):
                out.append((ComponentKey(str(b), r, Q, e.cls, None), _label_b1_one(lam, e)))
        out.sort(key=lambda kl: (kl[0].mu, kl[0].anchor.sort_key()))
        return out
    Mset = {e.cls: e for e in M}
    Mp = {e.cls for e in compute_M_prime(lam, b)}
    branch = component_branch(lam, b)
    cands = []
    for i in range(3):
        Q = standard_vertex(ctx, i)
        mu = inv_prime(Q, P0)
        if mu in Mset:
            cands.append((Q, Mset[mu]))
    withpos = []
    for Q, e in cands:
        pos = _cm_position(Q, P0) if e.length > 0 else None
        withpos.append((Q, e, pos))
    if branch is not None:
        # the same stratum is described from two anchors; keep the preferred branch
        withpos = [c for c in withpos if c[1].cls in Mp]
        if len(withpos) > 1:
            good = [c for c in withpos if c[2] is not None and c[2].tag == branch]
            if good:
                withpos = good
            else:
                withpos = [c for c in withpos if c[2] is None or c[2].tag == branch]
    for Q, e, pos in withpos:
        label = superbasic_label(lam, b, e, pos, branch)
        out.append((ComponentKey(str(b), r, Q, e.cls, branch), label))
    return out


# ---------------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------------

def random_k(ctx: FieldCtx, rng: random.Random, deg: int) -> Mat3:
    """A random element of GL_3(F[t]) with invertible constant term."""
    while True:
        e = [TSeries(ctx, 0, None, [rng.randrange(ctx.Q) for _ in range(deg + 1)])
             for _ in range(9)]
        M = Mat3(ctx, e)
        d = M.det()
        if d.c and d.lo == 0:
            return M


def random_in_cell(Q: Vertex, e, rng: random.Random) -> Vertex:
    """A random vertex P with inv'(Q, P) = [e] (sampled as g_Q k t^e)."""
    ctx = Q.ctx
    e = tuple(e)
    k = random_k(ctx, rng, max(e[0] - e[2], 1))
    return vertex_of(Q.matrix() * k * Mat3.diag_t(ctx, e))


def find_point(lam, b: BasicB, ctx: FieldCtx, rng: random.Random,
               samples: int = 300) -> Optional[Vertex]:
    """Search the anchored cells for a point of X_lambda(b) (None if sampling fails)."""
    lam = _lam(lam)
    if not nonempty(lam, b):
        return None
    entries = anchor_sets(lam, b)
    # open strata (no G_m factor) first
    entries = sorted(entries, key=lambda e: component_geometry(lam, b, e).gm)
    for e in entries:
        Q = standard_vertex(ctx, e.anchor_type)
        rep = e.cls.e
        for _ in range(samples):
            P = random_in_cell(Q, rep, rng)
            if membership(P, lam, b):
                return P
    return None


def in_shell(P: Vertex, b: BasicB, N: int) -> bool:
    """The level-zero translate of P has a representative in t^N O^3 <= L <= t^-N O^3."""
    _, P0 = to_level_zero(P, b)
    ctx = P.ctx
    H = P0.matrix()
    return (contains(Mat3.diag_t(ctx, (-N, -N, -N)), H)
            and contains(H, Mat3.diag_t(ctx, (N, N, N))))
