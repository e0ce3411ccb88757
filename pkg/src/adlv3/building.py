"""Chambers of the building of SL_3, link positions I/II/III at a vertex,
projections along cl(Q, P), first chambers, and the composition predictor.

At a vertex P with lattice L_0, the chambers through P correspond to full
flags (line < plane) in L_0/tL_0: the neighbour of type type(P)+1 is the
plane, the neighbour of type type(P)+2 is the line.  Two chambers at P are
compared through their flags.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .cartan import CochClass, inv, inv_prime, is_dominant
from .ff import FieldCtx, rank, rref
from .latmat import (PREC_CAP, Mat3, PrecisionError, Vertex, contains, hermite_data,
                     hermite_of_generators, containment_bound, smith_decompose, vertex_of,
                     _normalized)
from .series import TSeries, ZeroToPrecision

E100 = CochClass((1, 0, 0))
E110 = CochClass((1, 1, 0))


class BuildingError(ValueError):
    pass


def _rep(V: Vertex, det: int) -> Mat3:
    """Basis of the representative lattice of V with v(det) = det."""
    k = det - V.det_val
    if k % 3:
        raise BuildingError("determinant does not match the vertex type")
    return V.matrix().scale_t(k // 3)


def _residue_coords(L0: Mat3, L: Mat3) -> list[list[int]]:
    """Columns of L reduced into L0/tL0 (requires tL0 <= L <= L0)."""
    d = L0.det()
    A = L0.adj() * L  # = det(L0) * L0^-1 L
    v = d.valuation()
    c0 = d.c[0]
    ctx = L0.ctx
    cinv = ctx.inv(c0)
    cols = []
    for j in range(3):
        col = []
        for i in range(3):
            x = A.e[3 * i + j]
            col.append(ctx.mul(cinv, x.coeff(v)) if x.c else 0)
        cols.append(col)
    return cols


def is_chamber(V1: Vertex, V2: Vertex, V3: Vertex) -> bool:
    try:
        Chamber(V1, V2, V3)
        return True
    except BuildingError:
        return False


@dataclass(frozen=True, eq=False)
class Chamber:
    v0: Vertex
    v1: Vertex
    v2: Vertex

    def __post_init__(self):
        vs = (self.v0, self.v1, self.v2)
        if len({v.type for v in vs}) != 3:
            raise BuildingError("chamber vertices must have three distinct types")
        L0 = self.chain(self.v0)
        t = L0[0].scale_t(1)
        ok = (contains(L0[0], L0[1]) and contains(L0[1], L0[2]) and contains(L0[2], t))
        if not ok:
            raise BuildingError("vertices do not form a lattice chain")

    @property
    def vertices(self) -> tuple:
        return (self.v0, self.v1, self.v2)

    def __eq__(self, other) -> bool:
        return isinstance(other, Chamber) and set(self.vertices) == set(other.vertices)

    def __hash__(self) -> int:
        return hash(frozenset(self.vertices))

    def other(self, P: Vertex) -> list[Vertex]:
        if P not in self.vertices:
            raise BuildingError("vertex not in chamber")
        return [v for v in self.vertices if v != P]

    def chain(self, P: Vertex) -> tuple[Mat3, Mat3, Mat3]:
        """Bases of L_0 > L_1 > L_2 > tL_0 with L_0 representing P."""
        if P not in self.vertices:
            raise BuildingError("vertex not in chamber")
        by_type = {v.type: v for v in self.vertices}
        d0 = P.det_val
        L0 = P.matrix()
        L1 = _rep(by_type[(P.type + 1) % 3], d0 + 1)
        L2 = _rep(by_type[(P.type + 2) % 3], d0 + 2)
        return L0, L1, L2

    def flag_at(self, P: Vertex):
        """(line, plane) in P's residue space, as RREF bases over F_{q^m}."""
        L0, L1, L2 = self.chain(P)
        ctx = P.ctx
        plane = rref(ctx, _residue_coords(L0, L1))
        line = rref(ctx, _residue_coords(L0, L2))
        return line, plane

    def line_vertex(self, P: Vertex) -> Vertex:
        """The vertex P2 with inv'(P2, P) = [1,0,0] (lattice L_2 of the chain)."""
        return next(v for v in self.vertices if v.type == (P.type + 2) % 3)

    def plane_vertex(self, P: Vertex) -> Vertex:
        return next(v for v in self.vertices if v.type == (P.type + 1) % 3)

    def __repr__(self) -> str:
        return f"Chamber({self.v0!r}, {self.v1!r}, {self.v2!r})"


def _contained(ctx: FieldCtx, small, big) -> bool:
    return rank(ctx, list(small) + list(big)) == len(big)


def _same(ctx: FieldCtx, a, b) -> bool:
    return len(a) == len(b) and _contained(ctx, a, b)


@dataclass(frozen=True)
class LinkPos:
    tag: str  # "I", "II", "III", "DEG0", "DEG1"

    @property
    def degenerate(self) -> bool:
        return self.tag.startswith("DEG")

    def __str__(self) -> str:
        return self.tag


I, II, III = LinkPos("I"), LinkPos("II"), LinkPos("III")
DEG0, DEG1 = LinkPos("DEG0"), LinkPos("DEG1")


def flag_distance(ctx: FieldCtx, f1, f2) -> int:
    """Gallery distance in the flag complex of F^3 (length of the Bruhat element)."""
    (l1, p1), (l2, p2) = f1, f2
    same_l, same_p = _same(ctx, l1, l2), _same(ctx, p1, p2)
    if same_l and same_p:
        return 0
    if same_l or same_p:
        return 1
    if _contained(ctx, l1, p2) or _contained(ctx, l2, p1):
        return 2
    return 3


def _plane_lattice(P: Vertex, vecs) -> Vertex:
    """Vertex of the lattice tL_0 + span(lifts of vecs) for L_0 = P's representative."""
    ctx = P.ctx
    L0 = P.matrix()
    cols = []
    for v in vecs:
        col = []
        for i in range(3):
            s = TSeries.zero(ctx)
            for k in range(3):
                if v[k]:
                    s = s + L0.e[3 * i + k].scale(v[k])
            col.append(s)
        cols.append(col)
    for k in range(3):
        cols.append([L0.e[3 * i + k].shift(1) for i in range(3)])
    b = containment_bound(L0) + 1
    H = hermite_of_generators(ctx, cols, b)
    return vertex_of(H)


def chamber_from_flag(P: Vertex, line, plane) -> Chamber:
    return Chamber(P, _plane_lattice(P, plane), _plane_lattice(P, line))


def chamber_relpos(C1: Chamber, C2: Chamber, P1: Vertex) -> LinkPos:
    """Relative position of two chambers sharing the vertex P1."""
    if P1 not in C1.vertices or P1 not in C2.vertices:
        raise BuildingError("P1 must be a vertex of both chambers")
    ctx = P1.ctx
    f1, f2 = C1.flag_at(P1), C2.flag_at(P1)
    dist = flag_distance(ctx, f1, f2)
    if dist == 0:
        return DEG0
    if dist == 1:
        return DEG1
    if dist == 3:
        return I
    # distance 2: the intermediate chamber is adjacent to both
    (l1, p1), (l2, p2) = f1, f2
    if _contained(ctx, l1, p2):
        mid = (l1, p2)
    else:
        mid = (l2, p1)
    C_mid = chamber_from_flag(P1, *mid)
    common_edge = set(C1.vertices) & set(C_mid.vertices)
    P2 = C1.line_vertex(P1)
    return III if P2 in common_edge else II


# ---------------------------------------------------------------------------------
# projections and first chambers
# ---------------------------------------------------------------------------------

def _q_coords(Q: Vertex, P: Vertex) -> Mat3:
    """g^-1 x for Hermite bases g of Q and x of P (exact: det g is a monomial)."""
    g = Q.matrix()
    d = g.det()
    di = d.invert()
    return Mat3(Q.ctx, [y * di for y in (g.adj() * P.matrix()).e])


def _project_many(Q: Vertex, P: Vertex, targets) -> list[Vertex]:
    g = Q.matrix()
    z = _q_coords(Q, P)
    extra = 8
    while True:
        try:
            k1, lam, _ = smith_decompose(z, prec=extra)
            out = []
            for mu in targets:
                M = g * k1 * Mat3.diag_t(Q.ctx, mu)
                out.append(_normalized(Q.ctx, *hermite_data(M)))
            return out
        except ZeroToPrecision:
            if extra >= PREC_CAP:
                raise PrecisionError("projection unresolved")
            extra *= 2


def project(Q: Vertex, P: Vertex, mu) -> Vertex:
    """The vertex of cl(Q, P) at position mu from Q, [g k1 t^mu Lambda]."""
    lam = inv(Q.matrix(), P.matrix()).m
    mu = tuple(mu)
    if not is_dominant(mu) or not is_dominant(tuple(a - b for a, b in zip(lam, mu))):
        raise BuildingError(f"{mu} is not below {lam} along cl(Q, P)")
    return _project_many(Q, P, [mu])[0]


def first_chamber(Q: Vertex, P: Vertex) -> Union[Chamber, Vertex]:
    """First chamber of cl(Q, P), or its first vertex when cl(Q, P) is a segment."""
    e = inv_prime(Q, P).e
    if e[0] == e[1] == e[2]:
        raise BuildingError("first_chamber needs P != Q")
    if e[0] > e[1] > e[2]:
        A, B = _project_many(Q, P, [(1, 0, 0), (1, 1, 0)])
        return Chamber(Q, A, B)
    mu = (1, 1, 0) if e[0] == e[1] else (1, 0, 0)
    return _project_many(Q, P, [mu])[0]


# ---------------------------------------------------------------------------------
# the composition predictor
# ---------------------------------------------------------------------------------

class PredictorError(ValueError):
    pass


def bend_bound(e, f, pos: LinkPos) -> int:
    e, f = tuple(e), tuple(f)
    if pos == II:
        return min(e[0] - e[1], f[1] - f[2])
    if pos == III:
        return min(f[0] - f[1], e[1] - e[2])
    raise PredictorError(f"no bend index for position {pos}")


def kottwitz_compose(e, f, pos: LinkPos, j: Optional[int] = None) -> CochClass:
    e, f = tuple(e), tuple(f)
    if pos == I:
        return CochClass.of((f[0] - e[2], f[1] - e[1], f[2] - e[0]))
    if pos not in (II, III):
        raise PredictorError(f"degenerate position {pos}")
    m = bend_bound(e, f, pos)
    if j is None or not (min(1, m) <= j <= m):
        raise PredictorError(f"j={j} outside {min(1, m)}..{m}")
    if pos == II:
        return CochClass.of((f[0] - e[2], f[1] - e[1] - j, f[2] - e[0] + j))
    return CochClass.of((f[0] - e[2] - j, f[1] - e[1] + j, f[2] - e[0]))


def predict_inv_set(e, f, pos: LinkPos) -> set:
    if pos == I:
        return {kottwitz_compose(e, f, I)}
    m = bend_bound(e, f, pos)
    return {kottwitz_compose(e, f, pos, j) for j in range(min(1, m), m + 1)}


def recover_j(e, f, pos: LinkPos, observed: CochClass) -> Optional[int]:
    """The unique bend index reproducing the observed class, if any."""
    if pos == I:
        return None
    m = bend_bound(e, f, pos)
    hits = [j for j in range(min(1, m), m + 1) if kottwitz_compose(e, f, pos, j) == observed]
    return hits[0] if len(hits) == 1 else None
