"""Dominant cocharacters of GL_3, their classes modulo (1,1,1), and the
relative-position maps inv (on matrices) and inv' (on vertices)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .latmat import Mat3, Vertex, minval


def is_dominant(m: Sequence[int]) -> bool:
    return m[0] >= m[1] >= m[2]


@dataclass(frozen=True, order=True)
class Cocharacter:
    m: tuple

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(int(x) for x in self.m))
        if len(self.m) != 3 or not is_dominant(self.m):
            raise ValueError(f"{self.m} is not a dominant triple")

    def __iter__(self):
        return iter(self.m)

    def __getitem__(self, i):
        return self.m[i]

    def shift(self, c: int) -> "Cocharacter":
        return Cocharacter(tuple(x + c for x in self.m))

    @property
    def cls(self) -> "CochClass":
        return CochClass.of(self.m)

    def __str__(self) -> str:
        return ",".join(str(x) for x in self.m)


@dataclass(frozen=True, order=True)
class CochClass:
    """Dominant triple modulo (m, m, m), normalized to digit sum 0, 1 or 2."""

    e: tuple

    @classmethod
    def of(cls, m: Sequence[int]) -> "CochClass":
        m = tuple(int(x) for x in m)
        if not is_dominant(m):
            raise ValueError(f"{m} is not dominant")
        c = sum(m) // 3
        return cls(tuple(x - c for x in m))

    def __iter__(self):
        return iter(self.e)

    def __getitem__(self, i):
        return self.e[i]

    def rep(self, total: int) -> tuple:
        """The representative with coordinate sum ``total`` (must match mod 3)."""
        s = sum(self.e)
        if (total - s) % 3:
            raise ValueError(f"no representative of {self} with sum {total}")
        c = (total - s) // 3
        return tuple(x + c for x in self.e)

    @property
    def length(self) -> int:
        return self.e[0] - self.e[2]

    def __str__(self) -> str:
        return "[" + ",".join(str(x) for x in self.e) + "]"


def inverse_triple(lam: Sequence[int]) -> tuple:
    """inv(y, x) from inv(x, y): negate and reverse."""
    return (-lam[2], -lam[1], -lam[0])


def inv(x: Mat3, y: Mat3) -> Cocharacter:
    """Dominant lambda with x^-1 y in K t^lambda K.

    Uses A = adj(x) y = det(x) x^-1 y, so no series is ever inverted: the
    elementary divisors come from the minimal valuations of the entries and
    2x2 minors of A, shifted by v(det x).
    """
    D = x.det().valuation()
    A = x.adj() * y
    v1 = minval(A.e) - D
    v2 = minval(A.minors2()) - 2 * D
    v3 = y.det().valuation() - D
    return Cocharacter((v3 - v2, v2 - v1, v1))


def inv_prime(V: Vertex, W: Vertex) -> CochClass:
    return inv(V.matrix(), W.matrix()).cls


def dominance_leq(lam: Sequence[int], mu: Sequence[int]) -> bool:
    return (lam[0] <= mu[0] and lam[0] + lam[1] <= mu[0] + mu[1]
            and sum(lam) == sum(mu))


def class_leq(lam, mu) -> bool:
    """[lam] <= [mu]: some central shift of mu has the same sum and dominates lam."""
    lam, mu = tuple(lam), tuple(mu)
    diff = sum(lam) - sum(mu)
    if diff % 3:
        return False
    c = diff // 3
    return dominance_leq(lam, tuple(x + c for x in mu))


def dominant_triples(lo: int, hi: int):
    """All dominant triples with entries in [lo, hi], lexicographic."""
    for a in range(lo, hi + 1):
        for b in range(lo, a + 1):
            for c in range(lo, b + 1):
                yield (a, b, c)
