"""Finite fields F_{q^m} with q = p^s, as one flat extension of F_p.

Elements are packed into integer *codes*: the base-p digits of the code are
the coordinates with respect to the power basis 1, x, ..., x^{n-1} of the
modulus (least significant first).  Multiplication goes through log/exp
tables built once per context; for p = 2 addition is a plain XOR.

The inner loops of the series and lattice code work with raw codes.
``FieldElem`` is the user-facing wrapper for the same values.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache

MAX_ORDER = 1 << 20


class FieldError(ArithmeticError):
    """Raised on division by zero and on unsupported field parameters."""


# --- polynomials over F_p as coefficient lists, least significant first ---

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], f: list[int], p: int) -> list[int]:
    a = _trim(list(a))
    df = len(f) - 1
    inv_lead = pow(f[-1], p - 2, p)
    while len(a) - 1 >= df:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - df
        for i, fi in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fi) % p
        _trim(a)
    return a


def _pmul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _psub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    return _trim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p
                  for i in range(n)])


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _ppowmod(a: list[int], e: int, f: list[int], p: int) -> list[int]:
    result, base = [1], _pmod(a, f, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), f, p)
        base = _pmod(_pmul(base, base, p), f, p)
        e >>= 1
    return result


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_prime(n: int) -> bool:
    return n >= 2 and _prime_factors(n) == [n]


def is_irreducible(f: list[int], p: int) -> bool:
    """Rabin's test for a monic polynomial f over F_p (coefficients lsf)."""
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    x = [0, 1]

    def frob_power(k: int) -> list[int]:
        # x^(p^k) mod f by k successive p-th powers
        r = x
        for _ in range(k):
            r = _ppowmod(r, p, f, p)
        return r

    if _psub(frob_power(n), x, p):
        return False
    for r in _prime_factors(n):
        g = _pgcd(f, _psub(frob_power(n // r), x, p), p)
        if len(g) > 1:
            return False
    return True


@lru_cache(maxsize=None)
def smallest_irreducible(p: int, n: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree n over F_p.

    Polynomials are compared as written, highest degree first, which is the
    same as comparing the integers sum(c_i p^i).  Returned least significant
    coefficient first.
    """
    for low in range(p ** n):
        f = [(low // p ** i) % p for i in range(n)] + [1]
        if f[0] == 0 and n > 1:
            continue
        if is_irreducible(f, p):
            return tuple(f)
    raise FieldError(f"no irreducible polynomial of degree {n} over F_{p}")


class FieldCtx:
    """The field F_{q^m}, q = p^s, with the relative Frobenius x -> x^q."""

    def __init__(self, p: int, s: int = 1, m: int = 1):
        if not is_prime(p):
            raise FieldError(f"p={p} is not prime")
        if s < 1 or m < 1:
            raise FieldError("s and m must be positive")
        self.p, self.s, self.m = p, s, m
        self.n = s * m
        self.q = p ** s
        self.Q = p ** self.n
        if self.Q > MAX_ORDER:
            raise FieldError(f"q^m = {self.Q} exceeds the supported 2^20")
        self.modulus: tuple[int, ...] = smallest_irreducible(p, self.n)
        self._build_tables()
        self._add_table = None
        if p != 2 and self.Q <= 243:
            Q = self.Q
            self._add_table = [self._add_digits(a, b) for a in range(Q) for b in range(Q)]

    # construction ----------------------------------------------------------

    def _times_x(self, a: int) -> int:
        p, n, f = self.p, self.n, self.modulus
        top = a // p ** (n - 1)
        a = (a % p ** (n - 1)) * p
        if top:
            # subtract top * (f - x^n)
            digs = self.digits(a)
            for i in range(n):
                digs[i] = (digs[i] - top * f[i]) % p
            a = self.from_digits(digs)
        return a

    def _mul_slow(self, a: int, b: int) -> int:
        prod = _pmul(self.digits(a), self.digits(b), self.p)
        return self.from_digits(_pmod(prod, list(self.modulus), self.p))

    def _build_tables(self) -> None:
        Q = self.Q
        order = Q - 1
        step = self._times_x
        gen = self.p if self.n > 1 else None
        if gen is not None:
            # is x primitive?  walk its powers until we return to 1
            a, k = 1, 0
            while True:
                a = step(a)
                k += 1
                if a == 1:
                    break
            if k != order:
                gen = None
        if gen is None:
            gen = self._find_generator()
            step = lambda a, g=gen: self._mul_slow(a, g)  # noqa: E731
        exp = [0] * (2 * order + 1)
        log = [0] * Q
        a = 1
        for i in range(order):
            exp[i] = a
            log[a] = i
            a = step(a)
        for i in range(order, 2 * order + 1):
            exp[i] = exp[i - order]
        self.generator = gen
        self._exp, self._log = exp, log

    def _find_generator(self) -> int:
        order = self.Q - 1
        if order == 1:
            return 1
        f = list(self.modulus)
        primes = _prime_factors(order)
        for g in range(2, self.Q):
            gd = self.digits(g)
            if all(_ppowmod(gd, order // r, f, self.p) != [1] for r in primes):
                return g
        raise FieldError("no primitive element found")  # pragma: no cover

    # encoding ----------------------------------------------------------------

    def digits(self, a: int) -> list[int]:
        p = self.p
        out = []
        for _ in range(self.n):
            a, r = divmod(a, p)
            out.append(r)
        return out

    def from_digits(self, digs) -> int:
        p, a = self.p, 0
        for d in reversed(list(digs)):
            a = a * p + (d % p)
        return a

    # arithmetic on codes -------------------------------------------------------

    def _add_digits(self, a: int, b: int) -> int:
        p = self.p
        out, mult = 0, 1
        while a or b:
            a, x = divmod(a, p)
            b, y = divmod(b, p)
            out += ((x + y) % p) * mult
            mult *= p
        return out

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self._add_table is not None:
            return self._add_table[a * self.Q + b]
        return self._add_digits(a, b)

    def neg(self, a: int) -> int:
        if self.p == 2 or a == 0:
            return a
        p = self.p
        return self.from_digits([(-d) % p for d in self.digits(a)])

    def sub(self, a: int, b: int) -> int:
        return a ^ b if self.p == 2 else self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise FieldError("division by zero")
        return self._exp[(self.Q - 1 - self._log[a]) % (self.Q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise FieldError("division by zero")
            return 1 if e == 0 else 0
        return self._exp[(self._log[a] * e) % (self.Q - 1)]

    def frob(self, a: int, k: int = 1) -> int:
        """a -> a^(q^k)."""
        if k < 0:
            raise FieldError("frobenius repetitions must be >= 0")
        if a == 0:
            return 0
        return self._exp[(self._log[a] * pow(self.q, k, self.Q - 1)) % (self.Q - 1)]

    def scalar(self, c: int) -> int:
        """Image of the integer c in the prime field."""
        return c % self.p

    def subfield(self) -> list[int]:
        """Codes of F_q, the fixed field of the relative Frobenius."""
        return [a for a in range(self.Q) if self.frob(a) == a]

    def random(self, rng: random.Random, nonzero: bool = False) -> int:
        return rng.randrange(1 if nonzero else 0, self.Q)

    # wrappers ------------------------------------------------------------------

    def elem(self, code_or_digits) -> "FieldElem":
        if isinstance(code_or_digits, int):
            return FieldElem(self, code_or_digits % self.Q)
        return FieldElem(self, self.from_digits(code_or_digits))

    @property
    def omega(self) -> "FieldElem":
        """The class of x (the power-basis generator)."""
        return self.elem(self.p if self.n > 1 else 1)

    def describe(self) -> dict:
        return {"p": self.p, "s": self.s, "m": self.m, "q": self.q,
                "modulus": list(self.modulus)}

    def __repr__(self) -> str:
        return f"FieldCtx(p={self.p}, s={self.s}, m={self.m})"


@lru_cache(maxsize=None)
def field(p: int, s: int = 1, m: int = 1) -> FieldCtx:
    """Cached context constructor."""
    return FieldCtx(p, s, m)


@dataclass(frozen=True)
class FieldElem:
    ctx: FieldCtx
    code: int

    @property
    def coeffs(self) -> list[int]:
        return self.ctx.digits(self.code)

    def _other(self, b) -> int:
        if isinstance(b, FieldElem):
            if b.ctx is not self.ctx:
                raise FieldError("elements of different fields")
            return b.code
        return self.ctx.scalar(b)

    def __add__(self, b): return FieldElem(self.ctx, self.ctx.add(self.code, self._other(b)))
    def __radd__(self, b): return self + b
    def __sub__(self, b): return FieldElem(self.ctx, self.ctx.sub(self.code, self._other(b)))
    def __rsub__(self, b): return FieldElem(self.ctx, self.ctx.sub(self._other(b), self.code))
    def __mul__(self, b): return FieldElem(self.ctx, self.ctx.mul(self.code, self._other(b)))
    def __rmul__(self, b): return self * b
    def __neg__(self): return FieldElem(self.ctx, self.ctx.neg(self.code))
    def __truediv__(self, b): return FieldElem(self.ctx, self.ctx.div(self.code, self._other(b)))

    def __pow__(self, e: int):
        return FieldElem(self.ctx, self.ctx.pow(self.code, e))

    def inverse(self) -> "FieldElem":
        return FieldElem(self.ctx, self.ctx.inv(self.code))

    def frobenius(self, k: int = 1) -> "FieldElem":
        return FieldElem(self.ctx, self.ctx.frob(self.code, k))

    def is_zero(self) -> bool:
        return self.code == 0

    def __eq__(self, b) -> bool:
        if isinstance(b, FieldElem):
            return self.ctx is b.ctx and self.code == b.code
        if isinstance(b, int):
            return self.code == self.ctx.scalar(b)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.code)

    def __repr__(self) -> str:
        return f"FieldElem({self.coeffs})"


def frobenius(a: FieldElem, k: int = 1) -> FieldElem:
    return a.frobenius(k)


# --- small linear algebra over F_{q^m} (vectors are lists of codes) ---

def rref(ctx: FieldCtx, vecs) -> list[list[int]]:
    """Reduced row echelon basis of the span of the given vectors."""
    rows = [list(v) for v in vecs]
    out: list[list[int]] = []
    n = len(rows[0]) if rows else 0
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = ctx.inv(rows[r][col])
        rows[r] = [ctx.mul(inv, x) for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [ctx.sub(x, ctx.mul(f, y)) for x, y in zip(rows[i], rows[r])]
        r += 1
    out = [row for row in rows[:r]]
    return out


def rank(ctx: FieldCtx, vecs) -> int:
    vecs = [v for v in vecs if any(v)]
    return len(rref(ctx, vecs)) if vecs else 0


def subspaces(ctx: FieldCtx, n: int, k: int, alphabet=None):
    """All k-dimensional subspaces of F^n, each as its RREF basis (sorted order)."""
    alphabet = list(range(ctx.Q)) if alphabet is None else list(alphabet)
    for pivots in itertools.combinations(range(n), k):
        free = [(i, j) for i in range(k) for j in range(n)
                if j > pivots[i] and j not in pivots]
        for vals in itertools.product(alphabet, repeat=len(free)):
            rows = [[0] * n for _ in range(k)]
            for i, p in enumerate(pivots):
                rows[i][p] = 1
            for (i, j), v in zip(free, vals):
                rows[i][j] = v
            yield rows
