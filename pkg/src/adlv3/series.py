"""Truncated Laurent series over F_{q^m}.

A ``TSeries`` stores the coefficients (as field codes) for the exponents
lo, lo+1, ..., prec-1.  Everything at or above ``prec`` is unknown.  Values
are kept normalized: a nonzero series starts at its valuation, and a series
that vanishes on its whole window is stored with ``lo == prec`` and no
coefficients ("zero to precision prec").

``prec=None`` marks an *exact* Laurent polynomial (infinite precision).  The
lattice code relies on this: Hermite forms and their adjugates are exact, so
membership tests never lose precision.
"""

from __future__ import annotations

from typing import Iterable, Optional

from .ff import FieldCtx, FieldElem


class ZeroToPrecision(ArithmeticError):
    """A value vanished on its whole window; the caller must raise precision."""

    def __init__(self, prec: Optional[int], msg: str = ""):
        self.prec = prec
        super().__init__(msg or f"zero to precision t^{prec}")


INF = float("inf")


def _pmin(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return a if a < b else b


class TSeries:
    __slots__ = ("ctx", "lo", "prec", "c")

    def __init__(self, ctx: FieldCtx, lo: int, prec: Optional[int], coeffs: Iterable[int] = ()):
        c = list(coeffs)
        if prec is not None:
            if len(c) > prec - lo:
                c = c[: max(prec - lo, 0)]
            else:
                c = c + [0] * (prec - lo - len(c))
        i = 0
        while i < len(c) and c[i] == 0:
            i += 1
        if i == len(c):
            lo = prec if prec is not None else 0
            c = []
        else:
            lo += i
            c = c[i:]
            if prec is None:
                while c[-1] == 0:
                    c.pop()
        self.ctx = ctx
        self.lo = lo
        self.prec = prec
        self.c = tuple(c)

    # constructors ----------------------------------------------------------------

    @classmethod
    def zero(cls, ctx: FieldCtx, prec: Optional[int] = None) -> "TSeries":
        return cls(ctx, 0 if prec is None else prec, prec, ())

    @classmethod
    def const(cls, ctx: FieldCtx, code: int, prec: Optional[int] = None) -> "TSeries":
        return cls(ctx, 0, prec, (code,))

    @classmethod
    def monomial(cls, ctx: FieldCtx, exp: int, code: int = 1,
                 prec: Optional[int] = None) -> "TSeries":
        return cls(ctx, exp, prec, (code,))

    @classmethod
    def from_terms(cls, ctx: FieldCtx, terms, prec: Optional[int] = None) -> "TSeries":
        """Build from (exponent, code) pairs."""
        terms = [(e, a) for e, a in terms if a]
        if not terms:
            return cls.zero(ctx, prec)
        lo = min(e for e, _ in terms)
        hi = max(e for e, _ in terms)
        c = [0] * (hi - lo + 1)
        for e, a in terms:
            c[e - lo] = ctx.add(c[e - lo], a)
        return cls(ctx, lo, prec, c)

    # basic queries ------------------------------------------------------------------

    @property
    def exact(self) -> bool:
        return self.prec is None

    def is_zero(self) -> bool:
        """True when no nonzero coefficient is known (exact zero or zero to prec)."""
        return not self.c

    def valuation(self) -> int:
        if not self.c:
            raise ZeroToPrecision(self.prec)
        return self.lo

    def coeff(self, e: int) -> int:
        if self.prec is not None and e >= self.prec:
            raise ZeroToPrecision(self.prec, f"coefficient t^{e} is beyond the window")
        i = e - self.lo
        return self.c[i] if 0 <= i < len(self.c) else 0

    def terms(self) -> list[tuple[int, int]]:
        return [(self.lo + i, a) for i, a in enumerate(self.c) if a]

    def end(self) -> int:
        """One past the last stored exponent."""
        return self.lo + len(self.c)

    def degree(self) -> int:
        """Highest nonzero exponent of an exact series."""
        if not self.c:
            raise ZeroToPrecision(self.prec)
        return self.lo + len(self.c) - 1

    def key(self) -> tuple:
        return (self.lo, self.prec, self.c)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TSeries):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def agrees(self, other: "TSeries") -> bool:
        """Equality on the common window (precision-aware comparison)."""
        p = _pmin(self.prec, other.prec)
        if p is None:
            return self == other
        return self.truncate(p) == other.truncate(p)

    # precision management ----------------------------------------------------------

    def truncate(self, prec: int) -> "TSeries":
        if self.prec is not None and prec >= self.prec:
            return self
        return TSeries(self.ctx, self.lo, prec, self.c[: max(prec - self.lo, 0)])

    def with_prec(self, prec: int) -> "TSeries":
        """Windowed copy of an exact series (or a truncation of a windowed one)."""
        return self.truncate(prec)

    # arithmetic ------------------------------------------------------------------------

    def _addsub(self, other: "TSeries", negate: bool) -> "TSeries":
        ctx = self.ctx
        prec = _pmin(self.prec, other.prec)
        if not other.c and other.prec is None:
            return self if prec == self.prec else self.truncate(prec)
        if not self.c and self.prec is None:
            o = -other if negate else other
            return o if prec == other.prec else o.truncate(prec)
        lo = min(self.lo, other.lo)
        hi = max(self.end(), other.end()) if prec is None else prec
        if hi <= lo:
            return TSeries(ctx, lo, prec, ())
        out = [0] * (hi - lo)
        for i, a in enumerate(self.c):
            k = self.lo + i - lo
            if k < len(out):
                out[k] = a
        p2 = ctx.p == 2
        for i, b in enumerate(other.c):
            k = other.lo + i - lo
            if k >= len(out) or not b:
                continue
            if p2:
                out[k] ^= b
            elif negate:
                out[k] = ctx.sub(out[k], b)
            else:
                out[k] = ctx.add(out[k], b)
        return TSeries(ctx, lo, prec, out)

    def __add__(self, other: "TSeries") -> "TSeries":
        return self._addsub(other, False)

    def __sub__(self, other: "TSeries") -> "TSeries":
        return self._addsub(other, True)

    def __neg__(self) -> "TSeries":
        ctx = self.ctx
        if ctx.p == 2:
            return self
        return TSeries(ctx, self.lo, self.prec, [ctx.neg(a) for a in self.c])

    def __mul__(self, other: "TSeries") -> "TSeries":
        ctx = self.ctx
        a, b = self, other
        if (not a.c and a.prec is None) or (not b.c and b.prec is None):
            return TSeries.zero(ctx, None)
        # prec_out = min(a.lo + b.prec, b.lo + a.prec)
        cands = []
        if b.prec is not None:
            cands.append(a.lo + b.prec)
        if a.prec is not None:
            cands.append(b.lo + a.prec)
        prec = min(cands) if cands else None
        lo = a.lo + b.lo
        if prec is None:
            n = len(a.c) + len(b.c) - 1
        else:
            n = prec - lo
        if n <= 0 or not a.c or not b.c:
            return TSeries(ctx, lo if prec is None else prec, prec, ())
        out = [0] * n
        exp, log = ctx._exp, ctx._log
        bl = [(j, log[y]) for j, y in enumerate(b.c) if y]
        p2 = ctx.p == 2
        add = ctx.add
        for i, x in enumerate(a.c):
            if not x or i >= n:
                continue
            lx = log[x]
            for j, ly in bl:
                k = i + j
                if k >= n:
                    break
                v = exp[lx + ly]
                if p2:
                    out[k] ^= v
                else:
                    out[k] = add(out[k], v)
        return TSeries(ctx, lo, prec, out)

    def scale(self, code: int) -> "TSeries":
        ctx = self.ctx
        if code == 0:
            return TSeries.zero(ctx, None)
        return TSeries(ctx, self.lo, self.prec, [ctx.mul(code, a) for a in self.c])

    def shift(self, k: int) -> "TSeries":
        """Multiply by t^k."""
        return TSeries(self.ctx, self.lo + k, None if self.prec is None else self.prec + k, self.c)

    def invert(self, prec: Optional[int] = None) -> "TSeries":
        """Multiplicative inverse.

        For windowed input the result carries relative precision equal to the
        input's.  Exact monomials invert exactly; other exact inputs need an
        explicit ``prec`` for the result window.
        """
        ctx = self.ctx
        v = self.valuation()
        if self.prec is None:
            if len(self.c) == 1:
                return TSeries(ctx, -v, None, (ctx.inv(self.c[0]),))
            if prec is None:
                raise ZeroToPrecision(None, "inverting an exact non-monomial needs a precision")
            n = prec + v
        else:
            n = self.prec - v  # relative precision
            if prec is not None:
                n = min(n, prec + v)
        if n <= 0:
            return TSeries(ctx, -v, -v + max(n, 0), ())
        u = list(self.c[:n]) + [0] * max(0, n - len(self.c))
        inv0 = ctx.inv(u[0])
        out = [0] * n
        out[0] = inv0
        # out_k = -inv0 * sum_{i=1..k} u_i out_{k-i}
        for k in range(1, n):
            s = 0
            for i in range(1, k + 1):
                ui = u[i]
                if ui:
                    s = ctx.add(s, ctx.mul(ui, out[k - i]))
            out[k] = ctx.neg(ctx.mul(inv0, s))
        return TSeries(ctx, -v, -v + n, out)

    def sigma(self, k: int = 1) -> "TSeries":
        ctx = self.ctx
        return TSeries(ctx, self.lo, self.prec, [ctx.frob(a, k) for a in self.c])

    # display ----------------------------------------------------------------------------

    def to_text(self) -> str:
        ctx = self.ctx
        if not self.c:
            body = "0"
            lo = self.lo if self.prec is None else self.prec
        else:
            lo = self.lo
            parts = []
            for i, a in enumerate(self.c):
                d = str(ctx.digits(a)).replace(" ", "")
                parts.append(d if i == 0 else (f"{d}*t" if i == 1 else f"{d}*t^{i}"))
            body = " + ".join(parts)
        tail = "exact" if self.prec is None else f"mod t^{self.prec}"
        return f"t^{lo}*({body}) {tail}"

    def __repr__(self) -> str:
        return f"TSeries({self.to_text()})"

    def elem(self, e: int) -> FieldElem:
        return self.ctx.elem(self.coeff(e))


def series_sigma(a: TSeries, k: int = 1) -> TSeries:
    return a.sigma(k)


def series_invert(a: TSeries, prec: Optional[int] = None) -> TSeries:
    return a.invert(prec)


def valuation(a: TSeries) -> int:
    return a.valuation()
