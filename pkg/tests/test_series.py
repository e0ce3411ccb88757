import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from adlv3.ff import field
from adlv3.series import TSeries, ZeroToPrecision, series_invert, series_sigma, valuation

F2 = field(2, 1, 1)
F4 = field(2, 1, 2)


def T(ctx, terms, prec=None):
    return TSeries.from_terms(ctx, terms, prec)


def draw_series(data, ctx, lo=-2, hi=5, prec=None):
    terms = [(e, data.draw(st.integers(0, ctx.Q - 1))) for e in range(lo, hi)]
    return T(ctx, terms, prec)


def test_monomial_shift():
    a = T(F2, [(1, 1), (2, 1)])
    assert a * TSeries.monomial(F2, -1) == T(F2, [(0, 1), (1, 1)])


def test_char_two_square():
    a = T(F2, [(0, 1), (1, 1)])
    assert a * a == T(F2, [(0, 1), (2, 1)])


def test_add_zero():
    a = T(F4, [(0, 2), (3, 3)], prec=6)
    assert a + TSeries.zero(F4) == a


def test_mul_window():
    a = T(F2, [(0, 1)], prec=4)
    b = T(F2, [(1, 1)], prec=3)
    # min(a.lo + b.prec, b.lo + a.prec) = min(0 + 3, 1 + 4)
    assert (a * b).prec == 3


def test_valuation_examples():
    assert valuation(T(F2, [(3, 1), (5, 1)])) == 3
    a = T(F2, [(2, 1), (3, 1)]) + T(F2, [(2, 1)])
    assert valuation(a) == 3


def test_zero_to_precision_error():
    z = TSeries.zero(F2, 4)
    with pytest.raises(ZeroToPrecision) as err:
        valuation(z)
    assert err.value.prec == 4


def test_invert_examples():
    a = T(F2, [(0, 1), (1, 1)], prec=3)
    assert series_invert(a) == T(F2, [(0, 1), (1, 1), (2, 1)], prec=3)
    assert (a * series_invert(a)).agrees(TSeries.const(F2, 1, 3))
    assert series_invert(TSeries.monomial(F2, 1)) == TSeries.monomial(F2, -1)
    w = F4.omega.code
    assert series_invert(TSeries.const(F4, w)) == TSeries.const(F4, F4.inv(w))


def test_invert_zero_propagates():
    with pytest.raises(ZeroToPrecision):
        series_invert(TSeries.zero(F2, 5))


def test_sigma_examples():
    w = F4.omega.code
    a = T(F4, [(0, w), (1, w)])
    w2 = F4.mul(w, w)
    assert series_sigma(a) == T(F4, [(0, w2), (1, w2)])
    rational = T(F4, [(0, 1), (2, 1), (7, 1)])
    assert series_sigma(rational) == rational
    assert series_sigma(a, 2) == a


def test_coefficient_beyond_window():
    with pytest.raises(ZeroToPrecision):
        T(F2, [(0, 1)], prec=2).coeff(2)


@settings(max_examples=300)
@given(st.data())
def test_ring_axioms_in_window(data):
    ctx = data.draw(st.sampled_from([F2, F4, field(3, 1, 2)]))
    a, b, c = (draw_series(data, ctx, prec=data.draw(st.integers(4, 9))) for _ in range(3))
    assert ((a + b) + c).agrees(a + (b + c))
    assert ((a * b) * c).agrees(a * (b * c))
    assert (a * (b + c)).agrees(a * b + a * c)
    assert (a - a).is_zero()


@settings(max_examples=300)
@given(st.data())
def test_sigma_homomorphism_and_valuation(data):
    ctx = data.draw(st.sampled_from([F4, field(3, 1, 2), field(2, 1, 3)]))
    a, b = draw_series(data, ctx), draw_series(data, ctx)
    assert series_sigma(a * b) == series_sigma(a) * series_sigma(b)
    assert series_sigma(a + b) == series_sigma(a) + series_sigma(b)
    if not a.is_zero():
        assert valuation(series_sigma(a)) == valuation(a)


def _pipeline(a, b, c, u, prec):
    a, b, c, u = (x.with_prec(prec) for x in (a, b, c, u))
    return (a * b - c).sigma() * series_invert(u) + a * c


@settings(max_examples=1000)
@given(st.data())
def test_precision_monotonicity(data):
    ctx = data.draw(st.sampled_from([F2, F4, field(3, 1, 2)]))
    a, b, c = (draw_series(data, ctx, 0, 6) for _ in range(3))
    u = draw_series(data, ctx, 0, 6) + TSeries.const(ctx, 1)
    if u.is_zero() or valuation(u) != 0:
        u = TSeries.const(ctx, 1) + TSeries.monomial(ctx, 1)
    p = data.draw(st.integers(2, 8))
    small = _pipeline(a, b, c, u, p)
    large = _pipeline(a, b, c, u, p + data.draw(st.integers(1, 8)))
    assert large.truncate(small.prec) == small
