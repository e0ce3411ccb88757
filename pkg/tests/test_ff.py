import itertools
import random

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from adlv3.ff import FieldError, field, frobenius, is_irreducible, rank, smallest_irreducible, subspaces

SMALL = [(2, 1, 1), (2, 1, 2), (2, 1, 3), (3, 1, 2), (2, 2, 1), (2, 2, 2), (5, 1, 1), (3, 2, 1)]


def _polymul_mod(a, b, f, p):
    # schoolbook reference, independent of the log tables
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    n = len(f) - 1
    for d in range(len(prod) - 1, n - 1, -1):
        c = prod[d]
        if c:
            for i in range(n + 1):
                prod[d - n + i] = (prod[d - n + i] - c * f[i]) % p
    return (prod + [0] * n)[:n]


def test_f4_omega_squared():
    F = field(2, 1, 2)
    w = F.omega
    assert F.modulus == (1, 1, 1)
    assert w * w == w + 1


def test_f4_inverse_of_omega():
    F = field(2, 1, 2)
    w = F.omega
    found = [F.elem(c) for c in range(4) if (F.elem(c) * w) == 1]
    assert found == [w.inverse()]
    assert w.inverse() * w == 1


def test_add_zero_identity():
    F = field(3, 1, 3)
    rng = random.Random(1)
    for _ in range(100):
        a = F.elem(F.random(rng))
        assert a + F.elem(0) == a


def test_division_by_zero_is_an_error():
    F = field(2, 1, 3)
    with pytest.raises(FieldError):
        F.elem(0).inverse()
    with pytest.raises(FieldError):
        F.elem(3) / F.elem(0)


def test_frobenius_on_f4():
    F = field(2, 1, 2)
    assert frobenius(F.omega, 1) == F.omega + 1


def test_frobenius_fixes_subfield():
    F = field(2, 2, 3)
    sub = F.subfield()
    assert len(sub) == 4
    for a in sub:
        assert F.frob(a) == a


def test_frobenius_order_m():
    F = field(3, 1, 4)
    rng = random.Random(5)
    for _ in range(50):
        a = F.elem(F.random(rng))
        assert frobenius(a, 4) == a


@pytest.mark.parametrize("p,s,m", SMALL)
def test_modulus_is_smallest_irreducible(p, s, m):
    F = field(p, s, m)
    n = s * m
    assert len(F.modulus) == n + 1 and F.modulus[-1] == 1
    assert is_irreducible(list(F.modulus), p)
    # lexicographic order on the coefficient tuple read from the top
    for low in itertools.product(range(p), repeat=n):
        cand = list(low) + [1]
        if tuple(reversed(cand)) < tuple(reversed(F.modulus)):
            assert not is_irreducible(cand, p)


def test_modulus_examples():
    assert smallest_irreducible(2, 8) == (1, 1, 0, 1, 1, 0, 0, 0, 1)
    assert field(2, 1, 8).generator == 3
    assert field(3, 1, 2).modulus == (1, 0, 1)
    assert field(3, 1, 2).generator == 4


@pytest.mark.parametrize("p,s,m", SMALL)
def test_tables_match_schoolbook(p, s, m):
    F = field(p, s, m)
    f = list(F.modulus)
    for a in range(F.Q):
        for b in range(F.Q):
            assert F.digits(F.mul(a, b)) == _polymul_mod(F.digits(a), F.digits(b), f, p)


@pytest.mark.parametrize("p,s,m", SMALL)
def test_multiplicative_group_order(p, s, m):
    F = field(p, s, m)
    for a in range(1, F.Q):
        assert F.pow(a, F.Q - 1) == 1


@pytest.mark.parametrize("p,s,m", [(2, 1, 4), (2, 2, 3), (3, 1, 3), (2, 3, 4), (2, 1, 12)])
def test_fixed_set_has_q_elements(p, s, m):
    F = field(p, s, m)
    assert len(F.subfield()) == F.q


def test_unsupported_sizes():
    with pytest.raises(FieldError):
        field(2, 1, 21)
    with pytest.raises(FieldError):
        field(4, 1, 1)


def test_subspaces_counts():
    F = field(2, 1, 1)
    assert len(list(subspaces(F, 3, 1))) == 7
    assert len(list(subspaces(F, 3, 2))) == 7
    for S in subspaces(F, 3, 2):
        assert rank(F, S) == 2


@settings(max_examples=1000)
@given(st.data())
def test_frobenius_is_ring_homomorphism(data):
    p, s, m = data.draw(st.sampled_from([(2, 1, 4), (3, 1, 3), (2, 2, 3), (5, 1, 2)]))
    F = field(p, s, m)
    a = F.elem(data.draw(st.integers(0, F.Q - 1)))
    b = F.elem(data.draw(st.integers(0, F.Q - 1)))
    assert frobenius(a * b) == frobenius(a) * frobenius(b)
    assert frobenius(a + b) == frobenius(a) + frobenius(b)


@settings(max_examples=300)
@given(st.data())
def test_field_axioms(data):
    p, s, m = data.draw(st.sampled_from(SMALL))
    F = field(p, s, m)
    a, b, c = (F.elem(data.draw(st.integers(0, F.Q - 1))) for _ in range(3))
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == 0
    if not a.is_zero():
        assert a * a.inverse() == 1
