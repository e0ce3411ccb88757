import collections
import random

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from adlv3.adlv import (B1, B2, ONE, ADLVError, BasicB, Geometry, MEntry, anchor_sets, assign_component,
                        cell_points, central_shift_check, classify, component_branch, component_geometry,
                        compute_M, compute_M_prime, dimension, enumerate_points, enumeration_bound,
                        fibration_case, membership, membership_matrix, nonempty, omega_count,
                        p2_minus_rational_count, predicted_count, random_k, sigma_conj,
                        to_level_zero, xi_count)
from adlv3.cartan import CochClass, dominant_triples, inv
from adlv3.ff import field, subspaces
from adlv3.latmat import Mat3, act, enumerate_lattices, standard_vertex, vertex_of

F2 = field(2, 1, 1)
F4 = field(2, 1, 2)


def classes(entries):
    return sorted(e.cls.e for e in entries)


def random_vertex(ctx, rng, spread=2):
    d = [rng.randint(-spread, spread) for _ in range(3)]
    return vertex_of(random_k(ctx, rng, 2) * Mat3.diag_t(ctx, d) * random_k(ctx, rng, 2))


# --- basic elements ---------------------------------------------------------------

def test_basic_constants():
    assert [b.eta_b for b in (ONE, B1, B2)] == [0, 1, 2]
    assert [b.defect for b in (ONE, B1, B2)] == [0, 2, 2]
    assert BasicB.parse("1") == ONE and BasicB.parse("b2") == B2
    with pytest.raises(ADLVError):
        BasicB.parse("b3")
    assert (B1.matrix(F2) * B1.matrix(F2)).agrees(B2.matrix(F2))


@pytest.mark.parametrize("b", [ONE, B1, B2])
def test_shift_a1_in_jb(b):
    a = b.shift_a1(F4)
    assert a.det().valuation() == 1
    assert sigma_conj(a, b).agrees(b.matrix(F4))
    assert (b.shift_inverse(F4) * a).agrees(Mat3.identity(F4))


def test_sigma_conj_examples():
    one = Mat3.identity(F4)
    assert sigma_conj(one, ONE).agrees(one)
    assert sigma_conj(one, B1).agrees(B1.matrix(F4))
    w = F4.omega.code
    x = Mat3.from_rows(F4, [[w, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert sigma_conj(x, ONE).agrees(x)


def test_membership_examples():
    L = standard_vertex(F4)
    assert membership(L, (0, 0, 0), ONE)
    assert membership(L, (1, 0, 0), B1)
    assert membership(L, (1, 1, 0), B2)
    assert not membership(L, (1, 0, -1), ONE)
    assert membership_matrix(Mat3.identity(F4), (1, 0, 0), B1)
    with pytest.raises(ADLVError):
        membership(L, (0, 1, 0), ONE)


def test_nonempty_examples():
    assert nonempty((1, 0, -1), ONE)
    assert not nonempty((0, 0, 0), B1)
    assert nonempty((1, 1, -1), B1)
    # the sorted form of (0,0,1): sum 1 against v(det 1) = 0
    v = nonempty((1, 0, 0), ONE)
    assert not v and "differs" in v.reason
    assert not nonempty((0, 0, 0), B2)


def test_dimension_examples():
    assert dimension((2, -1, -1), ONE) == 3
    assert dimension((1, 0, 0), B1) == 0
    assert dimension((0, 0, 0), ONE) == 0
    with pytest.raises(ADLVError):
        dimension((1, 0, 0), ONE)


# --- M-sets -----------------------------------------------------------------------

def test_m_set_examples():
    assert classes(compute_M((1, 0, -1), ONE)) == [(1, 0, 0), (1, 1, 0)]
    assert classes(compute_M((2, -1, -1), ONE)) == [(1, 0, -1)]
    assert classes(compute_M((1, 1, -1), B1)) == [(1, 0, 0), (1, 1, 0)]
    assert classes(compute_M_prime((1, 1, -1), B1)) == [(1, 1, 0)]
    assert classes(compute_M((1, 0, 0), B1)) == [(0, 0, 0)]
    assert component_branch((1, 1, -1), B1) == "II"
    assert component_branch((2, 0, 0), B2) == "III"
    assert component_branch((2, 0, -1), B1) is None


def test_m_entry_minima():
    e = MEntry.of((3, 1, 0))
    assert (e.m_I, e.m_II, e.m_III) == (1, 1, 2)
    assert e.anchor_type == (-4) % 3
    assert e.consistent()


def test_m_sets_nonempty_and_consistent():
    for b in (ONE, B1, B2):
        for lam in dominant_triples(-4, 4):
            if nonempty(lam, b):
                M, Mp = compute_M(lam, b), compute_M_prime(lam, b)
                assert Mp and set(Mp) <= set(M)
                assert all(e.consistent() for e in M)
                assert enumeration_bound(lam, b) == max(e.length for e in M) + 1


# --- geometry and counts ------------------------------------------------------------

def test_omega_examples():
    assert omega_count(2, 3) == 24
    assert omega_count(2, 2) == 0
    assert omega_count(3, 2) == 0
    assert omega_count(2, 1) == 0


def test_omega_against_brute_force():
    def dot(F, L, P):
        acc = 0
        for a, b in zip(L, P):
            acc = F.add(acc, F.mul(a, b))
        return acc

    for q, m in [(2, 3), (2, 4), (3, 3), (2, 5)]:
        F = field(q, 1, m)
        lines = [r[0] for r in subspaces(field(q, 1, 1), 3, 1)]
        n = sum(1 for (P,) in subspaces(F, 3, 1) if all(dot(F, L, P) for L in lines))
        Q = q ** m
        assert omega_count(q, m) == n == Q * Q + Q + 1 - (q * q + q + 1) * (Q - q + 1)


def test_p2_and_xi_counts():
    assert p2_minus_rational_count(2, 2) == 14
    assert p2_minus_rational_count(2, 1) == 0
    assert xi_count(2, 1) == 0
    assert xi_count(2, 2) == 56
    assert xi_count(2, 3) == 504


def test_predicted_count_products():
    assert predicted_count(Geometry("pt"), 2, 3) == 1
    assert predicted_count(Geometry("Omega", 0, 1), 2, 3) == 192
    assert predicted_count(Geometry("Omega", 1, 0), 2, 3) == 24 * 7
    assert predicted_count(Geometry("pt", 1, 2), 2, 2) == 3 * 16
    assert predicted_count(Geometry("P2-P2(k)", 0, 1), 2, 2) == 14 * 4
    with pytest.raises(ADLVError):
        Geometry("torus")


def test_component_geometry_dimensions():
    for b in (ONE, B1, B2):
        for lam in dominant_triples(-4, 4):
            if nonempty(lam, b):
                for e in anchor_sets(lam, b):
                    assert component_geometry(lam, b, e).dim == dimension(lam, b)


def test_fibration_examples():
    fc = fibration_case((2, -1, -1), ONE)
    assert fc and fc.family == "(2r,-r,-r)" and fc.r == 1
    assert not fibration_case((1, 0, -1), ONE)
    fc = fibration_case((1, 1, -1), B1)
    assert fc and fc.family == "(r+1,r+1,-2r-1)" and fc.r == 0


def test_classify_report():
    rep = classify((2, -1, -1), ONE)
    assert rep["nonempty"] and rep["M"] == ["[1,0,-1]"]
    (comp,) = rep["components"]
    assert comp["geometry"] == "Ω×𝔸^1"
    assert comp["predicted_counts"] == {"1": 0, "2": 0, "3": 192}
    assert rep["fibration_case"]["value"]
    assert classify((1, 0, 0), ONE)["nonempty"] is False


# --- enumeration ----------------------------------------------------------------------

def test_superbasic_point():
    for m in (1, 2, 3):
        for N in (1, 2, 3):
            pts = list(enumerate_points((1, 0, 0), B1, field(2, 1, m), N))
            assert pts == [standard_vertex(field(2, 1, m))]


def test_trivial_lambda_is_rational_points():
    pts = list(enumerate_points((0, 0, 0), ONE, F4, 1))
    rational = [V for V in enumerate_lattices(F4, 1, 0) if V.is_rational()]
    assert pts == sorted(rational) and len(pts) == len(list(enumerate_lattices(F2, 1, 0)))


@pytest.mark.parametrize("lam,b,m,N", [((1, 0, -1), ONE, 1, 2), ((1, 0, -1), ONE, 2, 1),
                                       ((2, 0, -1), B1, 2, 2), ((2, 1, -1), B2, 1, 2),
                                       ((1, 1, -1), B1, 1, 2), ((2, -1, -1), ONE, 2, 1)])
def test_pruned_matches_shell(lam, b, m, N):
    ctx = field(2, 1, m)
    a = list(enumerate_points(lam, b, ctx, N, method="pruned"))
    s = list(enumerate_points(lam, b, ctx, N, method="shell"))
    assert a == sorted(s)


def test_pruned_shard_invariant():
    a = [P.raw for P in enumerate_points((2, 1, -2), B1, F2, 3)]
    b = [P.raw for P in enumerate_points((2, 1, -2), B1, F2, 3, shards=3)]
    assert a == b and len(a) == 16


def test_split_cells_count():
    # both anchor families of (1,0,-1) over F_4: 14 = q^{2m} + q^m - q^2 - q each
    L1, L2 = standard_vertex(F4, 1), standard_vertex(F4, 2)
    A = cell_points((1, 0, -1), ONE, L2, MEntry.of((1, 0, 0)))
    B = cell_points((1, 0, -1), ONE, L1, MEntry.of((1, 1, 0)))
    assert len(A) == len(B) == 14
    assert len(set(A) | set(B)) == 26
    L1, L2 = standard_vertex(F2, 1), standard_vertex(F2, 2)
    assert cell_points((1, 0, -1), ONE, L2, MEntry.of((1, 0, 0))) == []
    assert cell_points((1, 0, -1), ONE, L1, MEntry.of((1, 1, 0))) == []


def test_b1_wall_strata():
    for m, size in ((1, 4), (2, 16)):
        ctx = field(2, 1, m)
        pts = list(enumerate_points((2, 0, -1), B1, ctx, 2))
        keys = collections.Counter()
        for P in pts:
            (kl,) = assign_component(P, (2, 0, -1), B1)
            keys[kl[0].anchor] += 1
        assert sorted(keys) == sorted([standard_vertex(ctx, 1), standard_vertex(ctx, 2)])
        assert list(keys.values()) == [size, size]


# --- component assignment -------------------------------------------------------------

def test_assign_hyperplane_point():
    w = F4.omega.code
    # t Lambda_2 + lifts of the kernel of (1, w, 0) on Lambda_2 / t Lambda_2
    P = vertex_of(Mat3.from_rows(F4, [[{1: w}, 0, {2: 1}], [{1: 1}, 0, 0], [0, 1, 0]]))
    keys = assign_component(P, (1, 0, -1), ONE)
    L2 = standard_vertex(F4, 2)
    hit = [(k, lab) for k, lab in keys if k.anchor == L2]
    assert len(hit) == 1
    k, lab = hit[0]
    assert (k.eta_level, k.mu.e, lab.position) == (0, (1, 0, 0), "I")
    # over F_{q^2} the second family always meets it (L cap sigma L is rational)
    assert len(keys) == 2


def test_assign_superbasic_point():
    L = standard_vertex(F4)
    ((k, lab),) = assign_component(L, (1, 0, 0), B1)
    assert k.eta_level == 0 and k.anchor == L and k.mu.e == (0, 0, 0)


def test_assign_two_components():
    w = F4.omega.code
    # chamber through [Lambda_1], [Lambda_2] and a non-rational type-0 vertex
    P = vertex_of(Mat3.from_rows(F4, [[1, 0, 0], [0, 1, 0], [{-1: w}, 0, 1]]))
    assert not P.is_rational()
    keys = assign_component(P, (1, 0, -1), ONE)
    anchors = sorted(k.anchor for k, _ in keys)
    assert anchors == sorted([standard_vertex(F4, 1), standard_vertex(F4, 2)])


def test_assign_rejects_non_member():
    with pytest.raises(ADLVError):
        assign_component(standard_vertex(F4), (1, 0, -1), ONE)


SUPERBASIC = [(lam, b, m) for b in (B1, B2) for lam in dominant_triples(-2, 3)
              if sum(lam) == b.eta_b and nonempty(lam, b) and enumeration_bound(lam, b) <= 3
              for m in (1, 2) if m == 1 or enumeration_bound(lam, b) <= 2
              or lam in ((2, 1, -2), (3, -1, -1), (2, 2, -2), (3, 0, -1))]


@pytest.mark.parametrize("lam,b,m", SUPERBASIC)
def test_superbasic_partition_and_counts(lam, b, m):
    ctx = field(2, 1, m)
    pts = list(enumerate_points(lam, b, ctx, enumeration_bound(lam, b)))
    by_key = collections.Counter()
    target = CochClass.of(lam)
    from adlv3.adlv import superbasic_label_value
    for P in pts:
        keys = assign_component(P, lam, b)
        assert len(keys) == 1
        k, lab = keys[0]
        by_key[(k.anchor, k.mu)] += 1
        assert superbasic_label_value(b, MEntry.of(k.mu), lab.position, lab.j) == target
    expected = {}
    for e in anchor_sets(lam, b):
        n = predicted_count(component_geometry(lam, b, e), 2, m)
        if n:
            expected[(standard_vertex(ctx, e.anchor_type), e.cls)] = n
    assert dict(by_key) == expected


# --- invariants -----------------------------------------------------------------------------

def test_central_shift_examples():
    L = standard_vertex(F4)
    assert central_shift_check(L, (0, 0, 0), ONE, 1)
    assert membership(L, (0, 0, 0), ONE)
    rng = random.Random(2)
    P = random_vertex(F4, rng)
    lam = inv(P.matrix(), B1.matrix(F4) * P.matrix().sigma()).m
    assert central_shift_check(P, lam, B1, 2)


def _eta_shift_bijection(lam, b, ctx, N):
    a = b.shift_a1(ctx)
    lvl0 = list(enumerate_points(lam, b, ctx, N))
    moved = {act(a, P) for P in lvl0}
    assert len(moved) == len(lvl0)
    for P in moved:
        assert membership(P, lam, b)
        r, P0 = to_level_zero(P, b)
        assert r == 1 and P0 in set(lvl0)


def test_eta_shift_bijection_on_enumerations():
    _eta_shift_bijection((2, 0, -1), B1, F4, 2)
    _eta_shift_bijection((2, 1, -1), B2, F2, 2)
    _eta_shift_bijection((1, 0, -1), ONE, F4, 1)


@settings(max_examples=1000, deadline=None)
@given(st.data())
def test_central_shift_equality(data):
    ctx = data.draw(st.sampled_from([F2, F4]))
    b = data.draw(st.sampled_from([ONE, B1, B2]))
    rng = random.Random(data.draw(st.integers(0, 2 ** 32)))
    P = random_vertex(ctx, rng)
    x = P.matrix()
    observed = inv(x, b.matrix(ctx) * x.sigma()).m
    lam = observed if data.draw(st.booleans()) else \
        tuple(sorted((observed[0] + 1, observed[1], observed[2] - 1), reverse=True))
    m = data.draw(st.integers(-2, 3))
    assert central_shift_check(P, lam, b, m)


@settings(max_examples=1000, deadline=None)
@given(st.data())
def test_eta_shift_acts_on_points(data):
    ctx = data.draw(st.sampled_from([F2, F4]))
    b = data.draw(st.sampled_from([ONE, B1, B2]))
    rng = random.Random(data.draw(st.integers(0, 2 ** 32)))
    P = random_vertex(ctx, rng)
    x = P.matrix()
    lam = inv(x, b.matrix(ctx) * x.sigma()).m
    a = b.shift_a1(ctx)
    Pa = act(a, P)
    assert membership(Pa, lam, b)
    assert Pa.type == (P.type + 1) % 3
    assert act(b.shift_inverse(ctx), Pa) == P
    assert membership(act(b.matrix(ctx), P), lam, b)
