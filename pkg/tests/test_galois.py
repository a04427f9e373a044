import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ququart_mub.galois import (
    RingContext,
    RingError,
    TwoAdic,
    default_poly,
    dual_basis,
    enumerate_subsets,
    hensel_lift,
    is_basis,
    is_irreducible_gf2,
    is_primitive_gf2,
    is_self_dual,
    lift_teichmuller,
    lifted_context,
    reduce_mod,
    ring_context,
    self_dual_basis_search,
)

CONTEXTS = [(1, 1), (1, 2), (1, 3), (1, 4), (2, 1), (2, 2), (2, 3), (3, 2)]


def elems_of(s, n):
    ctx = ring_context(s, n)
    return st.integers(0, ctx.order - 1).map(lambda i: ctx[i])


def test_gf4_trace_table():
    f = ring_context(1, 2)
    xi = f.xi
    assert [f.trace(x) for x in (f.zero, f.one, xi, xi ** 2)] == [0, 0, 1, 1]
    assert f.trace(xi * xi) == 1


def test_gr42_trace_rules():
    r = ring_context(2, 2)
    xi = r.xi
    for i, j in itertools.product((1, 2), repeat=2):
        assert r.trace(xi ** i * xi ** j) == ((i == j) + 2) % 4
    for i, j, k in itertools.product((1, 2), repeat=3):
        assert r.trace(xi ** (i + j + k)) == (2 if i == j == k else 3)


def test_hensel_lifts():
    assert hensel_lift((1, 1, 1), 1) == (1, 1, 1)
    assert hensel_lift(hensel_lift((1, 1, 1), 1), 2) == (1, 1, 1)
    assert hensel_lift((1, 0, 1, 1), 1) == (3, 2, 3, 1)
    # lift divides x^(2^N - 1) - 1 over Z_8
    for n in (2, 3, 4):
        ctx = ring_context(3, n)
        assert ctx.xi ** ((1 << n) - 1) == ctx.one


@pytest.mark.parametrize("s,n", [(1, 2), (1, 3), (2, 2), (2, 3)])
def test_trace_compatible_under_lift(s, n):
    ring = ring_context(s, n)
    up = lifted_context(ring)
    for a in ring.elements():
        b = lift_teichmuller(a, up)
        assert reduce_mod(b, ring) == a
        assert up.trace(b) % ring.q == ring.trace(a)


@pytest.mark.parametrize("s,n", CONTEXTS)
def test_trace_table_matches_frobenius_sum(s, n):
    ctx = ring_context(s, n)
    for a in ctx.elements():
        assert ctx.trace(a) == ctx.trace_direct(a)


@pytest.mark.parametrize("s,n", CONTEXTS)
def test_teichmuller_and_two_adic(s, n):
    ctx = ring_context(s, n)
    t = ctx.teichmuller()
    assert len(t) == 1 << n and len(set(t)) == 1 << n
    for x in t:
        assert x * x == ctx.frobenius(x) or x.is_zero()
    for a in ctx.elements():
        assert ctx.from_two_adic(ctx.two_adic(a)) == a


@pytest.mark.parametrize("s,n", [(2, 1), (2, 2), (2, 3), (3, 2)])
def test_subsets(s, n):
    ctx = ring_context(s, n)
    units = enumerate_subsets(ctx, "units")
    ideal = enumerate_subsets(ctx, "ideal2")
    assert len(units) + len(ideal) == ctx.order
    assert len(ideal) == ctx.order >> n
    assert all(u.is_unit() for u in units)
    assert all(not i.is_unit() for i in ideal)
    classes = enumerate_subsets(ctx, "bar_classes")
    assert len(classes) == 1 << n
    assert sorted(len(c) for c in classes) == [ctx.order >> n] * (1 << n)
    with pytest.raises(ValueError):
        enumerate_subsets(ctx, "nope")


@pytest.mark.parametrize("s,n", CONTEXTS)
def test_working_basis_dual_pair(s, n):
    ctx = ring_context(s, n)
    b, d = ctx.basis.elems, ctx.dual.elems
    assert is_basis(list(b))
    g = np.array([[ctx.trace(x * y) for y in d] for x in b])
    assert np.array_equal(g, np.eye(n, dtype=int))


def test_self_dual_where_expected():
    assert is_self_dual(list(ring_context(2, 3).basis.elems))
    assert is_self_dual(list(ring_context(1, 3).basis.elems))
    # GR(4,2) has no self-dual basis: every square has even trace or the pair fails
    assert self_dual_basis_search(ring_context(2, 2), exhaustive=True) is None
    assert not is_self_dual(list(ring_context(2, 2).basis.elems))


def test_dual_basis_recovers_delta():
    ctx = ring_context(2, 2)
    xi = ctx.xi
    dual = dual_basis([xi, xi ** 2])
    for i, a in enumerate((xi, xi ** 2)):
        for j, b in enumerate(dual.elems):
            assert ctx.trace(a * b) == int(i == j)


def test_coords_round_trip():
    ctx = ring_context(2, 2)
    for a in ctx.elements():
        assert ctx.from_coords(ctx.coords(a)) == a


def test_polynomial_predicates():
    assert is_irreducible_gf2((1, 1, 1))
    assert not is_irreducible_gf2((1, 0, 1))
    assert is_primitive_gf2((1, 0, 1, 1))
    # x^4+x^3+x^2+x+1 is irreducible but its root has order 5
    assert is_irreducible_gf2((1, 1, 1, 1, 1)) and not is_primitive_gf2((1, 1, 1, 1, 1))


def test_ring_errors():
    with pytest.raises(RingError):
        RingContext(0, 2)
    with pytest.raises(RingError):
        RingContext(4, 2)
    with pytest.raises(RingError):
        RingContext(2, 0)
    with pytest.raises(RingError):
        RingContext(1, 2, (1, 0, 1))
    with pytest.raises(RingError):
        RingContext(1, 4, (1, 1, 1, 1, 1))
    with pytest.raises(RingError):
        RingContext(2, 2, (1, 1, 3))
    with pytest.raises(IndexError):
        ring_context(2, 2)[ring_context(2, 2).order]
    with pytest.raises(RingError):
        ring_context(2, 2).one + ring_context(2, 3).one


def test_lift_requires_adjacent_level():
    with pytest.raises(RingError):
        lift_teichmuller(ring_context(1, 2).xi, ring_context(3, 2))


def test_default_poly_cache_identity():
    assert default_poly(2, 3) == (3, 2, 3, 1)
    assert ring_context(2, 2) == ring_context(2, 2, default_poly(2, 2))
    assert isinstance(ring_context(2, 2).two_adic(ring_context(2, 2).one), TwoAdic)


@settings(max_examples=200, deadline=None)
@given(elems_of(2, 3), elems_of(2, 3), elems_of(2, 3))
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == a.ctx.zero


@settings(max_examples=200, deadline=None)
@given(elems_of(2, 2), elems_of(2, 2))
def test_trace_linear_and_frobenius_invariant(a, b):
    ctx = a.ctx
    assert ctx.trace(a + b) == (ctx.trace(a) + ctx.trace(b)) % ctx.q
    assert ctx.trace(ctx.frobenius(a)) == ctx.trace(a)
    assert ctx.frobenius(a * b) == ctx.frobenius(a) * ctx.frobenius(b)
    assert ctx.frobenius(a, ctx.N) == a


@settings(max_examples=100, deadline=None)
@given(elems_of(1, 4), elems_of(1, 4))
def test_field_frobenius_is_squaring(a, b):
    ctx = a.ctx
    assert ctx.frobenius(a) == a * a
    assert (a + b) * (a + b) == a * a + b * b
