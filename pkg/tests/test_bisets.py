from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from artifact.basic import all_pp_classes
from artifact.bisets import (UNDEFINED, BisetClass, DomainError, PSetElement, VirtualBiset, act, act_class,
                             act_general, adjunction_check, burnside_multiply, compose, compose_classes,
                             compose_general, compose_pp, context, delta, diagonal, fixed_point_count, length,
                             m_of_pset, marks, opposite, scalar_product)
from artifact.groups import catalog_group, direct_product, identity_hom, injective_homs
from artifact.oracles import equivariant_map_count, mackey_oracle


def _classes(name):
    return list(all_pp_classes(catalog_group(name)))


def _unit(P):
    return VirtualBiset.of(diagonal(P, range(P.order)))


# pp class counts, frozen from enumerating Δ_φ(Q) over all injective φ: Q → P
PP_COUNTS = {"C2": 2, "C3": 3, "C4": 4, "V4": 16, "D8": 21, "Q8": 17}


@pytest.mark.parametrize("name", sorted(PP_COUNTS))
def test_pp_class_counts(name):
    assert len(_classes(name)) == PP_COUNTS[name]


@pytest.mark.parametrize("name", sorted(PP_COUNTS))
def test_pp_classes_match_enumeration(name):
    P = catalog_group(name)
    ctx = context(P, P)
    n = P.order
    seen = {ctx.canonical(phi(u) * n + u for u in q) for q in P.subgroups() for phi in injective_homs(P, q, P)}
    assert {c.members for c in _classes(name)} == seen


@pytest.mark.parametrize("name", ["C2", "C3", "C4", "V4"])
def test_composition_matches_orbit_oracle(name):
    cs = _classes(name)
    for a in cs:
        for b in cs:
            assert compose_classes(a, b) == mackey_oracle(a, b)


@pytest.mark.parametrize("name", ["V4", "D8"])
def test_pp_formula_matches_general_composition(name):
    cs = _classes(name)
    for a in cs[::3]:
        for b in cs[::2]:
            assert compose_pp(a, b) == compose_general(a, b)


def test_general_composition_on_non_projective_classes():
    P = catalog_group("C2")
    ctx = context(P, P)
    full = BisetClass.of(P, P, range(4))
    left_factor = BisetClass.of(P, P, [0, ctx.pack(1, 0)])
    for a in (full, left_factor):
        for b in (full, left_factor):
            assert compose_general(a, b) == mackey_oracle(a, b)


@pytest.mark.parametrize("name", ["C2", "C3"])
def test_fixed_points_match_equivariant_maps(name):
    P = catalog_group(name)
    subs = direct_product(P, P).subgroups()
    ctx = context(P, P)
    for d in subs:
        for e in subs:
            assert ctx.fixed_points(d, e) == equivariant_map_count(P, P, d, e)


def test_unit_is_identity_for_composition():
    P = catalog_group("D8")
    u = _unit(P)
    for c in _classes("D8")[:10]:
        f = VirtualBiset.of(c)
        assert compose(u, f) == f == compose(f, u)


def test_length_values():
    P = catalog_group("D8")
    assert length(_unit(P)) == 1
    trivial = diagonal(P, [0])
    assert length(VirtualBiset.of(trivial, 3)) == 24


def test_length_undefined_on_non_projective():
    P = catalog_group("C2")
    with pytest.raises(DomainError):
        length(VirtualBiset.of(BisetClass.of(P, P, range(4))))


def test_opposite_swaps_coordinates():
    P = catalog_group("C4")
    phi = P.conj_hom(0, range(4))
    c = delta(P, P, phi)
    assert c.opposite().opposite() == c
    assert sorted(c.opposite().pairs()) == sorted((b, a) for a, b in c.pairs())


def test_scalar_product_basic_values():
    P = catalog_group("C2")
    u = _unit(P)
    zero = VirtualBiset.zero(P, P)
    assert scalar_product(u, zero) == 0
    assert scalar_product(zero, u) == 1
    t = VirtualBiset.of(diagonal(P, [0]))
    # the full diagonal fixes no coset of the trivial subgroup; the trivial subgroup fixes all four
    assert scalar_product(u, t) == 0
    assert scalar_product(t, t) == 4
    assert scalar_product(u.scale(-1), t) is UNDEFINED
    with pytest.raises(DomainError):
        scalar_product(u.scale(Fraction(1, 2)), t)


def test_act_pp_matches_general_action():
    P = catalog_group("D8")
    for c in _classes("D8")[::4]:
        for q in P.subgroups():
            assert act_class(c, q) == act_general(c, q)


def test_burnside_ring_unit_and_marks():
    P = catalog_group("D8")
    one = PSetElement.one(P)
    s = PSetElement.s(P, [0])
    assert burnside_multiply(one, s) == s
    # s_1 · s_1 = |P| s_1, so the marks square
    sq = burnside_multiply(s, s)
    assert sq == s.scale(8)
    assert marks(sq) == [m * m for m in marks(s)]


def test_adjunction_for_an_inclusion():
    P = catalog_group("D8")
    q = next(s for s in P.subgroups() if len(s) == 4)
    alpha = identity_hom(q)
    Q, _ = P.subgroup_group(q)
    f = VirtualBiset.of(diagonal(Q, range(Q.order)))
    lhs_h = VirtualBiset.of(BisetClass.of(P, Q, [0]))
    for h in (lhs_h, lhs_h.scale(2)):
        f_pq = VirtualBiset(Q, Q, f.coeffs)
        lhs, rhs, ok = adjunction_check(alpha, P, P, f_pq, h)
        assert ok, (lhs, rhs)


def test_json_roundtrip():
    P = catalog_group("Q8")
    cs = _classes("Q8")
    f = VirtualBiset.of(cs[0], Fraction(2, 3)) + VirtualBiset.of(cs[5], -4)
    assert VirtualBiset.from_json(P, P, f.to_json()) == f


def _virtual(classes):
    term = st.tuples(st.sampled_from(classes), st.integers(-3, 3))
    return st.lists(term, min_size=1, max_size=3).map(
        lambda ts: sum((VirtualBiset.of(c, k) for c, k in ts), VirtualBiset.zero(ts[0][0].left, ts[0][0].left)))


V4_CLASSES = _classes("V4")


@given(_virtual(V4_CLASSES), _virtual(V4_CLASSES), _virtual(V4_CLASSES))
def test_composition_associative(f, g, h):
    assert compose(compose(f, g), h) == compose(f, compose(g, h))


@given(_virtual(V4_CLASSES), _virtual(V4_CLASSES))
def test_length_and_opposite_laws(f, g):
    fg = compose(f, g)
    assert length(fg) == length(f) * length(g)
    assert opposite(fg) == compose(opposite(g), opposite(f))


@given(st.lists(st.tuples(st.sampled_from(catalog_group("C2xC4").subgroups()), st.integers(-2, 2)), max_size=3),
       st.lists(st.tuples(st.sampled_from(catalog_group("C2xC4").subgroups()), st.integers(-2, 2)), max_size=3))
def test_diagonal_embedding_multiplicative(a, b):
    P = catalog_group("C2xC4")
    s = sum((PSetElement.s(P, q, k) for q, k in a), PSetElement(P))
    t = sum((PSetElement.s(P, q, k) for q, k in b), PSetElement(P))
    assert m_of_pset(burnside_multiply(s, t)) == compose(m_of_pset(s), m_of_pset(t))
    assert act(m_of_pset(s), t) == burnside_multiply(s, t)


def test_fixed_point_count_helper():
    P = catalog_group("C3")
    u = diagonal(P, range(3))
    assert fixed_point_count(u.members, u) == 3
