from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from artifact.group_hecke import (GroupHeckeAlgebra, TransporterSum, all_objects, comparison_constants, d_G,
                                  d_G_sum, e_T, e_T_sum, group_hecke_basis, group_hecke_multiply, ht_multiply,
                                  ht_product, is_isomorphic_search, is_maximal, maximal_object_for, object_sum,
                                  transporter_object, unit_object)
from artifact.groups import GroupError, catalog_group, sylow_subgroups
from artifact.oracles import double_coset_constants, maximal_objects_oracle

PAIRS = [("S3", 3), ("S3", 2), ("S4", 2), ("S4", 3), ("A4", 2), ("A4", 3), ("GL32", 2), ("GL32", 7)]

# structure constants c[i][j] = coefficients of h_i h_j, frozen from double-coset counting
CONSTANTS = {
    ("S3", 3): [[(1, 0), (0, 1)], [(0, 1), (1, 0)]],
    ("S3", 2): [[(1, 0), (0, 1)], [(0, 1), (2, 1)]],
    ("S4", 2): [[(1, 0), (0, 1)], [(0, 1), (2, 1)]],
    ("A4", 3): [[(1, 0), (0, 1)], [(0, 1), (3, 2)]],
    ("A4", 2): [[(1, 0, 0), (0, 1, 0), (0, 0, 1)], [(0, 1, 0), (0, 0, 1), (1, 0, 0)],
                [(0, 0, 1), (1, 0, 0), (0, 1, 0)]],
}
RANKS = {("S3", 3): 2, ("S3", 2): 2, ("S4", 2): 2, ("S4", 3): 4, ("A4", 2): 3, ("A4", 3): 2, ("GL32", 2): 6,
         ("GL32", 7): 6}


def _algebra(name, p):
    G = catalog_group(name)
    return GroupHeckeAlgebra(G, sylow_subgroups(G, p)[0])


_ALGEBRAS = {pair: _algebra(*pair) for pair in PAIRS}


@pytest.mark.parametrize("pair", PAIRS)
def test_rank_and_counting_oracle(pair):
    A = _ALGEBRAS[pair]
    assert A.rank == RANKS[pair] == len(group_hecke_basis(A.G, A.P))
    reps, counted = double_coset_constants(A.G, A.P)
    assert reps == A.reps
    direct = A.structure_constants()
    for i in range(A.rank):
        for j in range(A.rank):
            assert tuple(Fraction(x) for x in direct[i][j]) == tuple(counted[i][j])


@pytest.mark.parametrize("pair", sorted(CONSTANTS))
def test_constants_frozen(pair):
    assert [[tuple(c) for c in row] for row in _ALGEBRAS[pair].structure_constants()] == CONSTANTS[pair]


def test_transposition_squares_to_unit():
    A = _ALGEBRAS[("S3", 3)]
    t = A.reps[1]
    assert group_hecke_multiply(A.h(t), A.h(t)) == A.one()


@pytest.mark.parametrize("pair", [("S3", 3), ("S4", 2), ("A4", 2), ("S4", 3)])
def test_comparison_through_transporters(pair):
    A = _ALGEBRAS[pair]
    direct = A.structure_constants()
    via = comparison_constants(A)
    for i in range(A.rank):
        for j in range(A.rank):
            assert tuple(Fraction(x) for x in direct[i][j]) == via[i][j]


@pytest.mark.parametrize("pair", [("S3", 3), ("S4", 2), ("A4", 2)])
@given(st.data())
def test_multiplication_associative(pair, data):
    A = _ALGEBRAS[pair]
    vec = st.lists(st.integers(-3, 3), min_size=A.rank, max_size=A.rank).map(
        lambda v: A.element(dict(enumerate(v))))
    a, b, c = data.draw(vec), data.draw(vec), data.draw(vec)
    assert (a @ b) @ c == a @ (b @ c)
    assert A.one() @ a == a == a @ A.one()


def test_group_algebra_roundtrip():
    A = _ALGEBRAS[("S4", 2)]
    for i in range(A.rank):
        e = A.basis_element(i)
        assert A.from_group_algebra(A.group_algebra_vector(e)) == e


def test_retraction_example_in_s3():
    A = _ALGEBRAS[("S3", 3)]
    t = A.reps[1]
    o = transporter_object(A, [0], t, 0)
    r = e_T(o)
    assert r.coefficient == 3
    assert r.target == maximal_object_for(A, t)
    assert is_maximal(r.target) and not is_maximal(o)


def test_d_g_alone_is_not_multiplicative():
    # over the trivial subgroup, the object with transporter t squares to three copies of the trivial object
    A = _ALGEBRAS[("S3", 3)]
    t = A.reps[1]
    o = transporter_object(A, [0], t, 0)
    square = ht_product(o, o)
    assert len(square) == 3 and all(s.sub == (0,) for s in square)
    lhs = d_G_sum(A, TransporterSum.of([(s, 1) for s in square]))
    assert lhs == A.h(0).scale(3)
    assert d_G(o) @ d_G(o) == A.one()
    assert d_G_sum(A, e_T_sum(ht_multiply(object_sum(o), object_sum(o)))) == \
        d_G_sum(A, e_T_sum(object_sum(o))) @ d_G_sum(A, e_T_sum(object_sum(o)))


@pytest.mark.parametrize("pair", [("S3", 3), ("S4", 2), ("A4", 2), ("S4", 3)])
def test_retraction_idempotent_and_maximal(pair):
    A = _ALGEBRAS[pair]
    for o in all_objects(A):
        r = e_T(o)
        again = e_T(r.target)
        assert again.target == r.target and again.coefficient == 1
        assert maximal_objects_oracle(A, o) == {r.target}


@pytest.mark.parametrize("pair", [("S3", 3), ("S4", 2)])
def test_canonical_form_matches_isomorphism_search(pair):
    A = _ALGEBRAS[pair]
    objs = all_objects(A)
    for a in objs:
        for b in objs:
            assert (a == b) == is_isomorphic_search(a, b)


def test_unit_object():
    A = _ALGEBRAS[("S4", 2)]
    u = unit_object(A)
    assert ht_product(u, u) == [u]
    assert d_G(u) == A.one()


def test_invalid_inputs():
    G = catalog_group("S4")
    with pytest.raises(GroupError):
        GroupHeckeAlgebra(G, sylow_subgroups(G, 3)[0], p=2)
    with pytest.raises(GroupError):
        GroupHeckeAlgebra(G, [0, 1, 2])
    A = _ALGEBRAS[("S3", 3)]
    with pytest.raises(GroupError):
        transporter_object(A, [0, 1], 0, 0)


def test_objects_from_different_algebras_rejected():
    a = unit_object(_ALGEBRAS[("S3", 3)])
    b = unit_object(_ALGEBRAS[("S3", 2)])
    with pytest.raises(GroupError):
        ht_product(a, b)
