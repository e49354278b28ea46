from __future__ import annotations

import json

import pytest
from hypothesis import given, strategies as st

from artifact.groups import (CATALOG_NAMES, LIMITS, FiniteGroup, GroupError, Hom, Limits, ResourceLimitError,
                             catalog_group, direct_product, identity_hom, injective_homs, is_p_group, parse_group,
                             sylow_subgroups)

# (order, number of subgroups, number of conjugacy classes of subgroups), counted by brute force
SUBGROUP_COUNTS = {
    "C2": (2, 2, 2), "C3": (3, 2, 2), "C4": (4, 3, 3), "V4": (4, 5, 5), "C2xC4": (8, 8, 8),
    "D8": (8, 10, 8), "Q8": (8, 6, 6), "S3": (6, 6, 4), "S4": (24, 30, 11), "A4": (12, 10, 5),
    "GL32": (168, 179, 15),
}


def _brute_subgroups(G: FiniteGroup) -> set[frozenset[int]]:
    """Every subset closed under multiplication, found by closing all subsets of generators of size ≤ 2."""
    out = set()
    for a in range(G.order):
        for b in range(G.order):
            out.add(G.generate([a, b]))
    for s in list(out):
        for c in range(G.order):
            out.add(G.generate(list(s) + [c]))
    return out


@pytest.mark.parametrize("name", sorted(SUBGROUP_COUNTS))
def test_catalog_subgroup_counts(name):
    G = catalog_group(name)
    assert (G.order, len(G.subgroups()), len(G.subgroup_classes())) == SUBGROUP_COUNTS[name]


@pytest.mark.parametrize("name", ["C4", "V4", "D8", "Q8", "S3", "S4", "A4"])
def test_subgroups_match_generator_closure(name):
    G = catalog_group(name)
    assert set(G.subgroups()) == _brute_subgroups(G)


def test_catalog_names_cover_counts():
    assert set(CATALOG_NAMES) == set(SUBGROUP_COUNTS)


@pytest.mark.parametrize("name", ["D8", "S4", "GL32"])
def test_identity_is_zero_and_inverses(name):
    G = catalog_group(name)
    assert all(G.mul(0, x) == x == G.mul(x, 0) for x in G.elements)
    assert all(G.mul(x, G.inv[x]) == 0 for x in G.elements)


@given(st.sampled_from(["D8", "Q8", "S4", "A4"]), st.data())
def test_associativity(name, data):
    G = catalog_group(name)
    x, y, z = (data.draw(st.integers(0, G.order - 1)) for _ in range(3))
    assert G.mul(G.mul(x, y), z) == G.mul(x, G.mul(y, z))


def test_centers_and_normalizers():
    assert len(catalog_group("D8").center()) == 2
    assert len(catalog_group("Q8").center()) == 2
    assert len(catalog_group("S4").center()) == 1
    S4 = catalog_group("S4")
    P = sylow_subgroups(S4, 2)[0]
    assert S4.normalizer(P) == P


def test_sylow_counts():
    S4 = catalog_group("S4")
    assert len(sylow_subgroups(S4, 2)) == 3
    assert len(sylow_subgroups(S4, 3)) == 4
    assert len(sylow_subgroups(catalog_group("GL32"), 7)) == 8


def test_double_cosets_partition():
    S4 = catalog_group("S4")
    P = sylow_subgroups(S4, 2)[0]
    reps = S4.double_coset_reps(P, P)
    cosets = [S4.double_coset(P, r, P) for r in reps]
    assert len(reps) == 2
    assert sum(len(c) for c in cosets) == 24
    assert frozenset().union(*cosets) == frozenset(range(24))


def test_hom_composition_order():
    D8 = catalog_group("D8")
    q = D8.subgroups()[-1]
    g, h = 1, 2
    a, b = D8.conj_hom(g, q), D8.conj_hom(h, q)
    ab = a.then(b)
    assert all(ab(u) == b(a(u)) for u in q)
    assert a.then(a.inverse()) == identity_hom(a.src)


def test_injective_homs_of_v4():
    V4 = catalog_group("V4")
    full = frozenset(range(4))
    assert len(injective_homs(V4, full, V4)) == 6


def test_direct_product_order_and_p_group():
    G = direct_product(catalog_group("C2"), catalog_group("C3"))
    assert G.order == 6 and G.is_abelian()
    assert is_p_group(catalog_group("D8"), 2) and not is_p_group(G, 2)


def test_invalid_tables_rejected():
    with pytest.raises(GroupError):
        FiniteGroup("bad", [[0, 1], [1, 1]])
    with pytest.raises(GroupError):
        FiniteGroup("bad", [[1, 0], [0, 1]])
    with pytest.raises(GroupError):
        FiniteGroup("nonassoc", [[0, 1, 2], [1, 0, 1], [2, 2, 0]])


def test_parse_group_forms(tmp_path):
    assert parse_group("S3").order == 6
    table = [[(a + b) % 3 for b in range(3)] for a in range(3)]
    lit = json.dumps({"name": "Z3", "table": table})
    assert parse_group(lit).order == 3
    path = tmp_path / "g.json"
    path.write_text(lit)
    assert parse_group(str(path)).order == 3
    with pytest.raises(GroupError):
        parse_group("NoSuchGroup")
    with pytest.raises(GroupError):
        parse_group("{not json")


def test_resource_guard():
    small = Limits(max_group_order=10, max_product_order=50)
    small.check(10)
    with pytest.raises(ResourceLimitError):
        small.check(11)
    with pytest.raises(ResourceLimitError):
        small.check(51, product=True)
    assert LIMITS.max_group_order >= 168


def test_hom_from_dict_roundtrip():
    h = Hom.from_dict({0: 0, 1: 3, 2: 2, 3: 1})
    assert h.table == {0: 0, 1: 3, 2: 2, 3: 1}
    assert h.is_injective()
