from __future__ import annotations

import pytest

from artifact.catalog import GROUP_SYSTEMS, catalog_systems, group_system, nonsaturated_example, parse_fusion
from artifact.fusion import (diagonal_normalization_failures, exterior_counts, fusion_of_group, generated_fusion,
                             inner_fusion, product_fusion)
from artifact.groups import GroupError, Hom, catalog_group, sylow_subgroups

SYSTEMS = dict(catalog_systems())
GROUP_LABELS = [f"{n}:{p}" for n, p in GROUP_SYSTEMS]


def _transporter_orbits(F, q) -> int:
    """``|P \\ T_G(Q, P) / C_G(Q)|`` counted directly in the ambient group."""
    G, members = F.ambient
    sylow = set(members)
    qg = [members[x] for x in q]
    trans = {g for g in range(G.order) if all(G.conj(g, x) in sylow for x in qg)}
    cent = [c for c in range(G.order) if all(G.mul(c, x) == G.mul(x, c) for x in qg)]
    seen, orbits = set(), 0
    for g in trans:
        if g in seen:
            continue
        orbits += 1
        for u in members:
            for c in cent:
                seen.add(G.mul(G.mul(u, g), c))
    return orbits


@pytest.mark.parametrize("label", GROUP_LABELS)
def test_homs_match_conjugation_in_ambient_group(label):
    F = SYSTEMS[label]
    G, members = F.ambient
    sylow = set(members)
    back = {x: i for i, x in enumerate(members)}
    for q in F.subgroups():
        qs = sorted(q)
        expected = set()
        for g in range(G.order):
            imgs = [G.conj(g, members[x]) for x in qs]
            if all(y in sylow for y in imgs):
                expected.add(tuple(back[y] for y in imgs))
        assert {h.img for h in F.homs(q)} == expected


@pytest.mark.parametrize("label", GROUP_LABELS)
def test_exterior_quotient_size_matches_double_cosets(label):
    F = SYSTEMS[label]
    for q in F.subgroups():
        assert len(F.exterior_quotient(q)) == _transporter_orbits(F, q)


@pytest.mark.parametrize("label", sorted(SYSTEMS))
def test_catalog_systems_are_frobenius_and_divisible(label):
    F = SYSTEMS[label]
    assert F.is_frobenius().ok
    assert F.is_divisible() == (True, "")


def test_nonsaturated_example_fails_extension_axiom():
    F = nonsaturated_example()
    rep = F.is_frobenius()
    assert not rep.ok and rep.axiom == "extension"
    assert F.is_divisible()[0]
    assert F.report()["witness"]["axiom"] == "extension"


def test_sylow_axiom_failure_is_reported():
    # swapping two generators of V4 gives an automorphism group of order 2, while Inn(V4) is trivial
    P = catalog_group("V4")
    swap = Hom((0, 1, 2, 3), (0, 2, 1, 3))
    F = generated_fusion(P, 2, [swap])
    rep = F.is_frobenius()
    assert not rep.ok and rep.axiom == "sylow"


def test_inner_fusion_has_only_conjugations():
    P = catalog_group("D8")
    F = inner_fusion(P, 2)
    for q in F.subgroups():
        assert {h.img for h in F.homs(q)} == {h.img for h in F.inner_homs(q)}


# |F̃(P,Q)| on S4 with P = D8, frozen from the double-coset count above
S4_TILDE = {(0,): 1, (0, 1): 1, (0, 2): 1, (0, 3): 2, (0, 4): 2, (0, 7): 2, (0, 1, 2, 3): 1, (0, 3, 4, 7): 3,
            (0, 3, 5, 6): 1, tuple(range(8)): 1}


def test_s4_exterior_counts_frozen():
    F = SYSTEMS["S4:2"]
    got = {tuple(sorted(q)): exterior_counts(F, q).total for q in F.subgroups()}
    assert got == S4_TILDE
    v = exterior_counts(F, (0, 3, 4, 7))
    assert (v.fully_centralized, v.fully_normalized, v.weighted_sum) == (3, 3, 3)


@pytest.mark.parametrize("label", sorted(SYSTEMS))
def test_exterior_counts_prime_to_p(label):
    F = SYSTEMS[label]
    for q in F.subgroups():
        c = exterior_counts(F, q)
        assert c.total == len(F.exterior_quotient(q))
        assert c.fully_centralized % F.p and c.fully_normalized % F.p
        if c.source_fully_normalized:
            assert c.weighted_sum.denominator == 1 and c.weighted_sum.numerator % F.p


@pytest.mark.parametrize("label", ["S3:3", "S3:2", "A4:3"])
def test_diagonals_of_fully_normalized_subgroups(label):
    assert diagonal_normalization_failures(SYSTEMS[label]) == []


def test_product_system_requires_ambient_group():
    with pytest.raises(GroupError):
        product_fusion(nonsaturated_example())


def test_product_system_order():
    FF, pm = product_fusion(SYSTEMS["S3:3"])
    assert FF.base.order == 9 and sorted(pm) == list(range(9))


def test_fully_normalized_and_selfcentralizing_in_s4():
    F = SYSTEMS["S4:2"]
    sc = {tuple(sorted(q)) for q in F.subgroups() if F.is_selfcentralizing(q)}
    assert sc == {(0, 1, 2, 3), (0, 3, 4, 7), (0, 3, 5, 6), tuple(range(8))}
    assert not F.is_fully_normalized((0, 4))


def test_n_phi_for_an_outer_automorphism_of_v4():
    F = SYSTEMS["S4:2"]
    v = frozenset((0, 3, 4, 7))
    for phi in F.autos(v):
        n = F.n_phi(phi)
        assert v <= n
        assert F.extensions(phi, n)


def test_invalid_sylow_rejected():
    G = catalog_group("S4")
    with pytest.raises(GroupError):
        fusion_of_group(G, sylow_subgroups(G, 3)[0], 2)
    with pytest.raises(GroupError):
        fusion_of_group(G, sylow_subgroups(G, 2)[0], 4)
    with pytest.raises(GroupError):
        parse_fusion("S4")
    with pytest.raises(GroupError):
        group_system("S3", 5)
