from __future__ import annotations

import pytest

from artifact.basic import (all_pp_classes, frobenius_condition, fusion_from_element, is_basic,
                            minimal_hecke_of, two_map_failures, weighted_sum_failures)
from artifact.bisets import BisetClass, DomainError, VirtualBiset, act, burnside_multiply, diagonal
from artifact.bisets import PSetElement
from artifact.catalog import P_GROUPS, catalog_systems
from artifact.fusion import inner_fusion
from artifact.groups import catalog_group
from artifact.hecke import characteristic_idempotent

SYSTEMS = dict(catalog_systems())


def _same(A, B) -> bool:
    return all({h.img for h in A.homs(q)} == {h.img for h in B.homs(q)} for q in A.subgroups())


@pytest.mark.parametrize("label", sorted(SYSTEMS))
def test_idempotent_recovers_the_system(label):
    F = SYSTEMS[label]
    w = characteristic_idempotent(F).biset
    assert _same(fusion_from_element(w, F.p), F)
    assert _same(minimal_hecke_of(w, F.p).fusion, F)
    assert frobenius_condition(w)
    assert not two_map_failures(w)
    assert is_basic(w, F.p).basic


# twice the idempotent is basic exactly when 2 is prime to p
@pytest.mark.parametrize("label", sorted(SYSTEMS))
def test_twice_idempotent(label):
    F = SYSTEMS[label]
    rep = is_basic(characteristic_idempotent(F).biset.scale(2), F.p)
    assert rep.basic == (F.p != 2)
    assert rep.length == 2


def test_s3_report_fields():
    F = SYSTEMS["S3:3"]
    rep = is_basic(characteristic_idempotent(F).biset.scale(2), 3)
    assert rep.basic and rep.self_opposite and rep.frobenius and rep.fusion_equal
    assert rep.two_map_ok and rep.weighted_sum_ok
    assert rep.to_json()["length"] == "2"


@pytest.mark.parametrize("name", P_GROUPS)
def test_unit_gives_inner_system(name):
    P = catalog_group(name)
    p = next(d for d in range(2, 9) if P.order % d == 0)
    unit = VirtualBiset.of(diagonal(P, range(P.order)))
    assert _same(fusion_from_element(unit, p), inner_fusion(P, p))


def _frobenius_by_definition(f) -> bool:
    P = f.left
    subs = [PSetElement.s(P, q) for q in P.subgroups()]
    return all(act(f, burnside_multiply(act(f, s), t)) == burnside_multiply(act(f, s), act(f, t))
               for s in subs for t in subs)


def test_non_frobenius_class_on_v4():
    # the class moving one noncentral order-2 subgroup onto another
    P = catalog_group("V4")
    bad = BisetClass.of(P, P, (0, 6))
    f = VirtualBiset.of(bad)
    assert not frobenius_condition(f)
    assert not _frobenius_by_definition(f)


@pytest.mark.parametrize("name", ["C2", "V4", "C4"])
def test_frobenius_condition_matches_definition(name):
    P = catalog_group(name)
    for c in all_pp_classes(P):
        f = VirtualBiset.of(c)
        assert frobenius_condition(f) == _frobenius_by_definition(f)


def test_weighted_sum_holds_for_idempotents():
    for label in ("S3:3", "S4:2", "A4:2"):
        F = SYSTEMS[label]
        assert weighted_sum_failures(characteristic_idempotent(F).biset, F.p) == []


def test_non_projective_rejected():
    P = catalog_group("C2")
    with pytest.raises(DomainError):
        is_basic(VirtualBiset.of(BisetClass.of(P, P, range(4))))
