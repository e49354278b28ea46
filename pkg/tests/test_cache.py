from __future__ import annotations

import json
import logging

import pytest

from artifact.cache import (Cache, CacheMismatch, cached_fix_matrix, cached_lattice, canonical_json, digest,
                            group_digest, lattice_payload)
from artifact.catalog import parse_fusion
from artifact.groups import FiniteGroup, catalog_group
from artifact.hecke import HeckeBasis


def _fresh(name):
    G = catalog_group(name)
    return FiniteGroup(G.name, G.table, check=False)


def test_canonical_json_is_order_independent():
    assert canonical_json({"b": 1, "a": [1, 2]}) == canonical_json({"a": [1, 2], "b": 1})
    assert digest({"b": 1, "a": 2}) == digest({"a": 2, "b": 1})


def test_disabled_cache_is_inert(tmp_path):
    c = Cache(None)
    c.put("k", 1)
    assert c.get("k") is None and not c.enabled


def test_roundtrip_and_counters(tmp_path):
    c = Cache(tmp_path)
    assert c.get("k") is None and c.misses == 1
    c.put("k", {"x": [1, 2]})
    assert c.get("k") == {"x": [1, 2]} and c.hits == 1
    assert not list(tmp_path.glob("*.tmp"))


def test_corrupt_entry_is_recomputed(tmp_path, caplog):
    c = Cache(tmp_path)
    c.put("k", [1, 2, 3])
    path = next(tmp_path.glob("*.json"))
    entry = json.loads(path.read_text())
    entry["value"] = [9, 9, 9]
    path.write_text(json.dumps(entry))
    with caplog.at_level(logging.WARNING, logger="artifact.cache"):
        assert c.through("k", lambda: [1, 2, 3]) == [1, 2, 3]
    assert c.corrupt == 1 and "corrupt" in caplog.text
    assert c.get("k") == [1, 2, 3]
    path.write_text("{not json")
    assert c.get("k") is None


def test_consistent_but_wrong_entry_is_caught_by_verification(tmp_path):
    c = Cache(tmp_path)
    c.put("k", [1])
    c2 = Cache(tmp_path)
    # rewrite with a valid digest but a wrong value
    c2.put("k", [2])
    assert c.through("k", lambda: [1]) == [2]
    with pytest.raises(CacheMismatch):
        c.through("k", lambda: [1], verify=True)


def test_lattice_cache_roundtrip(tmp_path):
    c = Cache(tmp_path)
    G = _fresh("S4")
    cached_lattice(c, G)
    H = _fresh("S4")
    cached_lattice(c, H, verify=True)
    assert "_subgroup_data" in H.__dict__
    assert H.subgroups() == G.subgroups()
    assert lattice_payload(H) == lattice_payload(G)
    assert group_digest(G) == group_digest(H)


def test_lattice_mismatch_detected(tmp_path):
    c = Cache(tmp_path)
    G = _fresh("D8")
    payload = lattice_payload(G)
    payload["subgroups"] = payload["subgroups"][:-1]
    payload["class_rep"] = payload["class_rep"][:-1]
    c.put(f"lattice:{group_digest(G)}", payload)
    with pytest.raises(CacheMismatch):
        cached_lattice(c, _fresh("D8"), verify=True)


def test_fix_matrix_cache(tmp_path):
    c = Cache(tmp_path)
    F = parse_fusion("S4:2")
    B1 = HeckeBasis(F)
    cached_fix_matrix(c, B1)
    B2 = HeckeBasis(F)
    cached_fix_matrix(c, B2, verify=True)
    assert B2.fix_matrix == B1.fix_matrix
