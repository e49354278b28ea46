"""Content-addressed JSON cache for subgroup lattices and fixed-point tables."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Callable

from .groups import FiniteGroup

log = logging.getLogger("artifact.cache")

CACHE_ENV = "ARTIFACT_CACHE_DIR"
FORMAT_VERSION = 1


class CacheMismatch(RuntimeError):
    """A cached value differs from a fresh recomputation."""


def canonical_json(value: Any) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"))


def digest(value: Any) -> str:
    return hashlib.sha256(canonical_json(value).encode()).hexdigest()


def group_digest(G: FiniteGroup) -> str:
    return digest([list(r) for r in G.table])


class Cache:
    """One JSON file per key; writes go through a temporary file and an atomic rename."""

    def __init__(self, root: str | Path | None):
        self.root = Path(root) if root else None
        self.hits = self.misses = self.corrupt = 0

    @property
    def enabled(self) -> bool:
        return self.root is not None

    def _path(self, key: str) -> Path:
        assert self.root is not None
        return self.root / f"{digest(key)}.json"

    def get(self, key: str) -> Any | None:
        if not self.enabled:
            return None
        path = self._path(key)
        if not path.exists():
            self.misses += 1
            return None
        try:
            entry = json.loads(path.read_text(encoding="utf-8"))
            ok = (entry.get("key") == key and entry.get("version") == FORMAT_VERSION
                  and entry.get("digest") == digest(entry.get("value")))
        except (OSError, ValueError, AttributeError):
            ok = False
        if not ok:
            self.corrupt += 1
            log.warning("cache entry for %s is corrupt; recomputing", key)
            return None
        self.hits += 1
        return entry["value"]

    def put(self, key: str, value: Any) -> None:
        if not self.enabled:
            return
        assert self.root is not None
        self.root.mkdir(parents=True, exist_ok=True)
        entry = {"key": key, "version": FORMAT_VERSION, "digest": digest(value), "value": value}
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(canonical_json(entry))
        os.replace(tmp, self._path(key))

    def through(self, key: str, compute: Callable[[], Any], verify: bool = False) -> Any:
        """Cached value for ``key``; with ``verify`` a hit is recomputed and must be identical."""
        value = self.get(key)
        if value is None:
            value = compute()
            self.put(key, value)
            return value
        if verify and canonical_json(compute()) != canonical_json(value):
            raise CacheMismatch(f"cached value for {key} differs from recomputation")
        return value


# payloads -------------------------------------------------------------------------

def lattice_payload(G: FiniteGroup) -> dict:
    subs = G.subgroups()
    index = {s: i for i, s in enumerate(subs)}
    return {"subgroups": [sorted(s) for s in subs], "class_rep": [index[G.subgroup_class_rep(s)] for s in subs]}


def install_lattice(G: FiniteGroup, payload: dict) -> None:
    subs = tuple(frozenset(s) for s in payload["subgroups"])
    rep = {s: subs[r] for s, r in zip(subs, payload["class_rep"])}
    G.__dict__["_subgroup_data"] = (subs, rep)


def cached_lattice(cache: Cache, G: FiniteGroup, verify: bool = False) -> None:
    """Seed ``G``'s subgroup lattice from the cache, computing and storing it on a miss."""
    if not cache.enabled:
        return
    key = f"lattice:{group_digest(G)}"
    stored = cache.get(key)
    if stored is None:
        cache.put(key, lattice_payload(G))
        return
    if verify:
        fresh = FiniteGroup(G.name, G.table, check=False)
        if canonical_json(lattice_payload(fresh)) != canonical_json(stored):
            raise CacheMismatch(f"cached lattice of {G.name} differs from recomputation")
    if "_subgroup_data" not in G.__dict__:
        install_lattice(G, stored)


def cached_fix_matrix(cache: Cache, basis, verify: bool = False) -> None:
    """Seed a Hecke basis's fixed-point table from the cache."""
    P = basis.P
    labels = [list(el.cls.members) for el in basis.elements]
    key = f"fix:{group_digest(P)}:{digest(labels)}"
    if not cache.enabled:
        return
    stored = cache.get(key)
    if stored is None:
        cache.put(key, basis.fix_matrix)
        return
    if verify:
        fresh = [[basis.fix(i, j) for j in range(basis.rank)] for i in range(basis.rank)]
        if fresh != stored:
            raise CacheMismatch("cached fixed-point table differs from recomputation")
    basis.__dict__["fix_matrix"] = stored
