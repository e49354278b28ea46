"""Finite groups given by explicit multiplication data.

Elements are the integers ``0..n-1``; ``0`` is always the identity.  Subgroups
are frozensets of element ids, homomorphisms are :class:`Hom` values.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

Subgroup = frozenset


class GroupError(ValueError):
    """Malformed group data or a violated precondition."""


class ResourceLimitError(RuntimeError):
    """An exhaustive enumeration would exceed the configured guard."""


@dataclass
class Limits:
    max_group_order: int = 384
    max_product_order: int = 4096

    def check(self, order: int, what: str = "group", product: bool = False) -> None:
        bound = self.max_product_order if product else self.max_group_order
        if order > bound:
            raise ResourceLimitError(f"{what} of order {order} exceeds guard {bound}")


LIMITS = Limits()


@dataclass(frozen=True)
class Hom:
    """Injective-or-not homomorphism given by its graph on a subgroup."""

    src: tuple[int, ...]
    img: tuple[int, ...]

    @staticmethod
    def from_dict(d: dict[int, int]) -> Hom:
        keys = tuple(sorted(d))
        return Hom(keys, tuple(d[k] for k in keys))

    @cached_property
    def table(self) -> dict[int, int]:
        return dict(zip(self.src, self.img))

    def __call__(self, x: int) -> int:
        return self.table[x]

    @property
    def source(self) -> frozenset[int]:
        return frozenset(self.src)

    @cached_property
    def image(self) -> frozenset[int]:
        return frozenset(self.img)

    def is_injective(self) -> bool:
        return len(self.image) == len(self.src)

    def restrict(self, sub: Iterable[int]) -> Hom:
        t = self.table
        return Hom.from_dict({x: t[x] for x in sub})

    def then(self, other: Hom) -> Hom:
        """``other ∘ self`` (apply ``self`` first)."""
        t = other.table
        return Hom(self.src, tuple(t[y] for y in self.img))

    def inverse(self) -> Hom:
        """Inverse of the induced isomorphism onto the image."""
        return Hom.from_dict({y: x for x, y in zip(self.src, self.img)})

    def key(self) -> tuple:
        return (self.src, self.img)


def identity_hom(sub: Iterable[int]) -> Hom:
    s = tuple(sorted(sub))
    return Hom(s, s)


class FiniteGroup:
    """A finite group with a Cayley table over ids ``0..n-1`` (identity ``0``)."""

    def __init__(self, name: str, table: Sequence[Sequence[int]], *, check: bool = True,
                 perms: Sequence[tuple[int, ...]] | None = None):
        n = len(table)
        LIMITS.check(n, f"group {name}")
        self.name = name
        self.table: tuple[tuple[int, ...], ...] = tuple(tuple(r) for r in table)
        self.order = n
        self.perms = tuple(perms) if perms is not None else None
        if check:
            self._validate()
        self.inv: tuple[int, ...] = tuple(
            next(y for y in range(n) if self.table[x][y] == 0) for x in range(n))

    # construction -----------------------------------------------------------

    def _validate(self) -> None:
        n, t = self.order, self.table
        if n == 0 or any(len(r) != n for r in t):
            raise GroupError(f"{self.name}: table is not square")
        if any(not 0 <= v < n for r in t for v in r):
            raise GroupError(f"{self.name}: table entry out of range")
        if t[0] != tuple(range(n)) or any(t[x][0] != x for x in range(n)):
            raise GroupError(f"{self.name}: element 0 is not a two-sided identity")
        for x in range(n):
            if len(set(t[x])) != n or len({t[y][x] for y in range(n)}) != n:
                raise GroupError(f"{self.name}: table is not a Latin square")
        # Light's test: associativity needs checking only against generators.
        for g in self._table_generators():
            for x in range(n):
                xg = t[x][g]
                row = t[xg]
                tx = t[x]
                tg = t[g]
                for y in range(n):
                    if row[y] != tx[tg[y]]:
                        raise GroupError(f"{self.name}: table is not associative")

    def _table_generators(self) -> list[int]:
        gens: list[int] = []
        span: frozenset[int] = frozenset({0})
        for x in range(self.order):
            if x not in span:
                gens.append(x)
                span = self._closure_raw(gens)
        return gens

    def _closure_raw(self, gens: Iterable[int]) -> frozenset[int]:
        t = self.table
        gens = list(gens)
        seen = {0}
        todo = deque([0])
        while todo:
            x = todo.popleft()
            for g in gens:
                y = t[x][g]
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        return frozenset(seen)

    @classmethod
    def from_permutations(cls, name: str, generators: Sequence[Sequence[int]]) -> FiniteGroup:
        gens = [tuple(g) for g in generators]
        if not gens:
            raise GroupError(f"{name}: no generators")
        degree = len(gens[0])
        for g in gens:
            if len(g) != degree or sorted(g) != list(range(degree)):
                raise GroupError(f"{name}: generator {list(g)} is not a permutation of 0..{degree - 1}")
        ident = tuple(range(degree))
        seen = {ident}
        todo = deque([ident])
        while todo:
            x = todo.popleft()
            for g in gens:
                y = tuple(x[g[i]] for i in range(degree))
                if y not in seen:
                    seen.add(y)
                    LIMITS.check(len(seen), f"group {name}")
                    todo.append(y)
        elems = sorted(seen)
        index = {e: i for i, e in enumerate(elems)}
        # product xy = x∘y: apply y first
        table = [[index[tuple(x[y[i]] for i in range(degree))] for y in elems] for x in elems]
        return cls(name, table, check=False, perms=elems)

    @classmethod
    def from_json(cls, data: dict | str) -> FiniteGroup:
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as exc:
                raise GroupError(f"malformed group JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise GroupError("group JSON must be an object")
        name = str(data.get("name", "G"))
        if "table" in data:
            return cls(name, data["table"])
        if "generators" in data:
            gens = data["generators"]
            degree = data.get("degree")
            if degree is not None and any(len(g) != degree for g in gens):
                raise GroupError(f"{name}: generator length differs from degree {degree}")
            return cls.from_permutations(name, gens)
        raise GroupError("group JSON needs 'table' or 'generators'")

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name!r}, order={self.order})"

    # arithmetic -------------------------------------------------------------

    def mul(self, x: int, y: int) -> int:
        return self.table[x][y]

    def conj(self, g: int, x: int) -> int:
        """``g x g⁻¹``."""
        t = self.table
        return t[t[g][x]][self.inv[g]]

    def conj_set(self, g: int, sub: Iterable[int]) -> frozenset[int]:
        """``gQg⁻¹``."""
        t, gi = self.table, self.inv[g]
        return frozenset(t[t[g][x]][gi] for x in sub)

    def element_order(self, x: int) -> int:
        k, y = 1, x
        while y != 0:
            y = self.table[y][x]
            k += 1
        return k

    @cached_property
    def elements(self) -> range:
        return range(self.order)

    def is_abelian(self) -> bool:
        t = self.table
        return all(t[x][y] == t[y][x] for x in range(self.order) for y in range(x))

    # subgroups --------------------------------------------------------------

    def generate(self, gens: Iterable[int]) -> frozenset[int]:
        return self._closure_raw(gens)

    def is_subgroup(self, sub: Iterable[int]) -> bool:
        s = frozenset(sub)
        if 0 not in s:
            return False
        t = self.table
        return all(t[x][y] in s for x in s for y in s)

    @cached_property
    def _subgroup_data(self) -> tuple[tuple[frozenset[int], ...], dict[frozenset[int], frozenset[int]]]:
        LIMITS.check(self.order, f"subgroup lattice of {self.name}", product=True)
        cyclic = {self.generate([x]) for x in range(self.order)}
        found = set(cyclic)
        frontier = set(cyclic)
        while frontier:
            new = set()
            for a in frontier:
                for c in cyclic:
                    if c <= a:
                        continue
                    j = self.generate(sorted(a | c))
                    if j not in found:
                        new.add(j)
            found |= new
            frontier = new
        subs = tuple(sorted(found, key=lambda s: (len(s), sorted(s))))
        rep: dict[frozenset[int], frozenset[int]] = {}
        for s in subs:
            if s in rep:
                continue
            orbit = {self.conj_set(g, s) for g in range(self.order)}
            r = min(orbit, key=sorted)
            for o in orbit:
                rep[o] = r
        return subs, rep

    def subgroups(self) -> tuple[frozenset[int], ...]:
        """Every subgroup once, sorted by (order, member list)."""
        return self._subgroup_data[0]

    def subgroup_class_rep(self, sub: frozenset[int]) -> frozenset[int]:
        """Minimal (by member list) conjugate of ``sub``."""
        return self._subgroup_data[1][frozenset(sub)]

    def subgroup_classes(self) -> list[list[frozenset[int]]]:
        """Conjugacy classes of subgroups, each sorted, ordered by representative."""
        classes: dict[frozenset[int], list[frozenset[int]]] = {}
        for s in self.subgroups():
            classes.setdefault(self.subgroup_class_rep(s), []).append(s)
        reps = sorted(classes, key=lambda s: (len(s), sorted(s)))
        return [classes[r] for r in reps]

    def normalizer(self, sub: Iterable[int], within: Iterable[int] | None = None) -> frozenset[int]:
        s = frozenset(sub)
        amb = range(self.order) if within is None else within
        return frozenset(g for g in amb if self.conj_set(g, s) == s)

    def centralizer(self, sub: Iterable[int], within: Iterable[int] | None = None) -> frozenset[int]:
        s = list(sub)
        t = self.table
        amb = range(self.order) if within is None else within
        return frozenset(g for g in amb if all(t[g][x] == t[x][g] for x in s))

    def center(self) -> frozenset[int]:
        return self.centralizer(range(self.order))

    def double_coset_reps(self, h: Iterable[int], k: Iterable[int],
                          within: Iterable[int] | None = None) -> list[int]:
        """Minimal representative of each double coset ``HgK`` (g in ``within``)."""
        h, k = sorted(h), sorted(k)
        t = self.table
        amb = sorted(range(self.order) if within is None else within)
        covered: set[int] = set()
        reps = []
        for g in amb:
            if g in covered:
                continue
            reps.append(g)
            for a in h:
                ag = t[a][g]
                for b in k:
                    covered.add(t[ag][b])
        return reps

    def double_coset(self, h: Iterable[int], g: int, k: Iterable[int]) -> frozenset[int]:
        t = self.table
        return frozenset(t[t[a][g]][b] for a in h for b in k)

    def left_coset_reps(self, sub: Iterable[int], within: Iterable[int] | None = None) -> list[int]:
        """Minimal representative of each left coset ``gH``."""
        return self.double_coset_reps([0], sub, within)

    # homomorphisms ----------------------------------------------------------

    def conj_hom(self, g: int, sub: Iterable[int]) -> Hom:
        """``u ↦ g u g⁻¹`` on ``sub``."""
        return Hom.from_dict({u: self.conj(g, u) for u in sub})

    def min_generators(self, sub: Iterable[int]) -> list[int]:
        """Greedy generating set: repeatedly add the smallest missing element."""
        s = sorted(sub)
        gens: list[int] = []
        span = frozenset({0})
        while len(span) < len(s):
            x = next(x for x in s if x not in span)
            gens.append(x)
            span = self.generate(gens)
        return gens

    def word_tree(self, gens: Sequence[int]) -> list[tuple[int, int, int]]:
        """BFS spanning tree ``(x, parent, generator_index)`` with ``x = parent·gen``."""
        t = self.table
        tree = []
        seen = {0}
        todo = deque([0])
        while todo:
            x = todo.popleft()
            for i, g in enumerate(gens):
                y = t[x][g]
                if y not in seen:
                    seen.add(y)
                    tree.append((y, x, i))
                    todo.append(y)
        return tree

    def subgroup_group(self, sub: Iterable[int], name: str | None = None) -> tuple[FiniteGroup, list[int]]:
        """The subgroup as a standalone group, relabelled in increasing id order.

        Returns the group and the list mapping new ids to old ids.  The result
        is cached, so equal subgroups always give the same group object.
        """
        key = frozenset(sub)
        cache = self.__dict__.setdefault("_subgroup_groups", {})
        if key not in cache:
            cache[key] = self._make_subgroup_group(key, name)
        return cache[key]

    def _make_subgroup_group(self, sub: frozenset[int], name: str | None) -> tuple[FiniteGroup, list[int]]:
        members = sorted(sub)
        index = {x: i for i, x in enumerate(members)}
        t = self.table
        table = [[index[t[x][y]] for y in members] for x in members]
        perms = None if self.perms is None else [self.perms[x] for x in members]
        label = name or f"{self.name}<{','.join(map(str, members))}>"
        g = FiniteGroup(label, table, check=False, perms=perms)
        return g, members


def homs_into(src_group: FiniteGroup, sub: Iterable[int], target: FiniteGroup,
              injective: bool = True) -> list[Hom]:
    """All (injective) homomorphisms from ``sub ≤ src_group`` into ``target``."""
    sub = frozenset(sub)
    if injective and len(sub) > target.order:
        return []
    if target.order % len(sub) and injective:
        return []
    gens = src_group.min_generators(sub)
    tree = src_group.word_tree(gens)
    orders = [src_group.element_order(g) for g in gens]
    cands = [[y for y in range(target.order) if orders[i] % target.element_order(y) == 0
              and (not injective or target.element_order(y) == orders[i])]
             for i in range(len(gens))]
    st, tt = src_group.table, target.table
    out: list[Hom] = []

    def extend(images: list[int]) -> None:
        if len(images) < len(gens):
            for y in cands[len(images)]:
                extend(images + [y])
            return
        f = {0: 0}
        for x, parent, i in tree:
            f[x] = tt[f[parent]][images[i]]
        for x in sub:
            for g, y in zip(gens, images):
                if f[st[x][g]] != tt[f[x]][y]:
                    return
        h = Hom.from_dict(f)
        if injective and not h.is_injective():
            return
        out.append(h)

    extend([])
    out.sort(key=lambda h: h.img)
    return out


def injective_homs(src_group: FiniteGroup, sub: Iterable[int], target: FiniteGroup) -> list[Hom]:
    return homs_into(src_group, sub, target, injective=True)


def is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, int(p ** 0.5) + 1))


def p_part(n: int, p: int) -> int:
    q = 1
    while n % p == 0:
        n //= p
        q *= p
    return q


def is_p_group(g: FiniteGroup, p: int) -> bool:
    return p_part(g.order, p) == g.order


def sylow_subgroups(g: FiniteGroup, p: int) -> list[frozenset[int]]:
    target = p_part(g.order, p)
    return [s for s in g.subgroups() if len(s) == target]


# direct products ------------------------------------------------------------

def direct_product(a: FiniteGroup, b: FiniteGroup) -> FiniteGroup:
    """``A×B`` with ids ``i·|B| + j`` for the pair ``(i, j)``."""
    na, nb = a.order, b.order
    LIMITS.check(na * nb, f"direct product {a.name}x{b.name}", product=True)
    ta, tb = a.table, b.table
    table = [[ta[x // nb][y // nb] * nb + tb[x % nb][y % nb] for y in range(na * nb)]
             for x in range(na * nb)]
    g = FiniteGroup(f"{a.name}x{b.name}", table, check=False)
    g.factors = (a, b)  # type: ignore[attr-defined]
    return g


# catalog --------------------------------------------------------------------

def _quaternion_table() -> list[list[int]]:
    # elements as (sign, unit) with units 1,i,j,k; id = 4*(sign<0) + unit
    unit_mul = {
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
        (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
    }

    def dec(x: int) -> tuple[int, int]:
        return (-1 if x >= 4 else 1), x % 4

    table = []
    for x in range(8):
        sx, ux = dec(x)
        row = []
        for y in range(8):
            sy, uy = dec(y)
            s, u = unit_mul[(ux, uy)]
            s *= sx * sy
            row.append(u + (4 if s < 0 else 0))
        table.append(row)
    return table


_CATALOG_PERMS: dict[str, list[list[int]]] = {
    "C2": [[1, 0]],
    "C3": [[1, 2, 0]],
    "C4": [[1, 2, 3, 0]],
    "V4": [[1, 0, 3, 2], [2, 3, 0, 1]],
    "C2xC4": [[1, 0, 2, 3, 4, 5], [0, 1, 3, 4, 5, 2]],
    "D8": [[1, 2, 3, 0], [2, 1, 0, 3]],
    "S3": [[1, 0, 2], [1, 2, 0]],
    "S4": [[1, 0, 2, 3], [1, 2, 3, 0]],
    "A4": [[1, 0, 3, 2], [1, 2, 0, 3]],
}



def _gl32_perms() -> list[list[int]]:
    """Two generators of GL(3,2) acting on the seven nonzero vectors of F_2^3 (vector v is id v-1)."""
    def act(m: Sequence[Sequence[int]]) -> list[int]:
        out = []
        for v in range(1, 8):
            bits = [(v >> k) & 1 for k in range(3)]
            img = [sum(m[r][c] * bits[c] for c in range(3)) % 2 for r in range(3)]
            out.append(sum(b << k for k, b in enumerate(img)) - 1)
        return out
    transvection = [[1, 1, 0], [0, 1, 0], [0, 0, 1]]
    cycle = [[0, 0, 1], [1, 0, 0], [0, 1, 0]]
    return [act(transvection), act(cycle)]


_CATALOG_PERMS["GL32"] = _gl32_perms()

TRIVIAL_GROUP = FiniteGroup("1", [[0]])

CATALOG_NAMES = ("C2", "C3", "C4", "V4", "C2xC4", "D8", "Q8", "S3", "S4", "A4", "GL32")

_catalog_cache: dict[str, FiniteGroup] = {}


def catalog_group(name: str) -> FiniteGroup:
    if name not in CATALOG_NAMES:
        raise GroupError(f"unknown catalog group {name!r}; known: {', '.join(CATALOG_NAMES)}")
    if name not in _catalog_cache:
        if name == "Q8":
            _catalog_cache[name] = FiniteGroup("Q8", _quaternion_table())
        else:
            _catalog_cache[name] = FiniteGroup.from_permutations(name, _CATALOG_PERMS[name])
    return _catalog_cache[name]


def parse_group(spec: str) -> FiniteGroup:
    """A catalog name, a JSON literal, or a path to a JSON file."""
    if spec in CATALOG_NAMES:
        return catalog_group(spec)
    text = spec
    if not spec.lstrip().startswith("{"):
        try:
            with open(spec, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise GroupError(f"{spec!r} is neither a catalog name nor a readable file") from exc
    return FiniteGroup.from_json(text)
