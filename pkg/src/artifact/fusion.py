"""Fusion systems on a p-group: morphism sets, exterior quotients, saturation."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable

from .groups import FiniteGroup, GroupError, Hom, direct_product, identity_hom, is_prime, p_part

Sub = frozenset


def _key(s: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(s))


@dataclass
class SaturationReport:
    ok: bool
    axiom: str = ""
    subgroup: tuple[int, ...] = ()
    morphism: tuple[int, ...] = ()
    detail: str = ""


class FusionSystem:
    """Injective morphisms ``Q → P`` for every subgroup ``Q`` of a p-group ``P``."""

    def __init__(self, base: FiniteGroup, p: int, homsets: dict[frozenset[int], Iterable[Hom]],
                 name: str = "F"):
        if not is_prime(p) or p_part(base.order, p) != base.order:
            raise GroupError(f"{base.name} is not a {p}-group")
        self.base, self.p, self.name = base, p, name
        self._homs: dict[frozenset[int], tuple[Hom, ...]] = {
            frozenset(q): tuple(sorted(set(hs), key=lambda h: h.img)) for q, hs in homsets.items()}
        for q in base.subgroups():
            if q not in self._homs:
                raise GroupError(f"missing morphism set for subgroup {_key(q)}")
        self._keys = {q: {h.img for h in hs} for q, hs in self._homs.items()}
        self.ambient: tuple[FiniteGroup, list[int]] | None = None

    def __repr__(self) -> str:
        return f"FusionSystem({self.name}, p={self.p})"

    # morphisms --------------------------------------------------------------

    @property
    def P(self) -> FiniteGroup:
        return self.base

    def subgroups(self) -> tuple[frozenset[int], ...]:
        return self.base.subgroups()

    def homs(self, q: Iterable[int]) -> tuple[Hom, ...]:
        return self._homs[frozenset(q)]

    def contains(self, phi: Hom) -> bool:
        return phi.img in self._keys.get(phi.source, ())

    def autos(self, q: Iterable[int]) -> list[Hom]:
        q = frozenset(q)
        return [h for h in self.homs(q) if h.image == q]

    def iso_class(self, q: Iterable[int]) -> list[frozenset[int]]:
        return sorted({h.image for h in self.homs(q)}, key=_key)

    @cached_property
    def classes(self) -> list[list[frozenset[int]]]:
        """F-isomorphism classes of subgroups, ordered by (order, least member list)."""
        seen: set[frozenset[int]] = set()
        out = []
        for q in self.subgroups():
            if q in seen:
                continue
            cls = self.iso_class(q)
            seen.update(cls)
            out.append(cls)
        return out

    def class_of(self, q: Iterable[int]) -> int:
        q = frozenset(q)
        for i, cls in enumerate(self.classes):
            if q in cls:
                return i
        raise GroupError("not a subgroup")

    def conj(self, v: int, phi: Hom) -> Hom:
        """``κ_v ∘ φ``."""
        return Hom(phi.src, tuple(self.base.conj(v, y) for y in phi.img))

    def inner_homs(self, q: Iterable[int]) -> list[Hom]:
        """``F_P(P, Q)``: conjugations by elements of ``P`` landing in ``P``."""
        q = frozenset(q)
        return sorted({self.base.conj_hom(v, q) for v in range(self.base.order)}, key=lambda h: h.img)

    # exterior quotient --------------------------------------------------------

    def tilde_key(self, phi: Hom) -> tuple[int, ...]:
        """Canonical image tuple of ``φ̃``: the least ``κ_v ∘ φ`` over ``v ∈ P``."""
        return min(self.conj(v, phi).img for v in range(self.base.order))

    def exterior_quotient(self, q: Iterable[int]) -> list[list[Hom]]:
        """Orbits of ``F(P,Q)`` under post-composition with inner automorphisms of ``P``."""
        orbits: dict[tuple[int, ...], list[Hom]] = {}
        for h in self.homs(q):
            orbits.setdefault(self.tilde_key(h), []).append(h)
        return [orbits[k] for k in sorted(orbits)]

    def tilde_reps(self, q: Iterable[int]) -> list[Hom]:
        return [orb[0] for orb in self.exterior_quotient(q)]

    def inn(self, q: Iterable[int]) -> set[tuple[int, ...]]:
        """Image tuples of the inner automorphisms ``κ_u|Q``, ``u ∈ Q``."""
        q = frozenset(q)
        return {self.base.conj_hom(u, q).img for u in q}

    def out_autos(self, q: Iterable[int]) -> list[list[Hom]]:
        """``F̃(Q) = F(Q)/Inn(Q)`` as cosets of automorphisms."""
        q = frozenset(q)
        inner = [self.base.conj_hom(u, q) for u in q]
        cosets: dict[tuple[int, ...], list[Hom]] = {}
        for a in self.autos(q):
            key = min(a.then(i).img for i in inner)
            cosets.setdefault(key, []).append(a)
        return [cosets[k] for k in sorted(cosets)]

    def p_autos(self, q: Iterable[int]) -> list[Hom]:
        """``F_P(Q)``: automorphisms induced by ``N_P(Q)``."""
        q = frozenset(q)
        return sorted({self.base.conj_hom(u, q) for u in self.base.normalizer(q)}, key=lambda h: h.img)

    # centralizers / normalizers ---------------------------------------------

    def is_fully_centralized(self, q: Iterable[int]) -> bool:
        q = frozenset(q)
        c = len(self.base.centralizer(q))
        return all(len(self.base.centralizer(h.image)) <= c for h in self.homs(q))

    def is_fully_normalized(self, q: Iterable[int]) -> bool:
        q = frozenset(q)
        n = len(self.base.normalizer(q))
        return all(len(self.base.normalizer(h.image)) <= n for h in self.homs(q))

    def is_fully_centralized_hom(self, phi: Hom) -> bool:
        return self.is_fully_centralized(phi.image)

    def is_fully_normalized_hom(self, phi: Hom) -> bool:
        return self.is_fully_normalized(phi.image)

    def is_selfcentralizing(self, q: Iterable[int]) -> bool:
        return all(self.base.centralizer(h.image) <= h.image for h in self.homs(q))

    def n_phi(self, phi: Hom) -> frozenset[int]:
        """Converse image in ``N_P(Q)`` of ``F_P(Q) ∩ ^{φ*}F_P(φ(Q))``."""
        P = self.base
        q, r = phi.source, phi.image
        phi_star = phi.inverse()
        twisted = set()
        for v in P.normalizer(r):
            kv = P.conj_hom(v, r)
            twisted.add(phi.then(kv).then(phi_star).img)
        return frozenset(u for u in P.normalizer(q) if P.conj_hom(u, q).img in twisted)

    def extensions(self, phi: Hom, over: Iterable[int]) -> list[Hom]:
        """Morphisms ``ψ ∈ F(P, over)`` with ``ψ|_Q = φ``."""
        tab = phi.table
        return [h for h in self.homs(over) if all(h(x) == y for x, y in tab.items())]

    # saturation ---------------------------------------------------------------

    def is_frobenius(self) -> SaturationReport:
        P, p = self.base, self.p
        full = frozenset(range(P.order))
        inner_p = len(self.inn(full))
        if p_part(len(self.autos(full)), p) != inner_p:
            return SaturationReport(False, "sylow", _key(full), (),
                                    f"|F(P)| = {len(self.autos(full))}, |F_P(P)| = {inner_p}")
        for q in self.subgroups():
            for phi in self.homs(q):
                if not self._centralizer_condition(phi):
                    continue
                n = self.n_phi(phi)
                if not self.extensions(phi, n):
                    return SaturationReport(False, "extension", _key(q), phi.img,
                                            f"no extension to N_phi of order {len(n)}")
        return SaturationReport(True)

    def _centralizer_condition(self, phi: Hom) -> bool:
        P = self.base
        r = phi.image
        c = P.centralizer(r)
        rc = P.generate(sorted(r | c))
        for zeta in self.homs(rc):
            if frozenset(zeta(x) for x in c) != P.centralizer(frozenset(zeta(x) for x in r)):
                return False
        return True

    def is_divisible(self) -> tuple[bool, str]:
        """Closure under restriction, inverses and composition, and containment of ``F_P``."""
        P = self.base
        for q in self.subgroups():
            homs = self.homs(q)
            for v in range(P.order):
                if not self.contains(P.conj_hom(v, q)):
                    return False, f"missing conjugation on {_key(q)}"
            for h in homs:
                if not self.contains(h.inverse()):
                    return False, f"missing inverse on {_key(q)}"
                for r in self.subgroups():
                    if r < q and not self.contains(h.restrict(r)):
                        return False, f"missing restriction {_key(q)} -> {_key(r)}"
                for g in self.homs(h.image):
                    if not self.contains(h.then(g)):
                        return False, f"missing composite on {_key(q)}"
        return True, ""

    # reporting ----------------------------------------------------------------

    def report(self) -> dict:
        sat = self.is_frobenius()
        full = frozenset(range(self.base.order))
        rows = []
        for cls in self.classes:
            q = cls[0]
            rows.append({
                "order": len(q),
                "members": [_key(s) for s in cls],
                "aut_order": len(self.autos(q)),
                "hom_count": len(self.homs(q)),
                "tilde_count": len(self.exterior_quotient(q)),
                "fully_normalized": [s == q or self.is_fully_normalized(s) for s in cls],
            })
        return {
            "name": self.name,
            "p": self.p,
            "order": self.base.order,
            "out_aut_P": len(self.out_autos(full)),
            "classes": rows,
            "frobenius": sat.ok,
            "witness": None if sat.ok else {"axiom": sat.axiom, "subgroup": list(sat.subgroup),
                                            "morphism": list(sat.morphism), "detail": sat.detail},
        }


# constructors -----------------------------------------------------------------

def sylow_group(G: FiniteGroup, sylow: Iterable[int], p: int) -> tuple[FiniteGroup, list[int]]:
    """The Sylow subgroup as a standalone group (shared with :func:`fusion_of_group`)."""
    sylow = frozenset(sylow)
    return G.subgroup_group(sylow, name=f"{G.name}_P{p}" if len(sylow) < G.order else G.name)


def fusion_of_group(G: FiniteGroup, sylow: Iterable[int], p: int, name: str | None = None) -> FusionSystem:
    """``F_G`` on a Sylow p-subgroup ``P`` of ``G`` (``P`` as a subset of ``G``)."""
    sylow = frozenset(sylow)
    if not is_prime(p):
        raise GroupError(f"{p} is not prime")
    if not G.is_subgroup(sylow) or len(sylow) != p_part(G.order, p):
        raise GroupError(f"subgroup of order {len(sylow)} is not a Sylow {p}-subgroup of {G.name}")
    P, members = sylow_group(G, sylow, p)
    to_p = {x: i for i, x in enumerate(members)}
    homsets: dict[frozenset[int], list[Hom]] = {}
    for q in P.subgroups():
        qg = [members[x] for x in sorted(q)]
        seen = {}
        for g in range(G.order):
            imgs = [G.conj(g, x) for x in qg]
            if all(y in sylow for y in imgs):
                h = Hom(tuple(sorted(q)), tuple(to_p[y] for y in imgs))
                seen[h.img] = h
        homsets[q] = list(seen.values())
    F = FusionSystem(P, p, homsets, name or f"F_{G.name}({P.name})")
    F.ambient = (G, members)
    return F


def inner_fusion(P: FiniteGroup, p: int) -> FusionSystem:
    return fusion_of_group(P, range(P.order), p, name=f"F_{P.name}")


def generated_fusion(P: FiniteGroup, p: int, extra: Iterable[Hom], name: str = "F") -> FusionSystem:
    """Smallest divisible system containing ``F_P`` and the isomorphisms ``extra``."""
    isos: set[Hom] = set()
    for q in P.subgroups():
        for v in range(P.order):
            isos.add(P.conj_hom(v, q))
    isos.update(extra)
    subs = P.subgroups()
    changed = True
    while changed:
        changed = False
        by_src: dict[frozenset[int], list[Hom]] = {}
        for h in isos:
            by_src.setdefault(h.source, []).append(h)
        new: set[Hom] = set()
        for h in isos:
            new.add(h.inverse())
            for r in subs:
                if r < h.source:
                    new.add(h.restrict(r))
            for g in by_src.get(h.image, ()):
                new.add(h.then(g))
        new -= isos
        if new:
            isos |= new
            changed = True
    homsets: dict[frozenset[int], list[Hom]] = {q: [] for q in subs}
    for h in isos:
        homsets[h.source].append(h)
    return FusionSystem(P, p, homsets, name)


def identity_on(q: Iterable[int]) -> Hom:
    return identity_hom(q)


# exterior counts and the product system ------------------------------------------

@dataclass(frozen=True)
class ExteriorCounts:
    subgroup: tuple[int, ...]
    total: int
    fully_centralized: int
    fully_normalized: int
    weighted_sum: Fraction
    source_fully_normalized: bool

    def to_json(self) -> dict:
        return {"subgroup": list(self.subgroup), "total": self.total,
                "fully_centralized": self.fully_centralized, "fully_normalized": self.fully_normalized,
                "weighted_sum": str(self.weighted_sum), "source_fully_normalized": self.source_fully_normalized}


def exterior_counts(F: FusionSystem, q: Iterable[int]) -> ExteriorCounts:
    """Sizes of ``F̃(P,Q)`` and of its parts landing on fully centralized / normalized images.

    ``weighted_sum`` is ``Σ |N̄_P(Q)| / |N̄_P(φ(Q))|`` over ``φ̃``, with ``N̄_P(R) = N_P(R)/R``.
    """
    q = frozenset(q)
    P = F.base
    nq = len(P.normalizer(q))
    reps = F.tilde_reps(q)
    fc = sum(1 for h in reps if F.is_fully_centralized(h.image))
    fn = sum(1 for h in reps if F.is_fully_normalized(h.image))
    weighted = sum((Fraction(nq, len(P.normalizer(h.image))) for h in reps), Fraction(0))
    return ExteriorCounts(_key(q), len(reps), fc, fn, weighted, F.is_fully_normalized(q))


def product_fusion(F: FusionSystem) -> tuple[FusionSystem, list[int]]:
    """``F_{G×G}`` on ``P×P`` for a group system; also returns the id map ``P×P → base``."""
    amb = getattr(F, "ambient", None)
    if amb is None:
        raise GroupError("product system needs a fusion system built from a group")
    G, members = amb
    n = G.order
    GG = direct_product(G, G)
    sylow = [a * n + b for a in members for b in members]
    FF = fusion_of_group(GG, sylow, F.p, name=f"{F.name}x{F.name}")
    _, new_to_old = GG.subgroup_group(frozenset(sylow))
    old_to_new = {x: i for i, x in enumerate(new_to_old)}
    pm = [old_to_new[members[a] * n + members[b]] for a in range(len(members)) for b in range(len(members))]
    return FF, pm


def diagonal_normalization_failures(F: FusionSystem) -> list[tuple[int, ...]]:
    """Fully normalized ``Q`` whose diagonal ``Δ(Q)`` is not fully normalized in the product system."""
    FF, pm = product_fusion(F)
    k = F.base.order
    out = []
    for q in F.subgroups():
        if F.is_fully_normalized(q):
            d = frozenset(pm[u * k + u] for u in q)
            if not FF.is_fully_normalized(d):
                out.append(_key(q))
    return out
