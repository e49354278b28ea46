"""Fusion systems attached to a biset, minimal Hecke closures, and basic elements."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .bisets import (BisetClass, DomainError, PSetElement, VirtualBiset, act, burnside_multiply, compose,
                     delta, delta2, diagonal, length, opposite, res_class, scalar_product)
from .fusion import FusionSystem
from .groups import FiniteGroup, Hom, identity_hom, injective_homs
from .linalg import is_p_local, is_p_unit


def _prime_of(P: FiniteGroup) -> int:
    n = P.order
    for d in range(2, n + 1):
        if n % d == 0:
            return d
    raise DomainError("the trivial group has no prime")


@lru_cache(maxsize=None)
def _all_pp(P: FiniteGroup) -> tuple[BisetClass, ...]:
    out = set()
    for q in P.subgroups():
        for phi in injective_homs(P, q, P):
            out.add(delta(P, P, phi))
    return tuple(sorted(out, key=lambda c: (len(c.members), c.members)))


def all_pp_classes(P: FiniteGroup) -> tuple[BisetClass, ...]:
    """Every class ``Δ_φ(Q)`` with ``φ: Q → P`` injective."""
    return _all_pp(P)


def _require_pp(f: VirtualBiset) -> FiniteGroup:
    if f.left is not f.right:
        raise DomainError("element must live over P x P")
    if not f.is_pp():
        raise DomainError("element must be projective on both sides")
    return f.left


def fusion_from_element(f: VirtualBiset, p: int | None = None) -> FusionSystem:
    """``F^f``: injective ``φ`` with ``res_φ·f = res_ι·f`` and ``res_φ·f° = res_ι·f°``."""
    P = _require_pp(f)
    p = p or _prime_of(P)
    fo = opposite(f)
    homsets = {}
    for q in P.subgroups():
        iota = VirtualBiset.of(res_class(identity_hom(q), P, P))
        base, base_o = compose(iota, f), compose(iota, fo)
        keep = []
        for phi in injective_homs(P, q, P):
            r = VirtualBiset.of(res_class(phi, P, P))
            if compose(r, f) == base and compose(r, fo) == base_o:
                keep.append(phi)
        homsets[q] = keep
    return FusionSystem(P, p, homsets, name="F^f")


@dataclass
class MinimalHecke:
    classes: frozenset[BisetClass]
    fusion: FusionSystem
    rounds: int


def minimal_hecke_of(f: VirtualBiset, p: int | None = None) -> MinimalHecke:
    """Closure of the classes meeting ``f`` under products, opposites and subconjugation."""
    P = _require_pp(f)
    p = p or _prime_of(P)
    universe = all_pp_classes(P)
    current = set()
    for c in universe:
        if scalar_product(VirtualBiset.of(c), f) != 0:
            current.add(c)
    for q in P.subgroups():
        current.add(diagonal(P, q))
    rounds = 0
    while True:
        rounds += 1
        new = set()
        for c in current:
            new.add(c.opposite())
        for a in current:
            for b in current:
                for k in compose(VirtualBiset.of(a), VirtualBiset.of(b)).coeffs:
                    new.add(k)
        for c in universe:
            if c not in current and any(c.ctx.fixed_points(c.members, e.members) for e in current):
                new.add(c)
        for c in new:
            if not c.is_pp:
                raise DomainError("closure left the projective classes")
        new -= current
        if not new:
            break
        current |= new
    homsets = {}
    for q in P.subgroups():
        homsets[q] = [phi for phi in injective_homs(P, q, P) if delta(P, P, phi) in current]
    return MinimalHecke(frozenset(current), FusionSystem(P, p, homsets, name="F_H_f"), rounds)


def frobenius_condition(f: VirtualBiset) -> bool:
    """``f(f(s)·s') = f(s)·f(s')`` for ``s, s'`` running over the transitive P-sets."""
    P = _require_pp(f)
    basis = [PSetElement.s(P, c[0]) for c in P.subgroup_classes()]
    images = [act(f, s) for s in basis]
    for fs in images:
        for s2, fs2 in zip(basis, images):
            if act(f, burnside_multiply(fs, s2)) != burnside_multiply(fs, fs2):
                return False
    return True


def f_iota(P: FiniteGroup, phi: Hom) -> VirtualBiset:
    """``f_{ι,φ}``: the class of ``{(u, φ(u))}``."""
    return VirtualBiset.of(delta2(P, P, identity_hom(phi.src), phi))


def two_map_failures(f: VirtualBiset, limit: int | None = None) -> list[dict]:
    """Instances ``(Q, φ, φ')`` where ``|f_{ι,φ},f|·|f_{ι,φ'},f| ≠ |f_{φ',φ},f|·|f_{ι,φ'},f|``."""
    P = _require_pp(f)
    out = []
    for q in P.subgroups():
        homs = injective_homs(P, q, P)
        vals = {h: scalar_product(f_iota(P, h), f) for h in homs}
        for a in homs:
            for b in homs:
                lhs = vals[a] * vals[b]
                rhs = scalar_product(VirtualBiset.of(delta2(P, P, b, a)), f) * vals[b]
                if lhs != rhs:
                    out.append({"subgroup": sorted(q), "phi": list(a.img), "phi2": list(b.img)})
                    if limit and len(out) >= limit:
                        return out
    return out


def weighted_sum_failures(f: VirtualBiset, p: int | None = None, hf: MinimalHecke | None = None) -> list[dict]:
    """Subgroups where the centralizer-weighted sum is not congruent to ``ℓ(f)`` modulo p."""
    P = _require_pp(f)
    p = p or _prime_of(P)
    hf = hf or minimal_hecke_of(f, p)
    F = hf.fusion
    ell = length(f)
    out = []
    for q in P.subgroups():
        total = Fraction(0)
        for orb in F.exterior_quotient(q):
            phi = orb[0]
            total += scalar_product(f_iota(P, phi), f) / len(P.centralizer(phi.image))
        diff = total - ell
        if diff and not (is_p_local(diff, p) and diff.numerator % p == 0):
            out.append({"subgroup": sorted(q), "sum": str(total), "length": str(ell)})
    return out


@dataclass
class BasicReport:
    length: Fraction
    length_prime_to_p: bool
    fusion_equal: bool
    contains: bool
    self_opposite: bool
    frobenius: bool
    two_map_ok: bool
    weighted_sum_ok: bool
    basic: bool
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in self.__dict__.items()}


def is_basic(f: VirtualBiset, p: int | None = None) -> BasicReport:
    """``ℓ(f)`` prime to p and ``F^f ⊇ F_{H_f}``; the report also evaluates the sufficiency hypotheses."""
    P = _require_pp(f)
    p = p or _prime_of(P)
    ell = length(f)
    ff = fusion_from_element(f, p)
    hf = minimal_hecke_of(f, p)
    contains = all(ff.contains(h) for q in P.subgroups() for h in hf.fusion.homs(q))
    equal = all({h.img for h in ff.homs(q)} == {h.img for h in hf.fusion.homs(q)} for q in P.subgroups())
    frob = frobenius_condition(f)
    cor = two_map_failures(f, limit=1) if frob else []
    lem = weighted_sum_failures(f, p, hf)
    unit = is_p_unit(ell, p)
    return BasicReport(ell, unit, equal, contains, opposite(f) == f, frob, not cor, not lem,
                       unit and contains,
                       {"hecke_classes": len(hf.classes), "two_map": cor, "weighted_sum": lem})
