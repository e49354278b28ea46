"""Essential subgroups, irreducible classes, exchangeability and Alperin-type chains."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .bisets import BisetClass, VirtualBiset, compose, delta, scalar_product
from .fusion import FusionSystem
from .groups import LIMITS, FiniteGroup, GroupError, Hom, identity_hom


def _key(s: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(s))


def _memo(F: FusionSystem, name: str) -> dict:
    return F.__dict__.setdefault(name, {})


# ----------------------------------------------------------------------------
# automizers as abstract groups


@dataclass
class Automizer:
    """``F̃(Q) = F(Q)/Inn(Q)`` with a Cayley table over coset ids (identity coset is 0)."""

    q: frozenset[int]
    group: FiniteGroup
    cosets: list[list[Hom]]
    lookup: dict[tuple[int, ...], int]

    def element_of(self, alpha: Hom) -> int:
        return self.lookup[alpha.img]

    def subgroup_of(self, homs: Iterable[Hom]) -> frozenset[int]:
        return self.group.generate({self.element_of(h) for h in homs})


def automizer(F: FusionSystem, q: Iterable[int]) -> Automizer:
    q = frozenset(q)
    memo = _memo(F, "_automizers")
    if q in memo:
        return memo[q]
    cosets = F.out_autos(q)
    LIMITS.check(len(cosets), "automizer")
    lookup = {a.img: i for i, coset in enumerate(cosets) for a in coset}
    n = len(cosets)
    # product ab means "apply b, then a"
    table = [[lookup[cosets[j][0].then(cosets[i][0]).img] for j in range(n)] for i in range(n)]
    grp = FiniteGroup(f"Out_F({len(q)})", table)
    memo[q] = Automizer(q, grp, cosets, lookup)
    return memo[q]


def p_automizer(F: FusionSystem, q: Iterable[int]) -> frozenset[int]:
    """``F̃_P(Q)`` inside ``F̃(Q)``."""
    aut = automizer(F, q)
    return aut.subgroup_of(F.p_autos(q))


def twisted_p_automizer(F: FusionSystem, phi: Hom) -> frozenset[int]:
    """``^{φ*}F̃_P(φ(Q))``: ``φ* ∘ κ_v ∘ φ`` for ``v ∈ N_P(φ(Q))``."""
    P = F.base
    r = phi.image
    inv = phi.inverse()
    aut = automizer(F, phi.source)
    homs = [phi.then(P.conj_hom(v, r)).then(inv) for v in P.normalizer(r)]
    return aut.subgroup_of(homs)


# ----------------------------------------------------------------------------
# strongly p-embedded subgroups


def _p_divides(n: int, p: int) -> bool:
    return n % p == 0


def is_strongly_p_embedded(H: FiniteGroup, m: frozenset[int], p: int) -> bool:
    if len(m) == H.order or not _p_divides(len(m), p):
        return False
    for t in range(H.order):
        if t in m:
            continue
        if _p_divides(len(m & H.conj_set(t, m)), p):
            return False
    return True


def strongly_p_embedded(H: FiniteGroup, p: int) -> frozenset[int] | None:
    """Largest strongly p-embedded subgroup by order (least members on ties), or ``None``."""
    LIMITS.check(H.order, "automizer")
    found = [m for m in H.subgroups() if is_strongly_p_embedded(H, m, p)]
    if not found:
        return None
    return max(found, key=lambda m: (len(m), [-x for x in _key(m)]))


def minimal_strongly_embedded(H: FiniteGroup, t: frozenset[int], p: int) -> frozenset[int] | None:
    """Least subgroup containing ``t`` and the normalizer of each nontrivial p-subgroup it contains.

    Every strongly p-embedded subgroup containing ``t`` contains this one; ``None`` if it is not
    itself strongly p-embedded.
    """
    m = H.generate(t)
    while True:
        extra = set()
        for s in H.subgroups():
            if len(s) > 1 and s <= m and _is_p_group_order(len(s), p):
                extra |= H.normalizer(s)
        nxt = H.generate(m | extra)
        if nxt == m:
            break
        m = nxt
    return m if is_strongly_p_embedded(H, m, p) else None


def _is_p_group_order(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


# ----------------------------------------------------------------------------
# essential subgroups


@dataclass
class EssentialReport:
    subgroup: tuple[int, ...]
    selfcentralizing: bool
    automizer_order: int
    p_automizer_order: int
    witness: tuple[int, ...] | None
    m_tilde: tuple[int, ...] | None
    essential: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def m_tilde(F: FusionSystem, q: Iterable[int]) -> frozenset[int] | None:
    """``M̃_F(P,Q)``: the least strongly p-embedded subgroup of ``F̃(Q)`` containing ``F̃_P(Q)``."""
    q = frozenset(q)
    memo = _memo(F, "_m_tilde")
    if q not in memo:
        if not F.is_selfcentralizing(q):
            memo[q] = None
        else:
            aut = automizer(F, q)
            memo[q] = minimal_strongly_embedded(aut.group, p_automizer(F, q), F.p)
    return memo[q]


def essential_report(F: FusionSystem, q: Iterable[int]) -> EssentialReport:
    q = frozenset(q)
    sc = F.is_selfcentralizing(q)
    aut = automizer(F, q)
    wit = strongly_p_embedded(aut.group, F.p) if sc else None
    mt = m_tilde(F, q) if sc else None
    return EssentialReport(_key(q), sc, aut.group.order, len(p_automizer(F, q)),
                           _key(wit) if wit is not None else None,
                           _key(mt) if mt is not None else None,
                           sc and wit is not None)


def essential_subgroups(F: FusionSystem) -> list[EssentialReport]:
    """One report per F-isomorphism class, computed at a fully normalized member."""
    out = []
    for cls in F.classes:
        q = min((s for s in cls if F.is_fully_normalized(s)), key=_key)
        out.append(essential_report(F, q))
    return out


def is_essential(F: FusionSystem, q: Iterable[int]) -> bool:
    q = frozenset(q)
    if not F.is_selfcentralizing(q):
        return False
    return strongly_p_embedded(automizer(F, q).group, F.p) is not None


# ----------------------------------------------------------------------------
# irreducibility and exchangeability


def is_irreducible(F: FusionSystem, q: Iterable[int], phi: Hom | None = None) -> bool:
    """Essential source and ``M̃_F(P,Q) ⊉ ^{φ*}F̃_P(φ(Q))``."""
    q = frozenset(q)
    phi = phi or identity_hom(q)
    if len(q) == F.base.order or not is_essential(F, q):
        return False
    mt = m_tilde(F, q)
    if mt is None:
        raise GroupError("essential subgroup without a strongly p-embedded subgroup over its P-automizer")
    return not twisted_p_automizer(F, phi) <= mt


def class_is_irreducible(F: FusionSystem, c: BisetClass) -> bool:
    q, phi = c.as_pp()
    return is_irreducible(F, q, phi)


def _conj_sub(H: FiniteGroup, m: frozenset[int], t: int) -> frozenset[int]:
    """``M^t = t⁻¹ M t``."""
    return H.conj_set(H.inv[t], m)


def are_exchangeable(F: FusionSystem, q: Iterable[int], phi: Hom, tau: Hom) -> bool:
    """Exchangeability of the irreducible classes of ``φ`` and ``ι∘τ`` for ``τ ∈ F(Q)``.

    The test ``M̃^τ̃ ⊇ ^{φ*}F̃_P(φ(Q))`` is evaluated over all representatives of both classes,
    i.e. ``τ̃`` and ``φ`` are allowed to move by ``F̃_P(Q)`` on either side.
    """
    q = frozenset(q)
    if not (is_irreducible(F, q, phi) and is_irreducible(F, q, tau)):
        raise GroupError("both classes must be irreducible")
    aut = automizer(F, q)
    H = aut.group
    mt = m_tilde(F, q)
    fp = p_automizer(F, q)
    t0 = aut.element_of(tau)
    target = twisted_p_automizer(F, phi)
    for a in fp:
        for b in fp:
            t = H.mul(H.mul(a, t0), b)
            if t in mt:
                continue
            for c in fp:
                if H.conj_set(H.inv[c], target) <= _conj_sub(H, mt, t):
                    return True
    return False


# ----------------------------------------------------------------------------
# classes of H_F and reduction oracles


def hecke_classes(F: FusionSystem) -> list[BisetClass]:
    memo = _memo(F, "_hecke_classes")
    if "all" not in memo:
        out = set()
        for q in F.subgroups():
            for phi in F.homs(q):
                out.add(delta(F.base, F.base, phi))
        memo["all"] = sorted(out, key=lambda c: (len(c.members), c.members))
    return memo["all"]


def _constituent_closure(seed: set[BisetClass]) -> set[BisetClass]:
    current = set(seed)
    frontier = set(seed)
    while frontier:
        new = set()
        for a in current:
            for b in frontier:
                for x, y in ((a, b), (b, a)):
                    new.update(compose(VirtualBiset.of(x), VirtualBiset.of(y)).coeffs)
        frontier = new - current
        current |= frontier
    return current


def reducible_closure(F: FusionSystem, order: int) -> set[BisetClass]:
    """Constituents of compositions of ``H_F`` classes over subgroups of order ``> order``."""
    memo = _memo(F, "_reducible_closure")
    if order not in memo:
        seed = {c for c in hecke_classes(F) if len(c.members) > order}
        memo[order] = _constituent_closure(seed)
    return memo[order]


def is_irreducible_oracle(F: FusionSystem, c: BisetClass) -> bool:
    """Blind test: no constituent of a composition over larger subgroups receives ``c``."""
    if len(c.members) == F.base.order:
        return False
    return not any(c.ctx.fixed_points(c.members, e.members) for e in reducible_closure(F, len(c.members)))


def reducible_hecke_classes(F: FusionSystem) -> list[BisetClass]:
    return [c for c in hecke_classes(F) if not class_is_irreducible(F, c)]


def exchangeable_oracle(F: FusionSystem, c1: BisetClass, c2: BisetClass) -> bool:
    """Search for reducible ``f, g`` with ``|c2, f∘c1∘g| ≠ 0``."""
    red = reducible_hecke_classes(F)
    target = VirtualBiset.of(c2)
    mid = VirtualBiset.of(c1)
    for f in red:
        left = compose(VirtualBiset.of(f), mid)
        for g in red:
            if scalar_product(target, compose(left, VirtualBiset.of(g))) != 0:
                return True
    return False


def exchangeable_by_theta(F: FusionSystem, c1: BisetClass, c2: BisetClass) -> bool:
    """Search for ``θ: Q ≅ Q'`` making the two comparison classes reducible members of ``H_F``."""
    P = F.base
    q, phi = c1.as_pp()
    q2, phi2 = c2.as_pp()
    if len(q) != len(q2):
        return False
    from .groups import injective_homs
    inv_phi = phi.inverse()
    known = set(hecke_classes(F))
    for theta in injective_homs(P, q, P):
        if theta.image != q2:
            continue
        a = inv_phi.then(theta).then(phi2)
        b = theta.inverse()
        ca, cb = delta(P, P, a), delta(P, P, b)
        if ca in known and cb in known and not class_is_irreducible(F, ca) and not class_is_irreducible(F, cb):
            return True
    return False


def exchange_classes(F: FusionSystem) -> list[list[BisetClass]]:
    """Exchangeability classes of irreducible ``H_F`` classes, each sorted, least member first."""
    irr = [c for c in hecke_classes(F) if class_is_irreducible(F, c)]
    groups: list[list[BisetClass]] = []
    for c in irr:
        for g in groups:
            if exchangeable_by_theta(F, g[0], c):
                g.append(c)
                break
        else:
            groups.append([c])
    return groups


def exchange_transversal(F: FusionSystem) -> list[BisetClass]:
    return [g[0] for g in exchange_classes(F)]


# ----------------------------------------------------------------------------
# chains


@dataclass
class ChainLink:
    """``f_{Q_i,φ_i}`` together with the F̃-morphism ``ψ_i: Q → Q_i``."""

    subgroup: frozenset[int]
    phi: Hom
    psi: Hom
    kind: str = ""

    def to_json(self) -> dict:
        return {"subgroup": _key(self.subgroup), "phi": list(self.phi.img), "psi": list(self.psi.img),
                "kind": self.kind}


def _moves_from_classes(classes: Iterable[BisetClass], kind: str) -> list[tuple[frozenset[int], Hom, str]]:
    out = []
    for c in classes:
        r, psi = c.as_pp()
        out.append((r, psi, kind))
    return out


def _bfs(F: FusionSystem, q: frozenset[int], phi: Hom,
         moves: list[tuple[frozenset[int], Hom, str]], min_length: int = 1) -> list[ChainLink] | None:
    P = F.base
    goal = F.tilde_key(phi)
    start = identity_hom(q)
    # state: tilde key of φ_{i-1}∘ψ_{i-1}; the empty chain corresponds to ι_Q
    parents: dict[tuple, tuple] = {}
    queue = deque([(F.tilde_key(start), start, 0)])
    seen = {(F.tilde_key(start), 0)}
    while queue:
        key, chi, depth = queue.popleft()
        if depth >= min_length and key == goal:
            chain = []
            node = (key, depth)
            while node in parents:
                prev, link = parents[node]
                chain.append(link)
                node = prev
            return list(reversed(chain))
        for r, psi, kind in moves:
            for v in range(P.order):
                moved = F.conj(v, chi)
                if not moved.image <= r:
                    continue
                nxt = moved.then(psi)
                nkey = F.tilde_key(nxt)
                ndepth = min(depth + 1, min_length)
                if (nkey, ndepth) in seen:
                    continue
                seen.add((nkey, ndepth))
                parents[(nkey, ndepth)] = ((key, depth), ChainLink(r, psi, moved, kind))
                queue.append((nkey, nxt, ndepth))
    return None


def reduction_chain(F: FusionSystem, q: Iterable[int], phi: Hom) -> list[ChainLink] | None:
    """A chain through ``H_F`` classes over strictly larger subgroups ending at ``φ̃``, if any."""
    q = frozenset(q)
    P = F.base
    moves = []
    for r in P.subgroups():
        if len(r) > len(q):
            for psi in F.tilde_reps(r):
                moves.append((r, psi, "larger"))
    return _bfs(F, q, phi, moves)


def alperin_decompose(F: FusionSystem, q: Iterable[int], phi: Hom | None = None) -> list[ChainLink]:
    """A chain for ``f_{Q,φ}`` whose members are automorphisms of ``P`` or lie in the transversal."""
    q = frozenset(q)
    phi = phi or identity_hom(q)
    if not F.contains(phi):
        raise GroupError("morphism is not in F")
    full = frozenset(range(F.base.order))
    moves = [(full, coset[0], "automorphism") for coset in F.out_autos(full)]
    moves += _moves_from_classes(exchange_transversal(F), "transversal")
    chain = _bfs(F, q, phi, moves)
    if chain is None:
        raise GroupError("no decomposition found; the system is not saturated")
    return chain


def verify_chain(F: FusionSystem, q: Iterable[int], phi: Hom, chain: list[ChainLink]) -> bool:
    """Chain equalities in ``F̃`` and a nonzero scalar product against the composite."""
    P = F.base
    q = frozenset(q)
    if not chain:
        return False
    tk = F.tilde_key
    if tk(chain[0].psi) != tk(identity_hom(q)):
        return False
    for prev, cur in zip(chain, chain[1:]):
        if tk(prev.psi.then(prev.phi)) != tk(cur.psi):
            return False
    last = chain[-1]
    if tk(last.psi.then(last.phi)) != tk(phi):
        return False
    for link in chain:
        if not link.psi.image <= link.subgroup or not F.contains(link.phi):
            return False
    total = VirtualBiset.of(delta(P, P, chain[0].phi))
    for link in chain[1:]:
        total = compose(VirtualBiset.of(delta(P, P, link.phi)), total)
    return scalar_product(VirtualBiset.of(delta(P, P, phi)), total) != 0
