"""Double Burnside rings: biset classes, virtual bisets, composition, scalar products.

A transitive ``(L, R)``-biset is ``(L×R)/D`` with ``a·ω·b = (a, b⁻¹)·ω``.  A
subgroup ``D ≤ L×R`` is a frozenset of packed ids ``a·|R| + b``.  The class
``Δ_φ(Q) = {(φ(u), u)}`` stands for induction along ``φ`` after restriction
to ``Q``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .groups import TRIVIAL_GROUP, FiniteGroup, GroupError, Hom


class DomainError(ValueError):
    """An operation was applied outside its domain (e.g. non-projective class)."""


class _Undefined:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNDEFINED"

    def __bool__(self) -> bool:
        return False


UNDEFINED = _Undefined()

ScalarValue = "Fraction | _Undefined"


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_frac(s: str | int) -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    return Fraction(s)


# ----------------------------------------------------------------------------
# per-pair context: conjugation, canonical forms, fixed points


class PairContext:
    """Cached arithmetic in ``L×R`` for one ordered pair of groups."""

    def __init__(self, left: FiniteGroup, right: FiniteGroup):
        self.left, self.right = left, right
        self.nl, self.nr = left.order, right.order
        self.lconj = [[left.conj(a, x) for x in range(self.nl)] for a in range(self.nl)]
        self.rconj = [[right.conj(b, y) for y in range(self.nr)] for b in range(self.nr)]
        self._canon: dict[frozenset[int], tuple[int, ...]] = {}
        self._fix: dict[tuple[tuple[int, ...], tuple[int, ...]], int] = {}

    def pack(self, a: int, b: int) -> int:
        return a * self.nr + b

    def unpack(self, x: int) -> tuple[int, int]:
        return divmod(x, self.nr)

    def conj(self, a: int, b: int, d: Iterable[int]) -> frozenset[int]:
        """``(a,b) D (a,b)⁻¹``."""
        la, rb, nr = self.lconj[a], self.rconj[b], self.nr
        return frozenset(la[x // nr] * nr + rb[x % nr] for x in d)

    def canonical(self, d: Iterable[int]) -> tuple[int, ...]:
        d = frozenset(d)
        hit = self._canon.get(d)
        if hit is not None:
            return hit
        best = None
        orbit = set()
        for a in range(self.nl):
            for b in range(self.nr):
                c = self.conj(a, b, d)
                orbit.add(c)
                t = tuple(sorted(c))
                if best is None or t < best:
                    best = t
        for c in orbit:
            self._canon[c] = best
        return best

    def is_subgroup(self, d: Iterable[int]) -> bool:
        d = frozenset(d)
        if 0 not in d:
            return False
        tl, tr, nr = self.left.table, self.right.table, self.nr
        return all(tl[x // nr][y // nr] * nr + tr[x % nr][y % nr] in d for x in d for y in d)

    def fixed_points(self, d: Iterable[int], e: Iterable[int]) -> int:
        """Number of points of ``(L×R)/E`` fixed by ``D``."""
        dk, ek = self.canonical(d), self.canonical(e)
        key = (dk, ek)
        hit = self._fix.get(key)
        if hit is not None:
            return hit
        es = frozenset(ek)
        if (self.nl * self.nr) % len(es):
            raise GroupError("E is not a subgroup")
        count = 0
        linv, rinv = self.left.inv, self.right.inv
        for a in range(self.nl):
            for b in range(self.nr):
                # g⁻¹ D g ⊆ E with g = (a, b)
                la, rb, nr = self.lconj[linv[a]], self.rconj[rinv[b]], self.nr
                if all(la[x // nr] * nr + rb[x % nr] in es for x in dk):
                    count += 1
        value = count // len(es)
        self._fix[key] = value
        return value


_contexts: dict[tuple[int, int], PairContext] = {}


def context(left: FiniteGroup, right: FiniteGroup) -> PairContext:
    key = (id(left), id(right))
    ctx = _contexts.get(key)
    if ctx is None or ctx.left is not left or ctx.right is not right:
        ctx = PairContext(left, right)
        _contexts[key] = ctx
    return ctx


# ----------------------------------------------------------------------------
# classes


@dataclass(frozen=True)
class BisetClass:
    """Isomorphism class of a transitive biset, by its canonical stabilizer."""

    left: FiniteGroup
    right: FiniteGroup
    members: tuple[int, ...]

    @staticmethod
    def of(left: FiniteGroup, right: FiniteGroup, d: Iterable[int]) -> BisetClass:
        return BisetClass(left, right, context(left, right).canonical(d))

    @property
    def ctx(self) -> PairContext:
        return context(self.left, self.right)

    @property
    def order(self) -> int:
        return len(self.members)

    def pairs(self) -> list[tuple[int, int]]:
        return [divmod(x, self.right.order) for x in self.members]

    @property
    def is_pp(self) -> bool:
        """Both factor intersections are trivial, i.e. ``D = Δ_φ(Q)`` with ``φ`` injective."""
        lefts = [a for a, _ in self.pairs()]
        rights = [b for _, b in self.pairs()]
        n = len(self.members)
        return len(set(lefts)) == n and len(set(rights)) == n

    def as_pp(self) -> tuple[frozenset[int], Hom]:
        """``(Q, φ)`` with ``D = Δ_φ(Q)``, ``Q ≤ right`` and ``φ: Q → left``."""
        if not self.is_pp:
            raise DomainError("class is not projective on both sides")
        ps = self.pairs()
        return frozenset(b for _, b in ps), Hom.from_dict({b: a for a, b in ps})

    def opposite(self) -> BisetClass:
        nr = self.right.order
        nl = self.left.order
        return BisetClass.of(self.right, self.left, (b * nl + a for a, b in (divmod(x, nr) for x in self.members)))

    def __repr__(self) -> str:
        return f"BisetClass({self.left.name},{self.right.name},|D|={len(self.members)},{list(self.members)})"


def delta(left: FiniteGroup, right: FiniteGroup, phi: Hom) -> BisetClass:
    """Class of ``Δ_φ(Q) = {(φ(u), u)}`` for ``φ: Q → left``, ``Q ≤ right``."""
    nr = right.order
    return BisetClass.of(left, right, (phi(u) * nr + u for u in phi.src))


def delta2(left: FiniteGroup, right: FiniteGroup, phi: Hom, phi2: Hom) -> BisetClass:
    """Class of ``Δ_{φ,φ'}(Q) = {(φ(u), φ'(u))}``; ``φ, φ'`` share their source ``Q``."""
    nr = right.order
    return BisetClass.of(left, right, (phi(u) * nr + phi2(u) for u in phi.src))


def diagonal(group: FiniteGroup, sub: Iterable[int]) -> BisetClass:
    n = group.order
    return BisetClass.of(group, group, (u * n + u for u in sub))


# ----------------------------------------------------------------------------
# virtual bisets


class VirtualBiset:
    """Rational combination of biset classes over a fixed pair ``(left, right)``."""

    __slots__ = ("left", "right", "coeffs")

    def __init__(self, left: FiniteGroup, right: FiniteGroup,
                 coeffs: Mapping[BisetClass, Fraction | int] | None = None):
        self.left, self.right = left, right
        clean: dict[BisetClass, Fraction] = {}
        for k, v in (coeffs or {}).items():
            if k.left is not left or k.right is not right:
                raise GroupError("class belongs to a different group pair")
            v = Fraction(v)
            if v:
                clean[k] = clean.get(k, Fraction(0)) + v
                if not clean[k]:
                    del clean[k]
        self.coeffs = clean

    @staticmethod
    def of(cls_: BisetClass, coeff: Fraction | int = 1) -> VirtualBiset:
        return VirtualBiset(cls_.left, cls_.right, {cls_: coeff})

    @staticmethod
    def zero(left: FiniteGroup, right: FiniteGroup) -> VirtualBiset:
        return VirtualBiset(left, right, {})

    def _check(self, other: VirtualBiset) -> None:
        if self.left is not other.left or self.right is not other.right:
            raise GroupError("virtual bisets over different group pairs")

    def __add__(self, other: VirtualBiset) -> VirtualBiset:
        self._check(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + v
        return VirtualBiset(self.left, self.right, out)

    def __neg__(self) -> VirtualBiset:
        return VirtualBiset(self.left, self.right, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: VirtualBiset) -> VirtualBiset:
        return self + (-other)

    def scale(self, c: Fraction | int) -> VirtualBiset:
        c = Fraction(c)
        return VirtualBiset(self.left, self.right, {k: c * v for k, v in self.coeffs.items()})

    __rmul__ = scale

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VirtualBiset):
            return NotImplemented
        return self.left is other.left and self.right is other.right and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(frozenset(self.coeffs.items()))

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __matmul__(self, other: VirtualBiset) -> VirtualBiset:
        return compose(self, other)

    def terms(self) -> list[tuple[BisetClass, Fraction]]:
        return sorted(self.coeffs.items(), key=lambda kv: (len(kv[0].members), kv[0].members))

    def is_integral(self) -> bool:
        return all(v.denominator == 1 for v in self.coeffs.values())

    def is_p_local(self, p: int) -> bool:
        return all(v.denominator % p for v in self.coeffs.values())

    def is_positive(self) -> bool:
        return all(v > 0 for v in self.coeffs.values())

    def is_pp(self) -> bool:
        return all(k.is_pp for k in self.coeffs)

    def positive_part(self) -> VirtualBiset:
        return VirtualBiset(self.left, self.right, {k: v for k, v in self.coeffs.items() if v > 0})

    def negative_part(self) -> VirtualBiset:
        return VirtualBiset(self.left, self.right, {k: -v for k, v in self.coeffs.items() if v < 0})

    def to_json(self) -> list[dict]:
        return [{"stab": [list(p) for p in k.pairs()], "coeff": frac_str(v)} for k, v in self.terms()]

    @staticmethod
    def from_json(left: FiniteGroup, right: FiniteGroup, data: list[dict]) -> VirtualBiset:
        ctx = context(left, right)
        out: dict[BisetClass, Fraction] = {}
        for item in data:
            gens = [ctx.pack(a, b) for a, b in item["stab"]]
            d = _generate_product(ctx, gens)
            k = BisetClass(left, right, ctx.canonical(d))
            out[k] = out.get(k, Fraction(0)) + parse_frac(item["coeff"])
        return VirtualBiset(left, right, out)

    def __repr__(self) -> str:
        body = " + ".join(f"{v}*{k!r}" for k, v in self.terms())
        return f"VirtualBiset({body or '0'})"


def _generate_product(ctx: PairContext, gens: Iterable[int]) -> frozenset[int]:
    tl, tr, nr = ctx.left.table, ctx.right.table, ctx.nr
    gens = list(gens)
    seen = {0}
    todo = deque([0])
    while todo:
        x = todo.popleft()
        for g in gens:
            y = tl[x // nr][g // nr] * nr + tr[x % nr][g % nr]
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return frozenset(seen)


# ----------------------------------------------------------------------------
# explicit transitive bisets (oracle material)


class CosetSpace:
    """The explicit set ``(L×R)/D`` with left and right action tables."""

    def __init__(self, left: FiniteGroup, right: FiniteGroup, d: Iterable[int]):
        ctx = context(left, right)
        d = sorted(d)
        tl, tr, nr = left.table, right.table, ctx.nr
        n = ctx.nl * nr
        coset_of = [-1] * n
        reps: list[int] = []
        for g in range(n):
            if coset_of[g] >= 0:
                continue
            idx = len(reps)
            reps.append(g)
            ga, gb = divmod(g, nr)
            for x in d:
                coset_of[tl[ga][x // nr] * nr + tr[gb][x % nr]] = idx
        self.size = len(reps)
        rinv = right.inv
        # (a,1)·gD and gD·b = (1,b⁻¹)·gD
        self.lact = [[coset_of[tl[a][g // nr] * nr + g % nr] for g in reps] for a in range(ctx.nl)]
        self.ract = [[coset_of[(g // nr) * nr + tr[rinv[b]][g % nr]] for g in reps] for b in range(nr)]


def compose_general(c1: BisetClass, c2: BisetClass) -> dict[BisetClass, int]:
    """Orbit decomposition of the materialized set ``Ω ×_{P2} Ω'``."""
    p1, p2, p3 = c1.left, c1.right, c2.right
    if c2.left is not p2:
        raise GroupError("middle groups differ")
    om, om2 = CosetSpace(p1, p2, c1.members), CosetSpace(p2, p3, c2.members)
    m = om2.size
    total = om.size * m
    g1, g2, g3 = p1.min_generators(range(p1.order)), p2.min_generators(range(p2.order)), \
        p3.min_generators(range(p3.order))
    inv2, inv3 = p2.inv, p3.inv
    seen = [False] * total
    out: dict[BisetClass, int] = {}
    nr = p3.order
    for start in range(total):
        if seen[start]:
            continue
        seen[start] = True
        todo = [start]
        while todo:
            x = todo.pop()
            i, j = divmod(x, m)
            nbrs = [om.lact[a][i] * m + j for a in g1]
            nbrs += [om.ract[inv2[b]][i] * m + om2.lact[b][j] for b in g2]
            nbrs += [i * m + om2.ract[c][j] for c in g3]
            for y in nbrs:
                if not seen[y]:
                    seen[y] = True
                    todo.append(y)
        i0, j0 = divmod(start, m)
        stab = set()
        for b in range(p2.order):
            ib = om.ract[inv2[b]][i0]
            jb = om2.lact[b][j0]
            avals = [a for a in range(p1.order) if om.lact[a][ib] == i0]
            if not avals:
                continue
            cvals = [c for c in range(nr) if om2.ract[inv3[c]][jb] == j0]
            for a in avals:
                for c in cvals:
                    stab.add(a * nr + c)
        k = BisetClass.of(p1, p3, stab)
        out[k] = out.get(k, 0) + 1
    return out


def compose_pp(c1: BisetClass, c2: BisetClass) -> dict[BisetClass, int]:
    """Double-coset formula for two projective classes."""
    p1, p2, p3 = c1.left, c1.right, c2.right
    if c2.left is not p2:
        raise GroupError("middle groups differ")
    q, phi = c1.as_pp()
    r, psi = c2.as_pp()
    psi_r = psi.image
    t = p2.table
    out: dict[BisetClass, int] = {}
    for w in p2.double_coset_reps(q, psi_r):
        # U_w = {r : w ψ(r) w⁻¹ ∈ Q}, mapped by r ↦ φ(w ψ(r) w⁻¹)
        d = []
        for u in r:
            y = p2.conj(w, psi(u))
            if y in q:
                d.append(phi(y) * p3.order + u)
        k = BisetClass.of(p1, p3, d)
        out[k] = out.get(k, 0) + 1
    return out


_compose_memo: dict[tuple[BisetClass, BisetClass], dict[BisetClass, int]] = {}


def compose_classes(c1: BisetClass, c2: BisetClass) -> dict[BisetClass, int]:
    key = (c1, c2)
    hit = _compose_memo.get(key)
    if hit is None:
        hit = compose_pp(c1, c2) if c1.is_pp and c2.is_pp else compose_general(c1, c2)
        _compose_memo[key] = hit
    return hit


def compose(f: VirtualBiset, g: VirtualBiset) -> VirtualBiset:
    """``f ∘ g`` for ``f`` over ``(P1,P2)`` and ``g`` over ``(P2,P3)``."""
    if f.right is not g.left:
        raise GroupError("middle groups differ")
    out: dict[BisetClass, Fraction] = {}
    for k1, v1 in f.coeffs.items():
        for k2, v2 in g.coeffs.items():
            for k, m in compose_classes(k1, k2).items():
                out[k] = out.get(k, Fraction(0)) + v1 * v2 * m
    return VirtualBiset(f.left, g.right, out)


def opposite(f: VirtualBiset) -> VirtualBiset:
    return VirtualBiset(f.right, f.left, {k.opposite(): v for k, v in f.coeffs.items()})


def length(f: VirtualBiset) -> Fraction:
    """Linear extension of ``ℓ(Δ_φ(Q)) = [P:Q]``."""
    total = Fraction(0)
    for k, v in f.coeffs.items():
        if not k.is_pp:
            raise DomainError("length is defined on projective classes only")
        total += v * Fraction(k.right.order, len(k.members))
    return total


def fixed_point_count(d: Iterable[int], e: BisetClass) -> int:
    return e.ctx.fixed_points(d, e.members)


def scalar_product(f: VirtualBiset, g: VirtualBiset):
    """The partially defined rational pairing ``|f, g|``; may return :data:`UNDEFINED`."""
    f._check(g)
    if not g:
        return Fraction(0)
    if not f:
        return Fraction(1)
    if not f.is_integral():
        raise DomainError("left argument of the scalar product must be integral")

    def positive(h: VirtualBiset) -> Fraction:
        value = Fraction(1)
        for k, mult in h.coeffs.items():
            s = sum((v * fixed_point_count(k.members, e) for e, v in g.coeffs.items()), Fraction(0))
            value *= s ** int(mult)
        return value

    num = positive(f.positive_part())
    neg = f.negative_part()
    if not neg:
        return num
    den = positive(neg)
    if den == 0:
        return UNDEFINED
    return num / den


# ----------------------------------------------------------------------------
# restriction / induction along homomorphisms


def res_class(phi: Hom, target: FiniteGroup, source_ambient: FiniteGroup) -> BisetClass:
    """``res_φ`` over ``(Q, P)`` with ``D = {(u, φ(u))}``; ``Q`` is a subgroup of ``source_ambient``."""
    qg, members = source_ambient.subgroup_group(phi.src)
    idx = {x: i for i, x in enumerate(members)}
    n = target.order
    return BisetClass.of(qg, target, (idx[u] * n + phi(u) for u in phi.src))


def ind_class(phi: Hom, target: FiniteGroup, source_ambient: FiniteGroup) -> BisetClass:
    """``ind_φ`` over ``(P, Q)`` with ``D = {(φ(u), u)}``."""
    qg, members = source_ambient.subgroup_group(phi.src)
    idx = {x: i for i, x in enumerate(members)}
    n = qg.order
    return BisetClass.of(target, qg, (phi(u) * n + idx[u] for u in phi.src))


def adjunction_check(alpha: Hom, source_ambient: FiniteGroup, target: FiniteGroup,
                     f: VirtualBiset, h: VirtualBiset) -> tuple[object, object, bool]:
    """Evaluate both sides of ``|ind_α·f, h| = |f, res_α·h|``.

    ``α: P' → P`` with ``P'`` the subgroup ``alpha.src`` of ``source_ambient``;
    ``f`` is over ``(P', P'')`` and ``h`` over ``(P, P'')``.
    """
    ind = VirtualBiset.of(ind_class(alpha, target, source_ambient))
    res = VirtualBiset.of(res_class(alpha, target, source_ambient))
    lhs = scalar_product(compose(ind, f), h)
    rhs = scalar_product(f, compose(res, h))
    both = lhs is not UNDEFINED and rhs is not UNDEFINED
    return lhs, rhs, (lhs == rhs) if both else (lhs is rhs)


# ----------------------------------------------------------------------------
# Burnside ring B_P


class PSetElement:
    """Rational combination of the transitive P-sets ``s_Q = [P/Q]``."""

    __slots__ = ("group", "coeffs")

    def __init__(self, group: FiniteGroup, coeffs: Mapping[Iterable[int], Fraction | int] | None = None):
        self.group = group
        clean: dict[tuple[int, ...], Fraction] = {}
        for k, v in (coeffs or {}).items():
            key = tuple(sorted(group.subgroup_class_rep(frozenset(k))))
            v = Fraction(v)
            clean[key] = clean.get(key, Fraction(0)) + v
            if not clean[key]:
                del clean[key]
        self.coeffs = clean

    @staticmethod
    def s(group: FiniteGroup, sub: Iterable[int], coeff: Fraction | int = 1) -> PSetElement:
        return PSetElement(group, {frozenset(sub): coeff})

    @staticmethod
    def one(group: FiniteGroup) -> PSetElement:
        return PSetElement.s(group, range(group.order))

    def __add__(self, other: PSetElement) -> PSetElement:
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + v
        return PSetElement(self.group, out)

    def __sub__(self, other: PSetElement) -> PSetElement:
        return self + other.scale(-1)

    def scale(self, c: Fraction | int) -> PSetElement:
        return PSetElement(self.group, {k: Fraction(c) * v for k, v in self.coeffs.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PSetElement):
            return NotImplemented
        return self.group is other.group and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(frozenset(self.coeffs.items()))

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        return sorted(self.coeffs.items(), key=lambda kv: (len(kv[0]), kv[0]))

    def __repr__(self) -> str:
        return "PSetElement(" + " + ".join(f"{v}*s{list(k)}" for k, v in self.terms()) + ")"


def act_class(k: BisetClass, sub: frozenset[int]) -> dict[tuple[int, ...], int]:
    """``f_{Q,φ}(s_R) = Σ_{w ∈ Q\\P/R} s_{φ(Q ∩ wRw⁻¹)}`` for a projective class."""
    q, phi = k.as_pp()
    p, target = k.right, k.left
    out: dict[tuple[int, ...], int] = {}
    for w in p.double_coset_reps(q, sub):
        inter = q & p.conj_set(w, sub)
        key = tuple(sorted(target.subgroup_class_rep(frozenset(phi(u) for u in inter))))
        out[key] = out.get(key, 0) + 1
    return out


def act_general(k: BisetClass, sub: Iterable[int]) -> dict[tuple[int, ...], int]:
    """Same action computed by composing with ``P/R`` viewed as a ``(P, 1)``-biset."""
    pset = BisetClass.of(k.right, TRIVIAL_GROUP, sub)
    out: dict[tuple[int, ...], int] = {}
    for c, m in compose_general(k, pset).items():
        key = tuple(sorted(k.left.subgroup_class_rep(frozenset(c.members))))
        out[key] = out.get(key, 0) + m
    return out


def act(f: VirtualBiset, s: PSetElement) -> PSetElement:
    if s.group is not f.right:
        raise GroupError("P-set over a different group")
    out: dict[tuple[int, ...], Fraction] = {}
    for k, v in f.coeffs.items():
        for sub, c in s.coeffs.items():
            part = act_class(k, frozenset(sub)) if k.is_pp else act_general(k, sub)
            for key, m in part.items():
                out[key] = out.get(key, Fraction(0)) + v * c * m
    return PSetElement(f.left, out)


def m_of_pset(s: PSetElement) -> VirtualBiset:
    g = s.group
    return VirtualBiset(g, g, {diagonal(g, k): v for k, v in s.coeffs.items()})


def burnside_multiply(s: PSetElement, t: PSetElement) -> PSetElement:
    return act(m_of_pset(s), t)


def marks(s: PSetElement) -> list[Fraction]:
    """Fixed-point counts of ``s`` at each conjugacy class of subgroups ``H``."""
    g = s.group
    out = []
    for cls in g.subgroup_classes():
        h = cls[0]
        total = Fraction(0)
        for sub, c in s.coeffs.items():
            q = frozenset(sub)
            fixed = sum(1 for x in g.left_coset_reps(q) if h <= g.conj_set(x, q))
            total += c * fixed
        out.append(total)
    return out
