"""Double-coset Hecke algebra of a group with a Sylow subgroup and the transporter comparison."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .bisets import frac_str
from .groups import FiniteGroup, GroupError, is_prime, p_part


class ReexpressionError(ArithmeticError):
    """A group-algebra element that should be a combination of double-coset sums is not."""


def _key(s: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(s))


class GroupHeckeAlgebra:
    """``Ĥ_G`` with basis ``h_D = (1/|P|)·Σ_{x∈D} x`` over ``D ∈ P\\G/P``."""

    def __init__(self, G: FiniteGroup, sylow: Iterable[int], p: int | None = None):
        P = frozenset(sylow)
        if not G.is_subgroup(P):
            raise GroupError("the given set is not a subgroup")
        if p is None:
            if len(P) == 1:
                raise GroupError("a prime is required when the Sylow subgroup is trivial")
            p = next(d for d in range(2, len(P) + 1) if len(P) % d == 0)
        if not is_prime(p) or len(P) != p_part(G.order, p):
            raise GroupError(f"subgroup of order {len(P)} is not a Sylow {p}-subgroup of {G.name}")
        self.G, self.P, self.p = G, P, p
        self.reps: list[int] = G.double_coset_reps(P, P)
        self.cosets = [G.double_coset(P, r, P) for r in self.reps]
        self.index_of_element = [0] * G.order
        for i, d in enumerate(self.cosets):
            for x in d:
                self.index_of_element[x] = i
        self._constants: list[list[tuple[int, ...]]] | None = None

    def __repr__(self) -> str:
        return f"GroupHeckeAlgebra({self.G.name}, |P|={len(self.P)}, rank={self.rank})"

    @property
    def rank(self) -> int:
        return len(self.reps)

    def index(self, x: int) -> int:
        """Basis index of the double coset ``PxP``."""
        return self.index_of_element[x]

    def basis_element(self, i: int) -> GroupHeckeElement:
        c = [Fraction(0)] * self.rank
        c[i] = Fraction(1)
        return GroupHeckeElement(self, tuple(c))

    def h(self, x: int) -> GroupHeckeElement:
        """``h_{PxP}``."""
        return self.basis_element(self.index(x))

    def one(self) -> GroupHeckeElement:
        return self.h(0)

    def zero(self) -> GroupHeckeElement:
        return GroupHeckeElement(self, (Fraction(0),) * self.rank)

    def element(self, coeffs: Mapping[int, Fraction | int]) -> GroupHeckeElement:
        """Element from ``{representative: coefficient}``; any member of a coset may be used."""
        c = [Fraction(0)] * self.rank
        for x, v in coeffs.items():
            c[self.index(x)] += Fraction(v)
        return GroupHeckeElement(self, tuple(c))

    def group_algebra_vector(self, a: GroupHeckeElement) -> list[Fraction]:
        vec = [Fraction(0)] * self.G.order
        n = len(self.P)
        for i, c in enumerate(a.coeffs):
            if c:
                for x in self.cosets[i]:
                    vec[x] += c / n
        return vec

    def from_group_algebra(self, vec: list[Fraction]) -> GroupHeckeElement:
        """Re-express a group-algebra vector in the ``h``-basis (it must be constant on cosets)."""
        n = len(self.P)
        coeffs = []
        for d, r in zip(self.cosets, self.reps):
            v = vec[r]
            if any(vec[x] != v for x in d):
                raise ReexpressionError(f"not constant on the double coset of {r}")
            coeffs.append(v * n)
        return GroupHeckeElement(self, tuple(coeffs))

    def structure_constants(self) -> list[list[tuple[int, ...]]]:
        """``c[i][j][k]`` with ``h_i·h_j = Σ_k c[i][j][k]·h_k``; asserted to be nonnegative integers."""
        if self._constants is None:
            table = []
            for i in range(self.rank):
                row = []
                for j in range(self.rank):
                    prod = group_hecke_multiply(self.basis_element(i), self.basis_element(j))
                    if any(c.denominator != 1 or c < 0 for c in prod.coeffs):
                        raise ReexpressionError("structure constant is not a nonnegative integer")
                    row.append(tuple(int(c) for c in prod.coeffs))
                table.append(row)
            self._constants = table
        return self._constants

    def to_json(self) -> dict:
        return {"group": self.G.name, "sylow": sorted(self.P), "p": self.p,
                "basis": [{"rep": r, "size": len(d)} for r, d in zip(self.reps, self.cosets)]}


def group_hecke_basis(G: FiniteGroup, sylow: Iterable[int], p: int | None = None) -> list[int]:
    """Minimal representatives of ``P\\G/P`` in increasing order."""
    return GroupHeckeAlgebra(G, sylow, p).reps


@dataclass(frozen=True)
class GroupHeckeElement:
    algebra: GroupHeckeAlgebra = field(compare=False)
    coeffs: tuple[Fraction, ...]

    def _check(self, other: GroupHeckeElement) -> None:
        if self.algebra is not other.algebra:
            raise GroupError("elements of different group Hecke algebras")

    def __add__(self, other: GroupHeckeElement) -> GroupHeckeElement:
        self._check(other)
        return GroupHeckeElement(self.algebra, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: GroupHeckeElement) -> GroupHeckeElement:
        self._check(other)
        return GroupHeckeElement(self.algebra, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def scale(self, c: Fraction | int) -> GroupHeckeElement:
        c = Fraction(c)
        return GroupHeckeElement(self.algebra, tuple(c * a for a in self.coeffs))

    def __matmul__(self, other: GroupHeckeElement) -> GroupHeckeElement:
        return group_hecke_multiply(self, other)

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def terms(self) -> list[tuple[int, Fraction]]:
        return [(r, c) for r, c in zip(self.algebra.reps, self.coeffs) if c]

    def to_json(self) -> list[dict]:
        return [{"rep": r, "coeff": frac_str(c)} for r, c in self.terms()]

    def __repr__(self) -> str:
        body = " + ".join(f"{frac_str(c)}*h[{r}]" for r, c in self.terms()) or "0"
        return f"<{body}>"


def group_hecke_multiply(a: GroupHeckeElement, b: GroupHeckeElement) -> GroupHeckeElement:
    """Product computed in the rational group algebra and read back in the ``h``-basis."""
    a._check(b)
    A = a.algebra
    va, vb = A.group_algebra_vector(a), A.group_algebra_vector(b)
    t = A.G.table
    out = [Fraction(0)] * A.G.order
    right = [(y, c) for y, c in enumerate(vb) if c]
    for x, c in enumerate(va):
        if c:
            row = t[x]
            for y, d in right:
                out[row[y]] += c * d
    return A.from_group_algebra(out)


# transporter objects -----------------------------------------------------------

@dataclass(frozen=True)
class TransporterObject:
    """Indecomposable object over ``Q ≤ P`` given by the cosets ``Px`` and ``Px'``.

    Requires ``xQx⁻¹ ⊆ P`` and ``x'Qx'⁻¹ ⊆ P``.  Instances built with
    :func:`transporter_object` are in canonical form: minimal ``(x', Q, x)``
    over the isomorphism class, which forces ``x' = 1``.
    """

    algebra: GroupHeckeAlgebra = field(compare=False, repr=False)
    sub: tuple[int, ...]
    x: int
    x2: int

    @property
    def order(self) -> int:
        return len(self.sub)

    def label(self) -> str:
        return f"t[Q={list(self.sub)}; {self.x}, {self.x2}]"

    def to_json(self) -> dict:
        return {"subgroup": list(self.sub), "x": self.x, "x2": self.x2}


def _check_transport(A: GroupHeckeAlgebra, q: Iterable[int], x: int) -> bool:
    return A.G.conj_set(x, q) <= A.P


def _iso_class_keys(A: GroupHeckeAlgebra, q: frozenset[int], x: int, x2: int):
    """Every presentation ``(Q^s; Pxs, Px's)`` of the object, as minimal coset representatives."""
    G, t = A.G, A.G.table
    P = sorted(A.P)
    for s in range(G.order):
        si = G.inv[s]
        qs = G.conj_set(si, q)
        xs, x2s = t[x][s], t[x2][s]
        yield (min(t[u][x2s] for u in P), _key(qs), min(t[u][xs] for u in P))


def transporter_object(A: GroupHeckeAlgebra, q: Iterable[int], x: int, x2: int) -> TransporterObject:
    """Canonical form of the object over ``q`` with transporters ``x`` and ``x2``."""
    q = frozenset(q)
    if not q <= A.P or not A.G.is_subgroup(q):
        raise GroupError("object subgroup must be a subgroup of P")
    if not (_check_transport(A, q, x) and _check_transport(A, q, x2)):
        raise GroupError("transporter condition fails")
    k2, sub, k = min(_iso_class_keys(A, q, x, x2))
    return TransporterObject(A, sub, k, k2)


def unit_object(A: GroupHeckeAlgebra) -> TransporterObject:
    return transporter_object(A, A.P, 0, 0)


def maximal_object_for(A: GroupHeckeAlgebra, g: int) -> TransporterObject:
    """The maximal object over ``P ∩ P^g`` mapped to ``h_{PgP}`` by ``d_G``."""
    G = A.G
    pg = G.conj_set(G.inv[g], A.P)
    return transporter_object(A, A.P & pg, g, 0)


def is_isomorphic_search(a: TransporterObject, b: TransporterObject) -> bool:
    """Exhaustive search for ``s`` with ``Q_a^s = Q_b``, ``Px_a s = Px_b``, ``Px'_a s = Px'_b``."""
    A = a.algebra
    G, t = A.G, A.G.table
    if a.order != b.order:
        return False
    qa, qb = frozenset(a.sub), frozenset(b.sub)
    pxb = {t[u][b.x] for u in A.P}
    px2b = {t[u][b.x2] for u in A.P}
    for s in range(G.order):
        if G.conj_set(G.inv[s], qa) == qb and t[a.x][s] in pxb and t[a.x2][s] in px2b:
            return True
    return False


def ht_product(a: TransporterObject, b: TransporterObject) -> list[TransporterObject]:
    """Expansion of ``t_{x,x'}·t_{y,y'}`` indexed by ``w ∈ ^{x'}Q\\P/^{y}R``."""
    if a.algebra is not b.algebra:
        raise GroupError("objects of different algebras")
    A = a.algebra
    G, t, inv = A.G, A.G.table, A.G.inv
    left = G.conj_set(a.x2, a.sub)
    right = G.conj_set(b.x, b.sub)
    first = t[a.x][inv[a.x2]]
    out = []
    for w in G.double_coset_reps(left, right, within=A.P):
        u = left & G.conj_set(w, right)
        second = t[t[b.x2][inv[b.x]]][inv[w]]
        out.append(transporter_object(A, u, first, second))
    return out


@dataclass(frozen=True)
class Retraction:
    coefficient: Fraction
    target: TransporterObject
    chain: tuple[tuple[int, ...], ...]


def e_T(obj: TransporterObject) -> Retraction:
    """Replace ``Q`` by ``N_{P^x ∩ P^{x'}}(Q)`` until stable; scale by the index ``[Q̂:Q]``."""
    A = obj.algebra
    G = A.G
    box = G.conj_set(G.inv[obj.x], A.P) & G.conj_set(G.inv[obj.x2], A.P)
    q = frozenset(obj.sub)
    chain = [_key(q)]
    while True:
        n = G.normalizer(q, within=box)
        if n == q:
            break
        q = n
        chain.append(_key(q))
    target = transporter_object(A, q, obj.x, obj.x2)
    return Retraction(Fraction(len(q), obj.order), target, tuple(chain))


def is_maximal(obj: TransporterObject) -> bool:
    r = e_T(obj)
    return r.target == obj


def d_G(obj: TransporterObject) -> GroupHeckeElement:
    """``h_{P x x'⁻¹ P}``."""
    A = obj.algebra
    return A.h(A.G.table[obj.x][A.G.inv[obj.x2]])


# formal combinations of objects --------------------------------------------------

@dataclass(frozen=True)
class TransporterSum:
    """Rational combination of canonical transporter objects."""

    terms: tuple[tuple[TransporterObject, Fraction], ...]

    @staticmethod
    def of(items: Mapping[TransporterObject, Fraction | int] | Iterable[tuple[TransporterObject, Fraction | int]]
           ) -> TransporterSum:
        acc: dict[TransporterObject, Fraction] = {}
        pairs = items.items() if isinstance(items, Mapping) else items
        for o, c in pairs:
            acc[o] = acc.get(o, Fraction(0)) + Fraction(c)
        return TransporterSum(tuple(sorted(((o, c) for o, c in acc.items() if c),
                                           key=lambda oc: (oc[0].x2, oc[0].sub, oc[0].x))))

    def __add__(self, other: TransporterSum) -> TransporterSum:
        return TransporterSum.of(list(self.terms) + list(other.terms))

    def __sub__(self, other: TransporterSum) -> TransporterSum:
        return TransporterSum.of(list(self.terms) + [(o, -c) for o, c in other.terms])

    def __bool__(self) -> bool:
        return bool(self.terms)

    def to_json(self) -> list[dict]:
        return [dict(o.to_json(), coeff=frac_str(c)) for o, c in self.terms]


def object_sum(obj: TransporterObject, c: Fraction | int = 1) -> TransporterSum:
    return TransporterSum.of([(obj, c)])


def ht_multiply(r: TransporterSum, s: TransporterSum) -> TransporterSum:
    out = []
    for a, ca in r.terms:
        for b, cb in s.terms:
            out.extend((o, ca * cb) for o in ht_product(a, b))
    return TransporterSum.of(out)


def e_T_sum(r: TransporterSum) -> TransporterSum:
    out = []
    for o, c in r.terms:
        ret = e_T(o)
        out.append((ret.target, c * ret.coefficient))
    return TransporterSum.of(out)


def d_G_sum(A: GroupHeckeAlgebra, r: TransporterSum) -> GroupHeckeElement:
    acc = A.zero()
    for o, c in r.terms:
        acc = acc + d_G(o).scale(c)
    return acc


def comparison_constants(A: GroupHeckeAlgebra) -> list[list[tuple[Fraction, ...]]]:
    """Structure constants of ``Ĥ_G`` read off as ``d_G(e_T(t_D·t_E))`` on maximal objects."""
    objs = [maximal_object_for(A, r) for r in A.reps]
    for i, o in enumerate(objs):
        if d_G(o) != A.basis_element(i) or not is_maximal(o):
            raise ReexpressionError("maximal object does not represent its double coset")
    table = []
    for a in objs:
        row = []
        for b in objs:
            prod = e_T_sum(ht_multiply(object_sum(a), object_sum(b)))
            row.append(d_G_sum(A, prod).coeffs)
        table.append(row)
    return table


def all_objects(A: GroupHeckeAlgebra) -> list[TransporterObject]:
    """One canonical object per isomorphism class."""
    G = A.G
    seen = set()
    for q in G.subgroups():
        if not q <= A.P:
            continue
        for x in range(G.order):
            if _check_transport(A, q, x):
                seen.add(transporter_object(A, q, x, 0))
    return sorted(seen, key=lambda o: (o.x2, o.sub, o.x))
