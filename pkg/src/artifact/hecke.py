"""The Hecke algebra ``H_F`` of a fusion system: basis, products, stability, idempotent."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .bisets import (BisetClass, DomainError, PSetElement, VirtualBiset, act, compose, delta, delta2,
                     diagonal, frac_str, length, res_class)
from .fusion import FusionSystem
from .groups import FiniteGroup, GroupError, Hom, ResourceLimitError, identity_hom
from .linalg import (LinearAlgebraError, integer_kernel, is_p_local, rank, rational_reconstruction,
                     solve, solve_mod)


class SaturationDefect(ArithmeticError):
    """An identity that holds for Frobenius systems failed; carries the offending data."""

    def __init__(self, message: str, where: dict | None = None):
        super().__init__(message)
        self.where = where or {}


def _key(s: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(s))


def _log(n: int, p: int) -> int:
    k = 0
    while n > 1:
        n //= p
        k += 1
    return k


# ----------------------------------------------------------------------------
# basis


@dataclass(frozen=True)
class BasisElement:
    """``f_{φ,φ'}`` over ``Q ∈ S``: the class of ``Δ_{φ,φ'}(Q) = {(φ(u), φ'(u))}``."""

    index: int
    grade: int
    q: frozenset[int]
    phi: Hom
    phi2: Hom
    cls: BisetClass
    nbar: int

    @property
    def is_diagonal(self) -> bool:
        return self.phi.img == self.phi.src and self.phi2.img == self.phi2.src

    def label(self) -> dict:
        return {"index": self.index, "grade": self.grade, "order": len(self.q), "source": list(self.phi.src),
                "phi": list(self.phi.img), "phi2": list(self.phi2.img)}


class HeckeBasis:
    """Canonical basis of ``H_F``: for each ``Q ∈ S`` the diagonal ``F(Q)``-orbit classes ``D_Q``."""

    def __init__(self, fusion: FusionSystem):
        self.fusion = F = fusion
        self.P = P = F.base
        self.p = F.p
        self.S: list[frozenset[int]] = []
        self.grade_of: dict[frozenset[int], int] = {}
        for cls in F.classes:
            reps = [q for q in cls if F.is_fully_normalized(q)]
            q = min(reps, key=_key)
            self.S.append(q)
            self.grade_of[q] = _log(P.order // len(q), self.p)
        self.S.sort(key=lambda q: (self.grade_of[q], _key(q)))
        self.elements: list[BasisElement] = []
        self.D: dict[frozenset[int], list[BasisElement]] = {}
        self.index_of: dict[BisetClass, int] = {}
        for q in self.S:
            self.D[q] = self._orbit_classes(q)
        self._check_divisibility()

    # construction -------------------------------------------------------------

    def _orbit_classes(self, q: frozenset[int]) -> list[BasisElement]:
        F, P = self.fusion, self.P
        iota = identity_hom(q)
        reps = []
        for orb in F.exterior_quotient(q):
            reps.append(iota if iota in orb else orb[0])
        grouped: dict[BisetClass, tuple[Hom, Hom]] = {}

        def pref(pair: tuple[Hom, Hom]) -> tuple:
            a, b = pair
            return (a != iota, b != iota, a.img, b.img)

        for a in reps:
            for b in reps:
                c = delta2(P, P, a, b)
                if c not in grouped or pref((a, b)) < pref(grouped[c]):
                    grouped[c] = (a, b)
        expected = self._diagonal_orbit_count(q, reps)
        if expected != len(grouped):
            raise SaturationDefect("class count differs from diagonal orbit count",
                                   {"subgroup": _key(q), "classes": len(grouped), "orbits": expected})
        ordered = sorted(grouped.items(), key=lambda kv: pref(kv[1]))
        out = []
        grade = self.grade_of[q]
        for c, (a, b) in ordered:
            if c in self.index_of:
                raise SaturationDefect("basis classes collide", {"subgroup": _key(q)})
            idx = len(self.elements)
            el = BasisElement(idx, grade, q, a, b, c, c.ctx.fixed_points(c.members, c.members))
            self.elements.append(el)
            self.index_of[c] = idx
            out.append(el)
        return out

    def _diagonal_orbit_count(self, q: frozenset[int], reps: list[Hom]) -> int:
        F = self.fusion
        keys = [F.tilde_key(h) for h in reps]
        autos = F.autos(q)
        seen: set[tuple] = set()
        count = 0
        for a in reps:
            for b in reps:
                start = (F.tilde_key(a), F.tilde_key(b))
                if start in seen:
                    continue
                count += 1
                for alpha in autos:
                    seen.add((F.tilde_key(alpha.then(a)), F.tilde_key(alpha.then(b))))
        assert len(seen) == len(keys) ** 2
        return count

    def _check_divisibility(self) -> None:
        for q in self.S:
            top = self.D[q][0].nbar
            for el in self.D[q]:
                if top % el.nbar:
                    raise SaturationDefect("normalizer order does not divide the diagonal one",
                                           {"subgroup": _key(q), "phi": el.phi.img, "phi2": el.phi2.img})

    # queries --------------------------------------------------------------------

    @property
    def rank(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def fix(self, i: int, j: int) -> int:
        a, b = self.elements[i].cls, self.elements[j].cls
        return a.ctx.fixed_points(a.members, b.members)

    @cached_property
    def fix_matrix(self) -> list[list[int]]:
        return [[self.fix(i, j) for j in range(self.rank)] for i in range(self.rank)]

    def iota_index(self, q: frozenset[int]) -> int:
        return self.D[q][0].index

    def s_class(self, q: Iterable[int]) -> int:
        return self.fusion.class_of(q)

    def element(self, coeffs: Mapping[int, Fraction | int] | Sequence[Fraction | int]) -> HeckeElement:
        if isinstance(coeffs, Mapping):
            vec = [Fraction(0)] * self.rank
            for k, v in coeffs.items():
                vec[k] += Fraction(v)
            return HeckeElement(self, tuple(vec))
        return HeckeElement(self, tuple(Fraction(x) for x in coeffs))

    def basis_element(self, i: int, coeff: Fraction | int = 1) -> HeckeElement:
        return self.element({i: coeff})

    @property
    def zero(self) -> HeckeElement:
        return self.element({})

    @property
    def unit(self) -> HeckeElement:
        return self.basis_element(self.iota_index(self.S[0]))

    def from_biset(self, f: VirtualBiset) -> HeckeElement:
        """Coordinates of ``f``; raises :class:`DomainError` if a class lies outside ``H_F``."""
        if f.left is not self.P or f.right is not self.P:
            raise DomainError("biset is not over P x P")
        vec = [Fraction(0)] * self.rank
        for c, v in f.coeffs.items():
            idx = self.index_of.get(c)
            if idx is None:
                raise DomainError(f"class outside H_F: {c}")
            vec[idx] = v
        return HeckeElement(self, tuple(vec))

    def contains(self, f: VirtualBiset) -> bool:
        return all(c in self.index_of for c in f.coeffs)

    def m_s(self, q: Iterable[int]) -> HeckeElement:
        return self.from_biset(VirtualBiset.of(diagonal(self.P, q)))

    def scalar(self, i: int, f: HeckeElement) -> Fraction:
        """``|f_i, f|`` for the basis class ``f_i``."""
        row = self.fix_matrix[i]
        return sum((row[j] * c for j, c in enumerate(f.coeffs) if c), Fraction(0))

    def to_json(self) -> dict:
        return {
            "fusion": self.fusion.name,
            "p": self.p,
            "rank": self.rank,
            "S": [{"subgroup": _key(q), "order": len(q), "grade": self.grade_of[q],
                   "classes": [el.index for el in self.D[q]]} for q in self.S],
            "basis": [el.label() for el in self.elements],
        }


# ----------------------------------------------------------------------------
# elements


class HeckeElement:
    """Exact rational coordinates over a :class:`HeckeBasis`."""

    __slots__ = ("basis", "coeffs")

    def __init__(self, basis: HeckeBasis, coeffs: tuple[Fraction, ...]):
        if len(coeffs) != basis.rank:
            raise ValueError("coordinate vector has the wrong length")
        self.basis, self.coeffs = basis, coeffs

    def _check(self, other: HeckeElement) -> None:
        if self.basis is not other.basis:
            raise GroupError("elements over different bases")

    def __add__(self, other: HeckeElement) -> HeckeElement:
        self._check(other)
        return HeckeElement(self.basis, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: HeckeElement) -> HeckeElement:
        self._check(other)
        return HeckeElement(self.basis, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> HeckeElement:
        return self.scale(-1)

    def scale(self, c: Fraction | int) -> HeckeElement:
        c = Fraction(c)
        return HeckeElement(self.basis, tuple(c * a for a in self.coeffs))

    def __rmul__(self, c: Fraction | int) -> HeckeElement:
        return self.scale(c)

    def __matmul__(self, other: HeckeElement) -> HeckeElement:
        return multiply(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HeckeElement):
            return NotImplemented
        return self.basis is other.basis and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def terms(self) -> list[tuple[int, Fraction]]:
        return [(i, c) for i, c in enumerate(self.coeffs) if c]

    @property
    def biset(self) -> VirtualBiset:
        els = self.basis.elements
        P = self.basis.P
        return VirtualBiset(P, P, {els[i].cls: c for i, c in self.terms()})

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def is_p_local(self) -> bool:
        return all(is_p_local(c, self.basis.p) for c in self.coeffs)

    def is_positive(self) -> bool:
        return all(c >= 0 for c in self.coeffs)

    def opposite(self) -> HeckeElement:
        els = self.basis.elements
        vec = [Fraction(0)] * self.basis.rank
        for i, c in self.terms():
            vec[self.basis.index_of[els[i].cls.opposite()]] += c
        return HeckeElement(self.basis, tuple(vec))

    def length(self) -> Fraction:
        return length(self.biset)

    def to_json(self) -> list[dict]:
        els = self.basis.elements
        return [{**els[i].label(), "coeff": frac_str(c)} for i, c in self.terms()]

    def __repr__(self) -> str:
        return "HeckeElement(" + " + ".join(f"{c}*f{i}" for i, c in self.terms()) + ")"


def hecke_basis(F: FusionSystem) -> HeckeBasis:
    cached = getattr(F, "_hecke_basis", None)
    if cached is None:
        cached = HeckeBasis(F)
        F._hecke_basis = cached
    return cached


def multiply(f: HeckeElement, g: HeckeElement) -> HeckeElement:
    f._check(g)
    prod = compose(f.biset, g.biset)
    try:
        return f.basis.from_biset(prod)
    except DomainError as exc:
        raise SaturationDefect(f"product left H_F: {exc}") from exc


def membership(f: VirtualBiset, F: FusionSystem) -> bool:
    """Every class of ``f`` is ``Δ_φ(Q)`` up to conjugation with ``φ ∈ F``."""
    basis = hecke_basis(F)
    return f.left is F.base and f.right is F.base and basis.contains(f)


def closure_defects(F: FusionSystem) -> list[BisetClass]:
    """Projective classes outside ``H_F`` with a nonzero scalar product against a basis class."""
    from .basic import all_pp_classes
    basis = hecke_basis(F)
    out = []
    for c in all_pp_classes(F.base):
        if c in basis.index_of:
            continue
        if any(c.ctx.fixed_points(c.members, el.cls.members) for el in basis.elements):
            out.append(c)
    return out


# ----------------------------------------------------------------------------
# evaluation and B_P / F


@dataclass
class PSetClassModF:
    """Element of ``B_P/F``: coefficients over F-isomorphism classes of subgroups."""

    fusion: FusionSystem
    coeffs: dict[int, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.coeffs = {k: Fraction(v) for k, v in self.coeffs.items() if v}

    @staticmethod
    def of(F: FusionSystem, s: PSetElement) -> PSetClassModF:
        out: dict[int, Fraction] = {}
        for sub, c in s.coeffs.items():
            k = F.class_of(sub)
            out[k] = out.get(k, Fraction(0)) + c
        return PSetClassModF(F, out)

    @staticmethod
    def s_bar(F: FusionSystem, q: Iterable[int], coeff: Fraction | int = 1) -> PSetClassModF:
        return PSetClassModF(F, {F.class_of(q): coeff})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PSetClassModF):
            return NotImplemented
        return self.fusion is other.fusion and self.coeffs == other.coeffs

    def to_json(self) -> list[dict]:
        cls = self.fusion.classes
        return [{"class": k, "subgroup": _key(cls[k][0]), "coeff": frac_str(v)} for k, v in sorted(self.coeffs.items())]


def evaluate(f: HeckeElement) -> PSetElement:
    """``v(f) = f(s_P)``."""
    P = f.basis.P
    return act(f.biset, PSetElement.one(P))


def evaluate_mod_F(f: HeckeElement) -> PSetClassModF:
    return PSetClassModF.of(f.basis.fusion, evaluate(f))


def kernel_basis(basis: HeckeBasis) -> list[HeckeElement]:
    """``f_{φ,φ'} − m_{s_{φ(Q)}}`` over the non-diagonal basis classes: a Z-basis of ``ker v``."""
    out = []
    for el in basis.elements:
        if el.cls.ctx.canonical(el.cls.members) == diagonal(basis.P, el.phi.image).members:
            continue
        out.append(basis.basis_element(el.index) - basis.m_s(el.phi.image))
    return out


def stable_burnside_basis(F: FusionSystem) -> list[PSetElement]:
    """Z-basis of ``(B_P)^F``: elements whose marks are constant on F-isomorphism classes."""
    P = F.base
    classes = P.subgroup_classes()
    reps = [c[0] for c in classes]

    def mark(q: frozenset[int], h: frozenset[int]) -> int:
        return sum(1 for x in range(P.order) if P.conj_set(P.inv[x], h) <= q) // len(q)

    table = [[mark(q, h) for q in reps] for h in reps]
    rows = []
    for j, h in enumerate(reps):
        for k in range(j + 1, len(reps)):
            if F.class_of(h) == F.class_of(reps[k]):
                rows.append([table[j][i] - table[k][i] for i in range(len(reps))])
    kernel = integer_kernel(rows, len(reps))
    return [PSetElement(P, {reps[i]: v for i, v in enumerate(vec) if v}) for vec in kernel]


# ----------------------------------------------------------------------------
# stability


def stability_values(f: HeckeElement) -> dict[frozenset[int], list[Fraction]]:
    """``|f_x, f|`` for ``x ∈ D_Q``, ``Q ∈ S``; the diagonal class comes first."""
    basis = f.basis
    return {q: [basis.scalar(el.index, f) for el in basis.D[q]] for q in basis.S}


def is_stable(f: HeckeElement) -> bool:
    ok = all(len(set(vals)) == 1 for vals in stability_values(f).values())
    if ok and f.opposite() != f:
        raise SaturationDefect("stable element is not self-opposite")
    return ok


def is_stable_by_restriction(f: HeckeElement) -> bool:
    """``res_φ·f = res_ι·f`` and ``res_φ·f° = res_ι·f°`` for every ``φ ∈ F(P,Q)``."""
    F, P = f.basis.fusion, f.basis.P
    g, go = f.biset, f.opposite().biset
    for q in P.subgroups():
        iota = VirtualBiset.of(res_class(identity_hom(q), P, P))
        base, base_o = compose(iota, g), compose(iota, go)
        for phi in F.homs(q):
            r = VirtualBiset.of(res_class(phi, P, P))
            if compose(r, g) != base or compose(r, go) != base_o:
                return False
    return True


def stability_matrix(basis: HeckeBasis) -> list[list[int]]:
    rows = []
    fm = basis.fix_matrix
    for q in basis.S:
        top = fm[basis.iota_index(q)]
        for el in basis.D[q][1:]:
            rows.append([a - b for a, b in zip(fm[el.index], top)])
    return rows


def stable_lattice(basis: HeckeBasis) -> list[HeckeElement]:
    """Z-basis of ``H^F`` as the integer kernel of the stability equalities."""
    cached = getattr(basis, "_stable_lattice", None)
    if cached is None:
        vecs = integer_kernel(stability_matrix(basis), basis.rank)
        cached = [basis.element(v) for v in vecs]
        basis._stable_lattice = cached
    return cached


def positive_splitting(f: HeckeElement) -> tuple[HeckeElement, HeckeElement]:
    """Positive stable ``f', f''`` with ``f = f' − f''``, built grade by grade."""
    basis = f.basis
    if not f.is_integral():
        raise DomainError("splitting needs integral coefficients")
    z = f.coeffs
    a = [Fraction(0)] * basis.rank
    b = [Fraction(0)] * basis.rank
    for q in basis.S:
        els = basis.D[q]
        fa, fb = basis.element(a), basis.element(b)
        sa = [basis.scalar(el.index, fa) for el in els]
        sb = [basis.scalar(el.index, fb) for el in els]
        top = els[0].nbar
        zi = z[els[0].index]
        t = max(0, zi)
        while True:
            ca = [(sa[0] - sa[k]) / el.nbar + t * Fraction(top, el.nbar) for k, el in enumerate(els)]
            cb = [(sb[0] - sb[k]) / el.nbar + (t - zi) * Fraction(top, el.nbar) for k, el in enumerate(els)]
            if all(x >= 0 for x in ca + cb):
                break
            t += 1
        for k, el in enumerate(els):
            if ca[k].denominator != 1 or cb[k].denominator != 1:
                raise SaturationDefect("non-integral splitting coefficient", {"subgroup": _key(q)})
            a[el.index], b[el.index] = ca[k], cb[k]
    fp, fn = basis.element(a), basis.element(b)
    if fp - fn != f:
        raise SaturationDefect("splitting does not recover the element")
    return fp, fn


@dataclass
class StableTrace:
    """Divisions performed by the grade-by-grade construction."""

    steps: list[dict] = field(default_factory=list)


def stable_element_for(F: FusionSystem | HeckeBasis, target: PSetClassModF,
                       trace: StableTrace | None = None) -> HeckeElement:
    """The stable element with ``v̄(f) = target``, built from the top grade down."""
    basis = F if isinstance(F, HeckeBasis) else hecke_basis(F)
    F = basis.fusion
    p, P = basis.p, basis.P
    if any(not is_p_local(v, p) for v in target.coeffs.values()):
        raise DomainError("target coefficients must be p-local")
    trace = trace if trace is not None else StableTrace()
    full = basis.S[0]
    z_p = target.coeffs.get(F.class_of(full), Fraction(0))
    cosets = F.out_autos(full)
    if len(cosets) % p == 0:
        raise SaturationDefect("outer automorphism group order divisible by p", {"order": len(cosets)})
    vec = [Fraction(0)] * basis.rank
    iota = identity_hom(full)
    for coset in cosets:
        idx = basis.index_of[delta2(P, P, coset[0], iota)]
        vec[idx] += z_p / len(cosets)
    f = basis.element(vec)
    vals = [basis.scalar(el.index, f) for el in basis.D[full]]
    if len(set(vals)) != 1:
        raise SaturationDefect("top-grade element is not stable", {"subgroup": _key(full)})
    trace.steps.append({"subgroup": _key(full), "grade": 0, "coeff": frac_str(z_p / len(cosets))})
    for r in basis.S[1:]:
        els = basis.D[r]
        a = [basis.scalar(el.index, f) for el in els]
        top = els[0].nbar
        q_r = sum(top // el.nbar for el in els)
        if q_r % p == 0:
            raise SaturationDefect("index sum divisible by p", {"subgroup": _key(r), "q": q_r})
        diffs = []
        for el, ax in zip(els, a):
            d = (a[0] - ax) / el.nbar
            if not is_p_local(d, p):
                raise SaturationDefect("non-exact division",
                                       {"subgroup": _key(r), "phi": el.phi.img, "phi2": el.phi2.img})
            diffs.append(d)
        z_r = target.coeffs.get(F.class_of(r), Fraction(0))
        k_iota = (z_r - sum(diffs)) / q_r
        ks = [d + k_iota * Fraction(top, el.nbar) for el, d in zip(els, diffs)]
        for el, k in zip(els, ks):
            vec[el.index] += k
        f = basis.element(vec)
        trace.steps.append({"subgroup": _key(r), "grade": basis.grade_of[r], "q": q_r,
                            "coeffs": [frac_str(k) for k in ks]})
    if not is_stable(f):
        raise SaturationDefect("constructed element is not stable")
    if evaluate_mod_F(f) != target:
        raise SaturationDefect("constructed element has the wrong evaluation")
    if not f.is_p_local():
        raise SaturationDefect("constructed element is not p-local")
    return f


# ----------------------------------------------------------------------------
# characteristic idempotent


@dataclass
class IdempotentReport:
    omega: HeckeElement
    stable_rank: int
    idempotents_mod_p: int | None
    lifts: int
    modulus: int


MAX_EXHAUSTIVE = 200_000


def structure_constants(basis: HeckeBasis) -> tuple[list[HeckeElement], list[list[list[int]]]]:
    """Integer structure constants of ``H^F`` over its kernel lattice basis."""
    lat = stable_lattice(basis)
    cols = [list(b.coeffs) for b in lat]
    r = len(lat)
    table = [[[0] * r for _ in range(r)] for _ in range(r)]
    for i in range(r):
        for j in range(i, r):
            prod = multiply(lat[i], lat[j])
            try:
                c = solve(cols, prod.coeffs)
            except LinearAlgebraError as exc:
                raise SaturationDefect("stable elements are not closed under products") from exc
            if any(x.denominator != 1 for x in c):
                raise SaturationDefect("non-integral structure constant")
            table[i][j] = table[j][i] = [int(x) for x in c]
            if i != j and multiply(lat[j], lat[i]) != prod:
                raise SaturationDefect("stable subalgebra is not commutative")
    return lat, table


def _mul_mod(table, x, y, m):
    r = len(x)
    out = [0] * r
    for i in range(r):
        if not x[i] % m:
            continue
        for j in range(r):
            if not y[j] % m:
                continue
            c = x[i] * y[j]
            row = table[i][j]
            for k in range(r):
                if row[k]:
                    out[k] += c * row[k]
    return [v % m for v in out]


def _mul_exact(table, x, y):
    r = len(x)
    out = [Fraction(0)] * r
    for i in range(r):
        for j in range(r):
            if x[i] and y[j]:
                c = x[i] * y[j]
                for k, t in enumerate(table[i][j]):
                    if t:
                        out[k] += c * t
    return out


def characteristic_idempotent(F: FusionSystem | HeckeBasis, report: bool = False):
    """Unique nonzero idempotent of the p-localized stable subalgebra, by Hensel lifting."""
    basis = F if isinstance(F, HeckeBasis) else hecke_basis(F)
    p = basis.p
    lat, table = structure_constants(basis)
    r = len(lat)
    if r != len(basis.fusion.classes):
        raise SaturationDefect("stable rank differs from the number of F-classes",
                               {"rank": r, "classes": len(basis.fusion.classes)})
    # unit mod p: e·b_j = b_j for every j
    rows, rhs = [], []
    for j in range(r):
        for k in range(r):
            rows.append([table[i][j][k] for i in range(r)])
            rhs.append(1 if j == k else 0)
    e = solve_mod(rows, rhs, p)
    if e is None or _mul_mod(table, e, e, p) != [x % p for x in e] or not any(e):
        raise SaturationDefect("no nonzero idempotent modulo p")
    count = None
    if p ** r <= MAX_EXHAUSTIVE:
        count = 0
        for v in itertools.product(range(p), repeat=r):
            v = list(v)
            if _mul_mod(table, v, v, p) == v:
                count += 1
        if count != 2:
            raise SaturationDefect("idempotents modulo p are not exactly 0 and 1", {"count": count})
    m, lifts = p, 0
    while True:
        m2 = m * m
        e2 = _mul_mod(table, e, e, m2)
        e3 = _mul_mod(table, e2, e, m2)
        e = [(3 * a - 2 * b) % m2 for a, b in zip(e2, e3)]
        m, lifts = m2, lifts + 1
        cand = [rational_reconstruction(x, m) for x in e]
        if all(c is not None for c in cand):
            if _mul_exact(table, cand, cand) == cand:
                break
        if lifts > 14:
            raise ResourceLimitError("idempotent lifting did not stabilize")
    vec = [Fraction(0)] * basis.rank
    for c, b in zip(cand, lat):
        for i, x in b.terms():
            vec[i] += c * x
    omega = basis.element(vec)
    if multiply(omega, omega) != omega:
        raise SaturationDefect("lifted element is not idempotent")
    if report:
        return IdempotentReport(omega, r, count, lifts, m)
    return omega


# ----------------------------------------------------------------------------
# maximalization and the retraction e_F


@dataclass
class MaximalResult:
    subgroup: frozenset[int]
    phi: Hom
    cls: BisetClass
    chain: list[tuple[tuple[int, ...], tuple[int, ...]]]


def maximalize(F: FusionSystem, q: Iterable[int], phi: Hom | None = None) -> MaximalResult:
    """Extend ``φ: Q → P`` to ``N_φ`` repeatedly until ``N_φ = Q``."""
    P = F.base
    q = frozenset(q)
    phi = phi or identity_hom(q)
    if not F.is_selfcentralizing(q):
        raise DomainError("source subgroup is not F-selfcentralizing")
    if not F.contains(phi):
        raise DomainError("morphism is not in F")
    chain = [(_key(q), phi.img)]
    while True:
        n = F.n_phi(phi)
        if n == q:
            break
        ext = F.extensions(phi, n)
        if not ext:
            raise SaturationDefect("no extension to N_phi", {"subgroup": _key(q), "phi": phi.img})
        phi, q = ext[0], n
        chain.append((_key(q), phi.img))
    cls = delta(P, P, phi)
    return MaximalResult(q, phi, cls, chain)


def maximal_classes(F: FusionSystem) -> list[BisetClass]:
    """Classes ``Δ_φ(Q)`` with ``Q`` selfcentralizing and ``N_φ = Q``."""
    out = set()
    for q in F.subgroups():
        if not F.is_selfcentralizing(q):
            continue
        for phi in F.homs(q):
            if F.n_phi(phi) == q:
                out.add(delta(F.base, F.base, phi))
    return sorted(out, key=lambda c: (len(c.members), c.members))


def maximal_covers(F: FusionSystem, c: BisetClass) -> list[BisetClass]:
    """Maximal classes with nonzero scalar product against ``c``."""
    return [m for m in maximal_classes(F) if c.ctx.fixed_points(c.members, m.members)]


def in_N_F(F: FusionSystem, c: BisetClass) -> bool:
    q, _ = c.as_pp()
    return not F.is_selfcentralizing(q)


def _maximal_of_class(F: FusionSystem, c: BisetClass) -> MaximalResult:
    memo = F.__dict__.setdefault("_maximal_memo", {})
    if c not in memo:
        q, phi = c.as_pp()
        res = maximalize(F, q, phi)
        covers = maximal_covers(F, c)
        if covers != [res.cls]:
            raise SaturationDefect("maximal class is not unique", {"class": list(c.members)})
        memo[c] = res
    return memo[c]


def e_F(f: HeckeElement) -> HeckeElement:
    """Linear retraction: zero on ``N_F``, ``f_{Q,φ} ↦ [Q̂:Q]·f̂`` otherwise."""
    basis = f.basis
    F = basis.fusion
    vec = [Fraction(0)] * basis.rank
    for i, c in f.terms():
        cls = basis.elements[i].cls
        if in_N_F(F, cls):
            continue
        res = _maximal_of_class(F, cls)
        q, _ = cls.as_pp()
        vec[basis.index_of[res.cls]] += c * Fraction(len(res.subgroup), len(q))
    return basis.element(vec)


def N_F_indices(basis: HeckeBasis) -> list[int]:
    return [el.index for el in basis.elements if in_N_F(basis.fusion, el.cls)]
