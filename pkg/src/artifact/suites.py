"""Verification suites: each returns per-check verdicts with enough detail to reproduce a failure."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .alperin import essential_subgroups
from .basic import all_pp_classes, two_map_failures, frobenius_condition, fusion_from_element, is_basic
from .bisets import (BisetClass, PSetElement, VirtualBiset, burnside_multiply, compose, compose_classes,
                     fixed_point_count, length, m_of_pset, opposite)
from .catalog import catalog_systems, parse_fusion
from .fusion import exterior_counts, inner_fusion
from .group_hecke import (GroupHeckeAlgebra, all_objects, comparison_constants, e_T, e_T_sum, ht_multiply,
                          object_sum)
from .groups import catalog_group, direct_product, sylow_subgroups
from .hecke import (N_F_indices, PSetClassModF, StableTrace, characteristic_idempotent, e_F, evaluate_mod_F,
                    hecke_basis, is_stable, is_stable_by_restriction, kernel_basis, multiply, stable_burnside_basis,
                    stable_element_for, stable_lattice)
from .linalg import is_p_unit, rank
from .oracles import (double_coset_constants, equivariant_map_count, essential_oracle, idempotents_by_solving,
                      mackey_oracle)

DEFAULT_SEED = 20240611


@dataclass
class Check:
    name: str
    ok: bool
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"check": self.name, "ok": self.ok, "detail": self.detail}


@dataclass
class SuiteResult:
    suite: str
    checks: list[Check]
    seconds: float
    seed: int | None = None

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


# ------------------------------------------------------------------------------

def mackey_suite(seed: int) -> list[Check]:
    out = []
    for name in ("C2", "C3", "C4", "V4", "D8", "Q8"):
        P = catalog_group(name)
        classes = all_pp_classes(P)
        bad = [(a.members, b.members) for a in classes for b in classes if compose_classes(a, b) != mackey_oracle(a, b)]
        out.append(Check(f"mackey {name}", not bad, {"pairs": len(classes) ** 2, "mismatches": bad[:3]}))
    return out


def scalar_suite(seed: int) -> list[Check]:
    out = []
    for name in ("C2", "C3", "V4"):
        P = catalog_group(name)
        subs = direct_product(P, P).subgroups()
        bad = []
        for d in subs:
            for e in subs:
                if fixed_point_count(d, BisetClass.of(P, P, e)) != equivariant_map_count(P, P, d, e):
                    bad.append((sorted(d), sorted(e)))
        out.append(Check(f"fixed points {name}", not bad, {"pairs": len(subs) ** 2, "mismatches": bad[:3]}))
    return out


def _random_pp(rng: random.Random, classes, terms: int = 3) -> VirtualBiset:
    P = classes[0].left
    coeffs: dict[BisetClass, Fraction] = {}
    for _ in range(rng.randint(1, terms)):
        c = rng.choice(classes)
        coeffs[c] = coeffs.get(c, Fraction(0)) + rng.randint(-3, 3)
    return VirtualBiset(P, P, coeffs)


def _random_pset(rng: random.Random, P) -> PSetElement:
    subs = [c[0] for c in P.subgroup_classes()]
    return PSetElement(P, {rng.choice(subs): rng.randint(-3, 3) for _ in range(rng.randint(1, 3))})


def algebra_laws_suite(seed: int, cases: int = 100) -> list[Check]:
    out = []
    for name in ("C2", "C3", "C4", "V4", "D8", "Q8"):
        rng = random.Random(f"{seed}:{name}")
        P = catalog_group(name)
        classes = list(all_pp_classes(P))
        fails = {"length additive": 0, "length multiplicative": 0, "opposite involutive": 0,
                 "opposite antimultiplicative": 0, "diagonal embedding multiplicative": 0}
        for _ in range(cases):
            f, g = _random_pp(rng, classes), _random_pp(rng, classes)
            fg = compose(f, g)
            fails["length additive"] += length(f + g) != length(f) + length(g)
            fails["length multiplicative"] += length(fg) != length(f) * length(g)
            fails["opposite involutive"] += opposite(opposite(f)) != f
            fails["opposite antimultiplicative"] += opposite(fg) != compose(opposite(g), opposite(f))
            s, t = _random_pset(rng, P), _random_pset(rng, P)
            st = burnside_multiply(s, t)
            fails["diagonal embedding multiplicative"] += m_of_pset(st) != compose(m_of_pset(s), m_of_pset(t))
        for law, n in fails.items():
            out.append(Check(f"{law} {name}", n == 0, {"cases": cases, "failures": n}))
    return out


def s3_suite(seed: int) -> list[Check]:
    F = parse_fusion("S3:3")
    B = hecke_basis(F)
    omega = characteristic_idempotent(F)
    half = Fraction(1, 2)
    expected = [0] * B.rank
    sigma = next(el for el in B.elements if not el.is_diagonal and el.phi.img == el.phi.src)
    expected[B.iota_index(B.S[0])] = half
    expected[sigma.index] = half
    solved = idempotents_by_solving(F)
    rep = is_basic(omega.scale(2).biset)
    return [
        Check("hecke rank 3", B.rank == 3, {"rank": B.rank}),
        Check("idempotent is half the sum of the two top classes", list(omega.coeffs) == expected,
              {"omega": omega.to_json()}),
        Check("idempotent matches the exact polynomial solve", solved == [list(omega.coeffs)],
              {"solutions": [[str(x) for x in s] for s in solved]}),
        Check("idempotent self-opposite", omega.opposite() == omega),
        Check("idempotent length 1", omega.length() == 1, {"length": str(omega.length())}),
        Check("idempotent satisfies the Frobenius condition", frobenius_condition(omega.biset)),
        Check("twice the idempotent is basic", rep.basic, rep.to_json()),
    ]


def s4_suite(seed: int) -> list[Check]:
    F = parse_fusion("S4:2")
    main = [r.subgroup for r in essential_subgroups(F) if r.essential]
    oracle = essential_oracle(F)
    omega = characteristic_idempotent(F)
    odd = all(c.denominator % 2 for c in omega.coeffs)
    ff = fusion_from_element(omega.biset, 2)
    same = all({h.img for h in ff.homs(q)} == {h.img for h in F.homs(q)} for q in F.subgroups())
    return [
        Check("essential classes agree with the p-subgroup graph oracle", main == oracle,
              {"main": main, "oracle": oracle}),
        Check("essential classes are the normal Klein four only", main == [(0, 3, 4, 7)], {"main": main}),
        Check("idempotent has odd denominators", odd, {"omega": omega.to_json()}),
        Check("idempotent squares to itself", multiply(omega, omega) == omega),
        Check("fusion read back from the idempotent equals the system", same),
    ]


def exterior_counts_suite(seed: int) -> list[Check]:
    out = []
    for name, F in catalog_systems():
        bad = []
        for q in F.subgroups():
            c = exterior_counts(F, q)
            okc = c.fully_centralized % F.p != 0 and c.fully_normalized % F.p != 0
            if c.source_fully_normalized:
                okc = okc and c.weighted_sum.denominator == 1 and c.weighted_sum.numerator % F.p != 0
            if not okc:
                bad.append(c.to_json())
        out.append(Check(f"exterior counts prime to p {name}", not bad, {"exceptions": bad[:3]}))
    return out


def stable_suite(seed: int, targets: int = 20) -> list[Check]:
    out = []
    for name, F in catalog_systems():
        rng = random.Random(f"{seed}:{name}")
        B = hecke_basis(F)
        failures = []
        for _ in range(targets):
            target = PSetClassModF(F, {k: rng.randint(-4, 4) for k in range(len(F.classes))})
            trace = StableTrace()
            try:
                f = stable_element_for(B, target, trace)
            except ArithmeticError as exc:
                failures.append({"target": target.to_json(), "error": str(exc)})
                continue
            good = (is_stable(f) and evaluate_mod_F(f) == target and f.is_p_local()
                    and is_stable_by_restriction(f))
            if not good:
                failures.append({"target": target.to_json()})
        out.append(Check(f"constructive stable elements {name}", not failures,
                         {"targets": targets, "failures": failures[:2]}))
    return out


def _basic_candidates(F, rng: random.Random) -> list[VirtualBiset]:
    B = hecke_basis(F)
    omega = characteristic_idempotent(F)
    cands = [B.unit, omega]
    for k in (2, 3, 5, 7):
        cands.append(omega.scale(k))
    lat = stable_lattice(B)
    for _ in range(6):
        v = B.zero
        for b in lat:
            v = v + b.scale(rng.randint(-2, 2))
        cands.append(v)
    return [c.biset for c in cands if c]


def basic_suite(seed: int) -> list[Check]:
    out = []
    for name, F in catalog_systems():
        rng = random.Random(f"{seed}:{name}")
        frob = cor_bad = basic_bad = tested = 0
        for f in _basic_candidates(F, rng):
            if not frobenius_condition(f):
                continue
            frob += 1
            if two_map_failures(f, limit=1):
                cor_bad += 1
            if opposite(f) == f and is_p_unit(length(f), F.p):
                tested += 1
                if not is_basic(f, F.p).basic:
                    basic_bad += 1
        out.append(Check(f"Frobenius elements satisfy the two-map identity {name}", cor_bad == 0,
                         {"frobenius_elements": frob, "failures": cor_bad}))
        out.append(Check(f"symmetric Frobenius elements of length prime to p are basic {name}", basic_bad == 0,
                         {"tested": tested, "failures": basic_bad}))
    for name in ("C2", "C3", "C4", "V4", "C2xC4", "D8", "Q8"):
        P = catalog_group(name)
        p = parse_fusion(name).p
        unit = VirtualBiset.of(BisetClass.of(P, P, (u * P.order + u for u in range(P.order))))
        got = fusion_from_element(unit, p)
        ref = inner_fusion(P, p)
        same = all({h.img for h in got.homs(q)} == {h.img for h in ref.homs(q)} for q in P.subgroups())
        out.append(Check(f"unit biset gives the inner system {name}", same))
    return out


def group_hecke_suite(seed: int) -> list[Check]:
    out = []
    G = catalog_group("S3")
    A = GroupHeckeAlgebra(G, sylow_subgroups(G, 3)[0])
    t = A.reps[1]
    out.append(Check("transposition coset squares to the unit", A.h(t) @ A.h(t) == A.one(),
                     {"square": (A.h(t) @ A.h(t)).to_json()}))
    rng = random.Random(seed)
    for name, p in (("S3", 3), ("S4", 2)):
        G = catalog_group(name)
        A = GroupHeckeAlgebra(G, sylow_subgroups(G, p)[0])
        direct = A.structure_constants()
        via = comparison_constants(A)
        reps, counted = double_coset_constants(G, A.P)
        agree = all(tuple(Fraction(x) for x in direct[i][j]) == via[i][j] for i in range(A.rank)
                    for j in range(A.rank))
        counted_ok = reps == A.reps and all(tuple(counted[i][j]) == tuple(Fraction(x) for x in direct[i][j])
                                            for i in range(A.rank) for j in range(A.rank))
        out.append(Check(f"structure constants through the transporter category {name}", agree,
                         {"rank": A.rank, "constants": [[list(c) for c in row] for row in direct]}))
        out.append(Check(f"structure constants agree with double-coset counting {name}", counted_ok))
        objs = all_objects(A)
        idem = True
        for o in objs:
            once = e_T(o)
            twice = e_T(once.target)
            idem = idem and twice.target == once.target and twice.coefficient == 1
        out.append(Check(f"retraction idempotent on all objects {name}", idem, {"objects": len(objs)}))
        bad = 0
        for _ in range(20):
            r, s = rng.choice(objs), rng.choice(objs)
            rs = ht_multiply(object_sum(r), object_sum(s))
            er, es = e_T_sum(object_sum(r)), e_T_sum(object_sum(s))
            if e_T_sum(ht_multiply(er, es)) != e_T_sum(rs):
                bad += 1
            k = object_sum(r) - e_T_sum(object_sum(r))
            if e_T_sum(ht_multiply(k, object_sum(s))) or e_T_sum(ht_multiply(object_sum(s), k)):
                bad += 1
        out.append(Check(f"retraction compatible with products and kernel is an ideal {name}", bad == 0,
                         {"samples": 20, "failures": bad}))
    return out


def structure_suite(seed: int, pairs: int = 100) -> list[Check]:
    out = []
    for name, F in catalog_systems():
        rng = random.Random(f"{seed}:{name}")
        B = hecke_basis(F)
        K = kernel_basis(B)
        H = stable_lattice(B)
        kh_zero = all(not multiply(k, h) for k in K for h in H)
        meet = rank([list(v.coeffs) for v in K + H]) == len(K) + len(H)
        burnside = len(stable_burnside_basis(F)) == len(F.classes)
        nf = set(N_F_indices(B))
        ideal = True
        for i in nf:
            a = B.basis_element(i)
            for j in range(B.rank):
                b = B.basis_element(j)
                for prod in (multiply(a, b), multiply(b, a)):
                    if any(k not in nf for k, _ in prod.terms()):
                        ideal = False
        neg = 0
        for _ in range(pairs):
            g = B.element([rng.randint(0, 2) if rng.random() < 0.3 else 0 for _ in range(B.rank)])
            h = B.element([rng.randint(0, 2) if rng.random() < 0.3 else 0 for _ in range(B.rank)])
            diff = e_F(multiply(e_F(g), e_F(h))) - e_F(multiply(g, h))
            if not diff.is_positive():
                neg += 1
        out.append(Check(f"kernel annihilates stable elements {name}", kh_zero, {"kernel": len(K), "stable": len(H)}))
        out.append(Check(f"kernel meets stable lattice trivially {name}", meet))
        out.append(Check(f"stable Burnside rank equals class count {name}", burnside,
                         {"classes": len(F.classes)}))
        out.append(Check(f"non-selfcentralizing classes form an ideal {name}", ideal, {"size": len(nf)}))
        out.append(Check(f"retraction defect is nonnegative {name}", neg == 0, {"pairs": pairs, "failures": neg}))
    return out


SUITES: dict[str, Callable[[int], list[Check]]] = {
    "mackey-oracle": mackey_suite,
    "scalar-oracle": scalar_suite,
    "algebra-laws": algebra_laws_suite,
    "s3-idempotent": s3_suite,
    "s4-fusion": s4_suite,
    "exterior-counts": exterior_counts_suite,
    "stable-construction": stable_suite,
    "basic-elements": basic_suite,
    "group-hecke": group_hecke_suite,
    "hecke-structure": structure_suite,
}


def run_suite(name: str, seed: int = DEFAULT_SEED) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(name)
    t0 = time.perf_counter()
    checks = SUITES[name](seed)
    return SuiteResult(name, checks, time.perf_counter() - t0, seed)
