"""Brute-force reference computations, written independently of the main algorithms."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from .bisets import BisetClass, context
from .fusion import FusionSystem
from .groups import FiniteGroup, Hom


# explicit bisets ------------------------------------------------------------------

def _cosets(L: FiniteGroup, R: FiniteGroup, d: Iterable[int]) -> tuple[list[frozenset[int]], dict[int, int]]:
    """Left cosets ``gD`` in ``L×R`` as explicit sets, plus element → coset index."""
    nr = R.order
    d = list(d)
    cosets: list[frozenset[int]] = []
    where: dict[int, int] = {}
    for g in range(L.order * nr):
        if g in where:
            continue
        ga, gb = divmod(g, nr)
        c = frozenset(L.table[ga][x // nr] * nr + R.table[gb][x % nr] for x in d)
        for y in c:
            where[y] = len(cosets)
        cosets.append(c)
    return cosets, where


def _act(L: FiniteGroup, R: FiniteGroup, a: int, b: int, coset: frozenset[int], where: dict[int, int]) -> int:
    """Index of ``(a,b)·coset`` (acting by left multiplication in ``L×R``)."""
    nr = R.order
    g = next(iter(coset))
    return where[L.table[a][g // nr] * nr + R.table[b][g % nr]]


def mackey_oracle(c1: BisetClass, c2: BisetClass) -> dict[BisetClass, int]:
    """Orbits of ``L×R`` on the explicit set ``X ×_M Y`` for ``X = (L×M)/D``, ``Y = (M×R)/E``."""
    L, M, R = c1.left, c1.right, c2.right
    xs, xw = _cosets(L, M, c1.members)
    ys, yw = _cosets(M, R, c2.members)
    # X as a right M-set: x·m = (1, m⁻¹)·x ; Y as a left M-set: m·y = (m, 1)·y
    xr = [[_act(L, M, 0, M.inv[m], x, xw) for m in range(M.order)] for x in xs]
    yl = [[_act(M, R, m, 0, y, yw) for m in range(M.order)] for y in ys]
    # the balanced product: (x·m, y) ~ (x, m·y)
    point: dict[tuple[int, int], int] = {}
    npts = 0
    for i in range(len(xs)):
        for j in range(len(ys)):
            if (i, j) in point:
                continue
            for m in range(M.order):
                point[(xr[i][m], yl[j][M.inv[m]])] = npts
            npts += 1
    xl = [[_act(L, M, a, 0, x, xw) for a in range(L.order)] for x in xs]
    yr = [[_act(M, R, 0, c, y, yw) for c in range(R.order)] for y in ys]
    rep: dict[int, tuple[int, int]] = {}
    for pair, k in point.items():
        rep.setdefault(k, pair)
    seen: set[int] = set()
    out: dict[BisetClass, int] = {}
    nr = R.order
    for k in range(npts):
        if k in seen:
            continue
        i, j = rep[k]
        stab = []
        for a in range(L.order):
            for c in range(R.order):
                img = point[(xl[i][a], yr[j][c])]
                seen.add(img)
                if img == k:
                    stab.append(a * nr + c)
        cls = BisetClass.of(L, R, stab)
        out[cls] = out.get(cls, 0) + 1
    return out


def equivariant_map_count(L: FiniteGroup, R: FiniteGroup, d: Iterable[int], e: Iterable[int]) -> int:
    """Number of ``L×R``-maps ``(L×R)/D → (L×R)/E``, found by trying every image of the base coset."""
    xs, xw = _cosets(L, R, d)
    ys, yw = _cosets(L, R, e)
    nr = R.order
    group = [(a, b) for a in range(L.order) for b in range(nr)]
    base = xw[0]
    count = 0
    for y0 in range(len(ys)):
        f: dict[int, int] = {}
        ok = True
        for a, b in group:
            x = _act(L, R, a, b, xs[base], xw)
            y = _act(L, R, a, b, ys[y0], yw)
            if f.setdefault(x, y) != y:
                ok = False
                break
        if ok and all(f[_act(L, R, a, b, xs[x], xw)] == _act(L, R, a, b, ys[f[x]], yw)
                      for x in f for a, b in group):
            count += 1
    return count


# Hecke rank -----------------------------------------------------------------------

def hecke_rank_oracle(F: FusionSystem) -> int:
    """Number of distinct classes ``Δ_{φ,φ'}(Q)`` with ``φ, φ' ∈ F(P,Q)``."""
    P = F.base
    ctx = context(P, P)
    n = P.order
    seen = set()
    for q in F.subgroups():
        homs = F.homs(q)
        for a in homs:
            for b in homs:
                seen.add(ctx.canonical(a(u) * n + b(u) for u in q))
    return len(seen)


# outer automizers and strongly embedded subgroups ----------------------------------

def outer_automizer_table(F: FusionSystem, q: Iterable[int]) -> list[list[int]]:
    """Cayley table of ``F(Q)/Inn(Q)`` built from image dictionaries (composition ``b`` then ``a``)."""
    q = frozenset(q)
    P = F.base
    inner = {tuple(sorted((u, P.conj(v, u)) for u in q)) for v in q}
    autos = [dict(zip(h.src, h.img)) for h in F.homs(q) if h.image == q]
    classes: list[frozenset[tuple]] = []
    index: dict[tuple, int] = {}
    for a in autos:
        key = tuple(sorted(a.items()))
        if key in index:
            continue
        coset = frozenset(tuple(sorted((u, a[dict(i)[u]]) for u in q)) for i in inner)
        for k in coset:
            index[k] = len(classes)
        classes.append(coset)
    ident = index[tuple(sorted((u, u) for u in q))]
    order = [ident] + [i for i in range(len(classes)) if i != ident]
    pos = {c: k for k, c in enumerate(order)}
    reps = [dict(next(iter(classes[c]))) for c in order]
    return [[pos[index[tuple(sorted((u, a[b[u]]) for u in q))]] for b in reps] for a in reps]


def _p_subgroups(H: FiniteGroup, p: int) -> list[frozenset[int]]:
    out = []
    for s in H.subgroups():
        n = len(s)
        while n % p == 0:
            n //= p
        if n == 1 and len(s) > 1:
            out.append(s)
    return out


def quillen_components(H: FiniteGroup, p: int) -> int:
    """Connected components of the inclusion graph on nontrivial p-subgroups of ``H``."""
    subs = _p_subgroups(H, p)
    parent = list(range(len(subs)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, a in enumerate(subs):
        for j, b in enumerate(subs):
            if a < b:
                parent[find(i)] = find(j)
    return len({find(i) for i in range(len(subs))})


def has_strongly_embedded_oracle(H: FiniteGroup, p: int) -> bool:
    """A proper strongly p-embedded subgroup exists iff the p-subgroup graph is disconnected."""
    return quillen_components(H, p) > 1


def essential_oracle(F: FusionSystem) -> list[tuple[int, ...]]:
    """Fully normalized class representatives that are selfcentralizing with a disconnected automizer graph."""
    out = []
    for cls in F.classes:
        q = min((s for s in cls if F.is_fully_normalized(s)), key=lambda s: sorted(s))
        if not F.is_selfcentralizing(q):
            continue
        H = FiniteGroup("Out", outer_automizer_table(F, q))
        if has_strongly_embedded_oracle(H, F.p):
            out.append(tuple(sorted(q)))
    return sorted(out, key=lambda s: (len(s), s))


# group Hecke algebra --------------------------------------------------------------

def double_coset_constants(G: FiniteGroup, P: Iterable[int]) -> tuple[list[int], list[list[list[Fraction]]]]:
    """``c[i][j][k] = #{x ∈ D_i : x⁻¹z_k ∈ D_j} / |P|`` by counting."""
    P = sorted(P)
    t, inv = G.table, G.inv
    reps: list[int] = []
    cosets: list[frozenset[int]] = []
    covered: set[int] = set()
    for g in range(G.order):
        if g not in covered:
            c = frozenset(t[t[a][g]][b] for a in P for b in P)
            covered |= c
            reps.append(g)
            cosets.append(c)
    table = [[[Fraction(sum(1 for x in di if t[inv[x]][z] in dj), len(P)) for z in reps]
              for dj in cosets] for di in cosets]
    return reps, table


def maximal_objects_oracle(A, obj) -> set:
    """Maximal objects receiving a morphism from ``obj``, by exhaustive search over transporters."""
    from .group_hecke import all_objects

    G, t, P = A.G, A.G.table, A.P

    def morphism(src, dst) -> bool:
        # s with Q_src ⊆ Q_dst^s, P·x_dst·s = P·x_src and P·x'_dst·s = P·x'_src
        qs, qd = frozenset(src.sub), frozenset(dst.sub)
        pxs = {t[u][src.x] for u in P}
        px2s = {t[u][src.x2] for u in P}
        for s in range(G.order):
            if qs <= G.conj_set(G.inv[s], qd) and t[dst.x][s] in pxs and t[dst.x2][s] in px2s:
                return True
        return False

    objs = all_objects(A)
    above = [o for o in objs if morphism(obj, o)]
    return {o for o in above
            if not any(morphism(o, r) and len(r.sub) > len(o.sub) for r in objs)}


# idempotents of a small stable algebra ----------------------------------------------

def idempotents_by_solving(F: FusionSystem) -> list[list[Fraction]]:
    """Nonzero p-local idempotents ``Σ x_i b_i`` of the stable lattice, from ``ω∘ω = ω`` solved exactly.

    Products are formed by biset composition and compared class by class, so
    no structure constants of the main implementation are used.
    """
    import sympy

    from .bisets import compose
    from .hecke import hecke_basis, stable_lattice

    basis = hecke_basis(F)
    lat = [b.biset for b in stable_lattice(basis)]
    r = len(lat)
    xs = sympy.symbols(f"x0:{r}")
    square: dict = {}
    for i in range(r):
        for j in range(r):
            for c, v in compose(lat[i], lat[j]).coeffs.items():
                square[c] = square.get(c, 0) + xs[i] * xs[j] * sympy.Rational(v.numerator, v.denominator)
    linear: dict = {}
    for i in range(r):
        for c, v in lat[i].coeffs.items():
            linear[c] = linear.get(c, 0) + xs[i] * sympy.Rational(v.numerator, v.denominator)
    eqs = [sympy.expand(square.get(c, 0) - linear.get(c, 0)) for c in set(square) | set(linear)]
    eqs = [e for e in eqs if e != 0]
    out = []
    for sol in sympy.solve(eqs, xs, dict=True):
        if any(x not in sol for x in xs):
            continue
        vals = [sol[x] for x in xs]
        if not all(v.is_rational for v in vals):
            continue
        fr = [Fraction(int(v.p), int(v.q)) for v in vals]
        if any(fr) and all(v.denominator % F.p for v in fr):
            vec = [Fraction(0)] * basis.rank
            for c, b in zip(fr, stable_lattice(basis)):
                for i, x in b.terms():
                    vec[i] += c * x
            out.append(vec)
    return out
