"""Exact integer, rational and modular linear algebra on small dense matrices."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt
from typing import Sequence


class LinearAlgebraError(ArithmeticError):
    """Inconsistent system or failed reconstruction."""


def rank(rows: Sequence[Sequence[Fraction | int]]) -> int:
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
    return r


def integer_kernel(a: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Z-basis of ``{x ∈ Z^n : A x = 0}`` by unimodular column reduction of ``[A; I]``."""
    rows = [list(map(int, r)) for r in a]
    # columns of the stacked matrix; each column is (A-part, I-part)
    cols = [([r[j] for r in rows], [1 if i == j else 0 for i in range(ncols)]) for j in range(ncols)]
    active = list(range(ncols))
    for i in range(len(rows)):
        while True:
            nz = [j for j in active if cols[j][0][i] != 0]
            if len(nz) <= 1:
                break
            piv = min(nz, key=lambda j: abs(cols[j][0][i]))
            pv = cols[piv][0][i]
            for j in nz:
                if j == piv:
                    continue
                q = cols[j][0][i] // pv
                aj, ij = cols[j]
                ap, ip = cols[piv]
                cols[j] = ([x - q * y for x, y in zip(aj, ap)], [x - q * y for x, y in zip(ij, ip)])
        nz = [j for j in active if cols[j][0][i] != 0]
        if nz:
            active.remove(nz[0])
    basis = [cols[j][1] for j in active]
    for v in basis:
        for r in rows:
            if sum(x * y for x, y in zip(r, v)) != 0:
                raise LinearAlgebraError("kernel vector fails the system")
    return basis


def solve(columns: Sequence[Sequence[Fraction | int]], target: Sequence[Fraction | int]) -> list[Fraction]:
    """Coefficients ``c`` with ``Σ c_i columns[i] = target`` (columns independent)."""
    n = len(columns)
    dim = len(target)
    m = [[Fraction(columns[j][i]) for j in range(n)] + [Fraction(target[i])] for i in range(dim)]
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, dim) if m[i][c] != 0), None)
        if piv is None:
            raise LinearAlgebraError("columns are dependent")
        m[r], m[piv] = m[piv], m[r]
        pr = m[r]
        inv = 1 / pr[c]
        m[r] = pr = [x * inv for x in pr]
        for i in range(dim):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], pr)]
        r += 1
    if any(m[i][n] != 0 for i in range(r, dim)):
        raise LinearAlgebraError("target is outside the span")
    return [m[i][n] for i in range(n)]


def solve_mod(rows: Sequence[Sequence[int]], rhs: Sequence[int], p: int) -> list[int] | None:
    """One solution of ``A x ≡ b (mod p)``, free variables set to 0; ``None`` if inconsistent."""
    nvars = len(rows[0]) if rows else 0
    m = [[x % p for x in r] + [b % p] for r, b in zip(rows, rhs)]
    where = [-1] * nvars
    r = 0
    for c in range(nvars):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [(x * inv) % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[r])]
        where[c] = r
        r += 1
    if any(m[i][nvars] for i in range(r, len(m))):
        return None
    return [m[where[c]][nvars] if where[c] >= 0 else 0 for c in range(nvars)]


def rational_reconstruction(a: int, m: int) -> Fraction | None:
    """``r/s ≡ a (mod m)`` with ``|r|, s ≤ sqrt(m/2)`` by the half extended Euclid algorithm."""
    a %= m
    bound = isqrt(m // 2)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    if gcd(abs(s1), m) != 1:
        return None
    return Fraction(r1, s1)


def p_valuation(x: Fraction | int, p: int) -> int:
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def is_p_local(x: Fraction | int, p: int) -> bool:
    return Fraction(x).denominator % p != 0


def is_p_unit(x: Fraction | int, p: int) -> bool:
    return x != 0 and p_valuation(x, p) == 0
