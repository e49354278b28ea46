from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from artifact.linalg import (LinearAlgebraError, integer_kernel, is_p_local, is_p_unit, p_valuation, rank,
                             rational_reconstruction, solve, solve_mod)

matrices = st.integers(1, 4).flatmap(lambda r: st.integers(1, 5).flatmap(
    lambda c: st.lists(st.lists(st.integers(-5, 5), min_size=c, max_size=c), min_size=r, max_size=r)))


@given(matrices)
def test_rank_matches_sympy(a):
    assert rank(a) == sympy.Matrix(a).rank()


@given(matrices)
def test_integer_kernel(a):
    n = len(a[0])
    ker = integer_kernel(a, n)
    assert len(ker) == n - sympy.Matrix(a).rank()
    for v in ker:
        assert all(sum(r[i] * v[i] for i in range(n)) == 0 for r in a)
    if ker:
        # a Z-basis: the kernel vectors span a saturated lattice, so the gcd of maximal minors is 1
        m = sympy.Matrix(ker)
        minors = [m.extract(list(range(len(ker))), list(cols)).det()
                  for cols in __import__("itertools").combinations(range(n), len(ker))]
        assert sympy.gcd_list(minors) == 1


def test_solve_and_inconsistency():
    cols = [[1, 0, 1], [0, 1, 1]]
    assert solve(cols, [2, 3, 5]) == [2, 3]
    assert solve(cols, [Fraction(1, 2), 0, Fraction(1, 2)]) == [Fraction(1, 2), 0]
    with pytest.raises(LinearAlgebraError):
        solve(cols, [1, 1, 0])


def test_solve_mod():
    x = solve_mod([[1, 1], [1, 2]], [3, 5], 7)
    assert x is not None
    assert (x[0] + x[1]) % 7 == 3 and (x[0] + 2 * x[1]) % 7 == 5
    assert solve_mod([[1, 1], [2, 2]], [1, 3], 5) is None


@given(st.integers(-30, 30), st.integers(1, 30))
def test_rational_reconstruction(r, s):
    m = 2 ** 20
    if s % 2 == 0:
        return
    a = r * pow(s, -1, m) % m
    assert rational_reconstruction(a, m) == Fraction(r, s)


def test_valuations():
    assert p_valuation(Fraction(12, 5), 2) == 2
    assert p_valuation(Fraction(5, 12), 2) == -2
    assert is_p_local(Fraction(1, 3), 2) and not is_p_local(Fraction(1, 2), 2)
    assert is_p_unit(Fraction(3, 5), 2) and not is_p_unit(4, 2)
