from __future__ import annotations

import itertools
from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from ringdyn import linalg as la
from ringdyn import upoly


def has_factor_brute(f, p):
    # exhaustive search over monic factors of degree 1..deg/2 in F_p[x]
    n = len(f) - 1
    for k in range(1, n // 2 + 1):
        for tail in itertools.product(range(p), repeat=k):
            g = list(tail) + [1]
            if not upoly.fp_mod(list(f), g, p):
                return True
    return False


@given(st.lists(st.integers(0, 2), min_size=2, max_size=4), st.sampled_from([2, 3]))
def test_rabin_matches_exhaustive_factor_search(tail, p):
    f = tail + [1]
    assert upoly.fp_is_irreducible(f, p) == (not has_factor_brute(f, p))


def test_cubic_irreducible_mod_2():
    f = [-1, -1, 0, 1]
    assert all(upoly.evaluate([c % 2 for c in f], x) % 2 for x in range(2))
    assert upoly.fp_is_irreducible(f, 2)


@given(st.lists(st.lists(st.integers(-5, 5), min_size=3, max_size=3), min_size=3, max_size=3))
def test_charpoly_matches_determinant(M):
    cp = upoly.charpoly(M)
    for x in (-2, 0, 1, 3):
        xI_M = [[(x if i == j else 0) - M[i][j] for j in range(3)] for i in range(3)]
        assert upoly.evaluate(cp, x) == la.det(xI_M)


def test_gcd_and_reflect():
    assert upoly.gcd([-1, -2, 1], [-1, 2, 1]) == [Fraction(1)]
    assert upoly.reflect([-2, 0, 1]) == [-2, 0, 1]
    assert upoly.squarefree_part(upoly.mul([-2, 0, 1], [-2, 0, 1])) == [-2, 0, 1]
    assert upoly.format_poly([-1, -2, 1]) == "x^2 - 2*x - 1"
