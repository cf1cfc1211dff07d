from __future__ import annotations

import itertools
from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from ringdyn import linalg as la

small = st.integers(-6, 6)


def int_matrix(rows, cols):
    return st.lists(st.lists(small, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


def brute_det(M):
    n = len(M)
    total = 0
    for perm in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        prod = 1
        for i, j in enumerate(perm):
            prod *= M[i][j]
        total += sign * prod
    return total


@given(int_matrix(3, 3))
def test_det_matches_permutation_expansion(M):
    assert la.det(M) == brute_det(M)


@given(int_matrix(3, 4))
def test_hnf_transform_is_unimodular(M):
    H, U = la.hnf_with_transform(M)
    assert la.matmul(U, M) == H
    assert abs(la.det(U)) == 1
    pivots = []
    for row in H:
        nz = [j for j, x in enumerate(row) if x]
        if nz:
            pivots.append(nz[0])
            assert row[nz[0]] > 0
    assert pivots == sorted(set(pivots))


@given(int_matrix(2, 4))
def test_integer_kernel_is_kernel_and_saturated(M):
    K = la.integer_kernel(M, 4)
    for v in K:
        assert la.matvec(M, v) == [0] * len(M)
    assert len(K) == 4 - la.rank(M)
    if K:
        assert la.saturate(K, 4) == la.hnf(K)


def test_saturate_examples():
    assert la.saturate([[2, 4]], 2) == [[1, 2]]
    assert la.saturate([[1, 0], [0, 3]], 2) == [[1, 0], [0, 1]]


def test_complete_basis_examples():
    assert la.complete_basis([[2, 1]], la.identity(2)) == [[2, 1], [1, 0]]
    B = la.complete_basis([[1, 1, 1]], la.identity(3))
    assert abs(la.det(B)) == 1


@given(st.lists(small, min_size=3, max_size=3).filter(lambda v: any(v)))
def test_complete_basis_of_primitive_vector(v):
    p = la.primitive(v)
    B = la.complete_basis([p], la.identity(3))
    assert B[0] == p
    assert abs(la.det(B)) == 1


def test_solve_and_inverse():
    A = [[2, 1], [1, 1]]
    assert la.matmul(A, la.inverse(A)) == la.identity(2)
    assert la.solve(A, [3, 2]) == [Fraction(1), Fraction(1)]
    assert la.solve([[1, 1], [2, 2]], [1, 3]) is None
