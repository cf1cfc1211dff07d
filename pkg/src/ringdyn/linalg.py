"""Exact linear algebra over Q and Z.

Matrices are plain lists of rows.  Entries are ints or Fractions; every
routine returns fresh lists and never mutates its arguments.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import List, Optional, Sequence, Tuple

Matrix = List[List[Fraction]]


def frac_matrix(M: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in M]


def identity(n: int) -> List[List[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(m: int, n: int) -> List[List[int]]:
    return [[0] * n for _ in range(m)]


def transpose(M: Sequence[Sequence]) -> list:
    return [list(col) for col in zip(*M)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list:
    Bt = transpose(B)
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A: Sequence[Sequence], v: Sequence) -> list:
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def matsub(A, B) -> list:
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def matadd(A, B) -> list:
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def is_zero_matrix(A) -> bool:
    return all(x == 0 for row in A for x in row)


def rref(M: Sequence[Sequence]) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form over Q.  Returns (R, pivot_columns)."""
    R = frac_matrix(M)
    if not R:
        return R, []
    m, n = len(R), len(R[0])
    pivots: List[int] = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if R[i][c] != 0), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        p = R[r][c]
        R[r] = [x / p for x in R[r]]
        for i in range(m):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return R, pivots


def rank(M: Sequence[Sequence]) -> int:
    return len(rref(M)[1]) if M else 0


def nullspace(M: Sequence[Sequence], ncols: Optional[int] = None) -> Matrix:
    """Rational basis (as rows) of {x : M x = 0}."""
    if not M:
        n = ncols or 0
        return frac_matrix(identity(n))
    n = len(M[0])
    R, pivots = rref(M)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -R[i][f]
        basis.append(v)
    return basis


def det(M: Sequence[Sequence]) -> Fraction:
    A = frac_matrix(M)
    n = len(A)
    result = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if A[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            result = -result
        p = A[c][c]
        result *= p
        for i in range(c + 1, n):
            if A[i][c] != 0:
                f = A[i][c] / p
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return result


def inverse(M: Sequence[Sequence]) -> Matrix:
    n = len(M)
    aug = [list(row) + ident for row, ident in zip(frac_matrix(M), identity(n))]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in R]


def solve(M: Sequence[Sequence], b: Sequence) -> Optional[List[Fraction]]:
    """Unique solution of M x = b for square nonsingular M, else None."""
    n = len(M)
    aug = [list(row) + [bi] for row, bi in zip(frac_matrix(M), b)]
    R, pivots = rref(aug)
    if pivots != list(range(n)):
        return None
    return [R[i][n] for i in range(n)]


def denominator_lcm(values) -> int:
    out = 1
    for v in values:
        out = lcm(out, Fraction(v).denominator)
    return out


def clear_denominators(row: Sequence) -> List[int]:
    L = denominator_lcm(row)
    return [int(Fraction(x) * L) for x in row]


def primitive(row: Sequence) -> List[int]:
    """Integer multiple of a rational vector with coprime entries, first nonzero positive."""
    v = clear_denominators(row)
    g = 0
    for x in v:
        g = gcd(g, x)
    if g == 0:
        return v
    v = [x // g for x in v]
    lead = next(x for x in v if x != 0)
    return [-x for x in v] if lead < 0 else v


def xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return (x, y, g) with x*a + y*b == g == gcd(a, b) >= 0."""
    x, nx, y, ny = 1, 0, 0, 1
    g, ng = a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


def hnf_with_transform(M: Sequence[Sequence[int]]) -> Tuple[List[List[int]], List[List[int]]]:
    """Row-style Hermite normal form of an integer matrix.

    Returns (H, U) with U unimodular and U*M == H.  Nonzero rows of H come
    first, pivots are positive and strictly move right, and entries above
    a pivot lie in [0, pivot).
    """
    A = [[int(x) for x in row] for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U = identity(m)
    r = 0
    for c in range(n):
        if r == m:
            break
        for i in range(r + 1, m):
            if A[i][c] == 0:
                continue
            a, b = A[r][c], A[i][c]
            x, y, g = xgcd(a, b)
            p, q = -b // g, a // g
            A[r], A[i] = (
                [x * s + y * t for s, t in zip(A[r], A[i])],
                [p * s + q * t for s, t in zip(A[r], A[i])],
            )
            U[r], U[i] = (
                [x * s + y * t for s, t in zip(U[r], U[i])],
                [p * s + q * t for s, t in zip(U[r], U[i])],
            )
        if A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-s for s in A[r]]
            U[r] = [-s for s in U[r]]
        piv = A[r][c]
        for i in range(r):
            f = A[i][c] // piv
            if f:
                A[i] = [s - f * t for s, t in zip(A[i], A[r])]
                U[i] = [s - f * t for s, t in zip(U[i], U[r])]
        r += 1
    return A, U


def hnf(M: Sequence[Sequence[int]]) -> List[List[int]]:
    """Nonzero rows of the row-style Hermite normal form."""
    H, _ = hnf_with_transform(M)
    return [row for row in H if any(row)]


def integer_kernel(M: Sequence[Sequence], ncols: int) -> List[List[int]]:
    """Z-basis (rows, in HNF) of the lattice {x in Z^n : M x = 0}."""
    rows = [clear_denominators(row) for row in M if any(x != 0 for x in row)]
    if not rows:
        return identity(ncols)
    H, U = hnf_with_transform(transpose(rows))
    kernel = [u for h, u in zip(H, U) if not any(h)]
    return hnf(kernel) if kernel else []


def saturate(rows: Sequence[Sequence], ncols: int) -> List[List[int]]:
    """Z-basis in HNF of span_Q(rows) intersected with Z^n."""
    ann = integer_kernel(rows, ncols)
    return integer_kernel(ann, ncols)


def complete_basis(partial: Sequence[Sequence[int]], lattice: Sequence[Sequence[int]]) -> List[List[int]]:
    """Extend a primitive sub-basis to a Z-basis of ``lattice``.

    ``partial`` must span a saturated sublattice of the lattice spanned by the
    rows of ``lattice`` (itself given by a basis).  Standard basis vectors are
    tried first so that simple inputs give simple answers; the remainder is
    filled from the Hermite transform.
    """
    n = len(lattice[0]) if lattice else 0
    k = len(lattice)
    basis = [list(v) for v in partial]

    def coords_in(vectors):
        # coordinates of vectors with respect to the lattice basis
        out = []
        for v in vectors:
            sol = _solve_rows(lattice, v)
            if sol is None or any(x.denominator != 1 for x in sol):
                return None
            out.append([int(x) for x in sol])
        return out

    for j in range(n):
        if len(basis) == k:
            break
        e = [int(i == j) for i in range(n)]
        cand = basis + [e]
        if rank(cand) != len(cand):
            continue
        C = coords_in(cand)
        if C is None:
            continue
        if _is_primitive_system(C):
            basis = cand
    if len(basis) < k:
        C = coords_in(basis) if basis else []
        if C:
            H, U = hnf_with_transform(transpose(C))
            Uinv = [[int(x) for x in row] for row in inverse(U)]
            extra_coords = [list(col) for col in transpose(Uinv)[len(basis):]]
        else:
            extra_coords = identity(k)
        for c in extra_coords:
            basis.append([sum(ci * row[t] for ci, row in zip(c, lattice)) for t in range(n)])
    assert hnf(basis) == hnf(lattice)
    return basis


def _solve_rows(rows, v):
    # x with sum_i x_i rows[i] == v, or None
    A = transpose(rows)
    R, pivots = rref([list(a) + [b] for a, b in zip(A, v)])
    k = len(rows)
    if k in pivots:
        return None
    x = [Fraction(0)] * k
    for i, p in enumerate(pivots):
        x[p] = R[i][k]
    return x


def _is_primitive_system(C: Sequence[Sequence[int]]) -> bool:
    # rows of C extend to a basis of Z^k iff they span a saturated lattice
    if rank(C) < len(C):
        return False
    return hnf(C) == saturate(C, len(C[0]))
