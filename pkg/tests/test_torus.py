from __future__ import annotations

import cmath
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ringdyn import linalg as la
from ringdyn.errors import EmptyBox, NonCommuting, NotUnipotent, PreconditionFailed
from ringdyn.multipoly import MultiPolyQ
from ringdyn.reals import SymbolicReal
from ringdyn.torus import (
    AffineUnipotentMap,
    PolynomialTorusSequence,
    closed_form_orbit,
    closure_basis_hnf,
    equidistribution_report,
    folner_box,
    is_unipotent_triangular,
    iterate_orbit,
    orbit_closure,
    simultaneous_triangularize,
    weyl_average,
    weyl_bound_linear,
)

alpha = SymbolicReal.gen("sqrt2")
beta = SymbolicReal.gen("sqrt3")
n = MultiPolyQ.variable(1, 0)
n1, n2 = MultiPolyQ.variables(2)


def seq(*coords, nvars=1):
    return PolynomialTorusSequence.from_terms(nvars, coords)


LINE = seq({(1,): alpha}, {(1,): 2 * alpha})
PARABOLA = seq({(1,): alpha}, {(2,): alpha})
HALF = seq({(1,): Fraction(1, 2)})

SKEW = AffineUnipotentMap([[1, 0], [1, 1]], [alpha, 0])
ROT = AffineUnipotentMap([[1]], [alpha])
HEIS_A = AffineUnipotentMap([[1, 0, 0], [1, 1, 0], [0, 1, 1]], [alpha, beta, 0])
SYSTEMS = [
    ([ROT], [n * n], [SymbolicReal(Fraction(1, 3))], 1),
    ([SKEW], [n], [SymbolicReal(Fraction(1, 5)), beta], 1),
    ([HEIS_A], [n], [0, 0, SymbolicReal(Fraction(1, 2))], 1),
    ([SKEW, AffineUnipotentMap([[1, 0], [0, 1]], [0, beta])], [n1, n2 * n2 + n1], [0, 0], 2),
    ([AffineUnipotentMap([[1, 0], [2, 1]], [Fraction(1, 3), alpha])], [n * (n - 1) / 2], [alpha, 0], 1),
]


# closed-form orbits

def test_rotation_square_orbit():
    x = SymbolicReal(Fraction(1, 7))
    u = closed_form_orbit([ROT], [n * n], [x])
    assert u.evaluate([5]) == [x + 25 * alpha]


def test_skew_orbit_formula():
    x, y = SymbolicReal(Fraction(1, 3)), beta
    u = closed_form_orbit([SKEW], [n], [x, y])
    for k in range(-50, 51):
        assert u.evaluate([k]) == [x + k * alpha, y + k * x + (k * (k - 1) // 2) * alpha]


def test_zero_exponent_is_constant():
    u = closed_form_orbit([SKEW], [MultiPolyQ.zero(1)], [alpha, beta])
    assert u.evaluate([9]) == [alpha, beta]


@pytest.mark.parametrize("maps,exps,x,d", SYSTEMS)
def test_closed_form_matches_iteration(maps, exps, x, d):
    u = closed_form_orbit(maps, exps, x)
    pts = [(k,) for k in range(-20, 21)] if d == 1 else [(a, b) for a in range(-4, 5) for b in range(-4, 5)]
    for pt in pts:
        assert u.evaluate(pt) == iterate_orbit(maps, exps, x, pt)


def test_map_errors():
    with pytest.raises(NotUnipotent):
        AffineUnipotentMap([[2, 0], [0, 1]], [0, 0])
    with pytest.raises(NonCommuting):
        closed_form_orbit([SKEW, AffineUnipotentMap([[1, 1], [0, 1]], [0, 0])], [n, n], [0, 0])
    with pytest.raises(NonCommuting):
        # linear parts commute but translations break (A_i - I)t_j = (A_j - I)t_i
        closed_form_orbit([SKEW, AffineUnipotentMap([[1, 0], [1, 1]], [beta, 0])], [n, n], [0, 0])
    with pytest.raises(PreconditionFailed):
        closed_form_orbit([ROT], [n / 2], [0])


# closures

def test_closure_examples():
    c = orbit_closure(LINE)
    assert c.V_basis == [[1, 2]] and len(c.cosets) == 1
    assert c.annihilator in ([[2, -1]], [[-2, 1]])
    assert orbit_closure(PARABOLA).is_full_torus()
    h = orbit_closure(HALF)
    assert h.V_basis == [] and h.modulus == (2,)
    assert sorted(o[0].q0 for o in h.cosets) == [0, Fraction(1, 2)]


@pytest.mark.parametrize("maps,exps,x,d", SYSTEMS)
@given(shift=st.lists(st.integers(-30, 30), min_size=2, max_size=2))
def test_closure_invariant_under_reparameterization(maps, exps, x, d, shift):
    u = closed_form_orbit(maps, exps, x)
    a = orbit_closure(u)
    b = orbit_closure(u.reparameterize(shift[:d]))
    assert closure_basis_hnf(a) == closure_basis_hnf(b)
    assert len(a.cosets) == len(b.cosets)
    for off in b.cosets:
        assert a.contains(off)


@pytest.mark.parametrize("maps,exps,x,d", SYSTEMS + [([ROT], [n], [0], 1)])
def test_orbit_points_lie_in_closure(maps, exps, x, d):
    u = closed_form_orbit(maps, exps, x)
    c = orbit_closure(u)
    rng = random.Random(1)
    for _ in range(10 ** 4):
        pt = tuple(rng.randint(-10 ** 4, 10 ** 4) for _ in range(d))
        assert c.distance(u.evaluate_float(pt)) < 1e-9
    for _ in range(50):
        pt = tuple(rng.randint(-100, 100) for _ in range(d))
        assert c.contains(u.evaluate(pt))


def test_rational_cosets_for_half():
    c = orbit_closure(closed_form_orbit([AffineUnipotentMap([[1]], [Fraction(1, 2)])], [n], [alpha]))
    assert len(c.cosets) == 2
    assert not c.contains([alpha + Fraction(1, 3)])


# triangularization

def test_triangularize_examples():
    P, (B,) = simultaneous_triangularize([[[1, 0], [1, 1]]])
    assert P == la.identity(2) and B == [[1, 0], [1, 1]]
    A = [[3, -4], [1, -1]]
    P, (B,) = simultaneous_triangularize([A])
    assert P == [[1, 2], [0, 1]] and B == [[1, 0], [1, 1]]
    assert la.matmul(A, P) == la.matmul(P, B)
    P, (I, B) = simultaneous_triangularize([la.identity(2), A])
    assert I == la.identity(2) and is_unipotent_triangular(B)


def unipotent_matrix(rng, m):
    L = [[(rng.randint(-2, 2) if j < i else int(i == j)) for j in range(m)] for i in range(m)]
    U = la.identity(m)
    for _ in range(4):
        i, j = rng.sample(range(m), 2)
        c = rng.randint(-2, 2)
        U[i] = [a + c * b for a, b in zip(U[i], U[j])]
    return L, U


@given(st.randoms(use_true_random=False), st.integers(2, 4), st.booleans())
def test_triangularize_conjugated_commuting_pairs(rng, m, lower):
    L, U = unipotent_matrix(rng, m)
    L2 = la.matmul(L, L)
    Uinv = [[int(v) for v in row] for row in la.inverse(U)]
    mats = [la.matmul(U, la.matmul(X, Uinv)) for X in (L, L2)]
    P, Bs = simultaneous_triangularize(mats, lower=lower)
    assert la.det(P) != 0
    for A, B in zip(mats, Bs):
        assert la.matmul(A, P) == la.matmul(P, B)
        assert is_unipotent_triangular(B, lower=lower)


def test_triangularize_rejects_noncommuting():
    with pytest.raises(NonCommuting):
        simultaneous_triangularize([[[1, 0], [1, 1]], [[1, 1], [0, 1]]])


# Weyl sums

def test_weyl_examples():
    assert abs(weyl_average((2, -1), LINE, folner_box(500, 1)) - 1) < 1e-12
    assert weyl_average((0, 0), PARABOLA, folner_box(500, 1)) == 1
    for N in (10, 100, 1000, 12345):
        got = weyl_average((1, 0), LINE, [(1, N)])
        assert abs(got) <= weyl_bound_linear(math.sqrt(2), N)
    with pytest.raises(EmptyBox):
        weyl_average((1, 0), LINE, [(5, 4)])


def test_weyl_matches_direct_sum():
    got = weyl_average((1, 3), PARABOLA, folner_box(300, 1))
    direct = sum(cmath.exp(2j * math.pi * (k * math.sqrt(2) + 3 * k * k * math.sqrt(2))) for k in range(-300, 301)) / 601
    assert abs(got - direct) < 1e-9
    assert abs(weyl_average((1,), HALF, folner_box(100, 1)) - 1 / 201) < 1e-12


def test_weyl_partition_independent():
    u = closed_form_orbit([SKEW, AffineUnipotentMap([[1, 0], [0, 1]], [0, beta])], [n1, n2 * n2 + n1], [0, 0])
    box = folner_box(150, 2)
    ref = weyl_average((1, 2), u, box)
    for threads, chunk in [(1, 1000), (4, 1 << 16), (3, 777), (8, 301)]:
        assert abs(weyl_average((1, 2), u, box, threads=threads, chunk=chunk) - ref) <= 1e-10


def test_report_line_and_half():
    rep = equidistribution_report(LINE, orbit_closure(LINE), [200, 2000], chars=[(2, -1), (1, 0)])
    exact = rep.results[0]
    assert exact.annihilates and exact.status and abs(exact.measured[-1] - exact.predicted) <= 1e-12
    rep = equidistribution_report(HALF, orbit_closure(HALF), [100], chars=[(2,)])
    assert rep.passed
    assert all(ch["error"] <= 1e-12 for ch in rep.results[0].class_checks)
    assert rep.to_csv().splitlines()[0] == "character,predicted,measured,bound,status"


def test_report_parabola_small_ladder():
    rep = equidistribution_report(PARABOLA, orbit_closure(PARABOLA), [1000, 10000], c_max=1)
    assert rep.passed
    assert all(abs(r.measured[-1]) <= 0.05 for r in rep.results)
