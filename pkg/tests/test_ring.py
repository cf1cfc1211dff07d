from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ringdyn import linalg as la
from ringdyn import upoly
from ringdyn.errors import FieldMismatch, NotIrreducible, NotMonic, ZeroDivisor, ZeroInput
from ringdyn.ring import (
    ResidueReducer,
    conjugates_negate,
    field_from_dict,
    make_field,
    min_poly_of,
    mul,
    mult_matrix,
    norm,
    residues,
    subgroup_index,
    subgroup_membership,
)

Q = make_field([0, 1])
GAUSS = make_field([1, 0, 1])
SQRT2 = make_field([-2, 0, 1])
CUBIC = make_field([-1, -1, 0, 1])
FIELDS = [Q, GAUSS, SQRT2, CUBIC]


def elements(field, lo=-5, hi=5, rational=False):
    coord = st.fractions(min_value=lo, max_value=hi, max_denominator=4) if rational else st.integers(lo, hi)
    return st.lists(coord, min_size=field.degree, max_size=field.degree).map(field.element)


# structure and examples

def test_sqrt2_structure_constants():
    assert SQRT2.structure_constants[1][1] == (2, 0)


def test_not_irreducible_and_not_monic():
    with pytest.raises(NotIrreducible):
        make_field([-1, 0, 1])
    with pytest.raises(NotMonic):
        make_field([1, 0, 2])
    assert make_field([-1, 0, 1], assert_irreducible=True).degree == 2


def test_cubic_certificate():
    assert CUBIC.degree == 3
    assert CUBIC.certificate == 2


@pytest.mark.parametrize("field", FIELDS)
def test_structure_constant_invariants(field):
    a = field.structure_constants
    d = field.degree
    for j in range(d):
        for l in range(d):
            assert a[j][l] == a[l][j]
            assert a[0][l] == tuple(int(m == l) for m in range(d))
    b = field.basis()
    for x in b:
        for y in b:
            for z in b:
                assert (x * y) * z == x * (y * z)


def test_mul_examples():
    t = SQRT2.theta
    assert (1 + t) * (1 + t) == 3 + 2 * t
    i = GAUSS.theta
    assert (2 + 3 * i) * (2 - 3 * i) == 13
    assert mul(1 + t, SQRT2.one) == 1 + t
    with pytest.raises(FieldMismatch):
        mul(t, GAUSS.theta)


def test_mult_matrix_examples():
    t = SQRT2.theta
    assert mult_matrix(t) == [[0, 2], [1, 0]]
    assert mult_matrix(SQRT2.one) == la.identity(2)
    assert mult_matrix(1 + t) == [[1, 2], [1, 1]]


def test_min_poly_examples():
    t = SQRT2.theta
    assert min_poly_of(t) == [-2, 0, 1]
    assert min_poly_of(SQRT2.one) == [-1, 1]
    assert min_poly_of(1 + t) == [-1, -2, 1]


def test_conjugates_negate_examples():
    assert conjugates_negate(SQRT2.theta)
    assert conjugates_negate(GAUSS.theta)
    assert not conjugates_negate(1 + SQRT2.theta)
    with pytest.raises(ZeroInput):
        conjugates_negate(SQRT2.zero)


def test_membership_and_residues_examples():
    i = GAUSS.theta
    assert subgroup_membership(3 + i, 1 + i)
    assert not subgroup_membership(GAUSS.one, 1 + i)
    assert residues(Q.scalar(2)) == [Q.scalar(0), Q.scalar(1)]
    assert len(residues(1 + i)) == 2
    with pytest.raises(ZeroDivisor):
        residues(GAUSS.zero)


def test_field_round_trip():
    assert field_from_dict(CUBIC.to_dict()) == CUBIC


# invariants

@pytest.mark.parametrize("field", FIELDS)
def test_mult_matrix_matches_product_200_pairs(field):
    rng = random.Random(field.degree)
    for _ in range(200):
        a = field.element([Fraction(rng.randint(-9, 9), rng.randint(1, 3)) for _ in range(field.degree)])
        b = field.element([Fraction(rng.randint(-9, 9), rng.randint(1, 3)) for _ in range(field.degree)])
        assert la.matvec(mult_matrix(a), b.coords) == list(mul(a, b).coords)


@pytest.mark.parametrize("field", FIELDS)
@given(data=st.data())
def test_cayley_hamilton_through_squarefree_part(field, data):
    a = data.draw(elements(field, rational=True))
    m = min_poly_of(a)
    assert m[-1] == 1
    assert field.degree % (len(m) - 1) == 0
    assert la.is_zero_matrix(upoly.eval_matrix(m, mult_matrix(a)))


@pytest.mark.parametrize("field", FIELDS)
@given(data=st.data())
def test_commutative_and_distributive(field, data):
    a, b, c = (data.draw(elements(field)) for _ in range(3))
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c


@pytest.mark.parametrize("field", [GAUSS, SQRT2, CUBIC])
@given(data=st.data())
def test_residues_complete_and_distinct(field, data):
    r = data.draw(elements(field, -3, 3).filter(lambda x: not x.is_zero() and abs(norm(x)) <= 40))
    reps = residues(r)
    assert len(reps) == abs(la.det(mult_matrix(r))) == abs(norm(r)) == subgroup_index(r)
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            assert not subgroup_membership(reps[i] - reps[j], r)


@given(data=st.data())
def test_reduce_lands_in_residue_set(data):
    r = data.draw(elements(GAUSS, -3, 3).filter(lambda x: not x.is_zero()))
    n = data.draw(elements(GAUSS, -20, 20))
    red = ResidueReducer(r)
    m = red.reduce(n)
    assert subgroup_membership(n - m, r)
    assert m in residues(r)


def _float_oracle(alpha) -> bool:
    m = [float(c) for c in min_poly_of(alpha)]
    roots = np.roots(m[::-1])
    return any(abs(roots[i] + roots[j]) < 1e-9 for i in range(len(roots)) for j in range(i + 1, len(roots)))


def conjugate_corpus():
    rng = random.Random(7)
    out = [SQRT2.theta, GAUSS.theta, 1 + SQRT2.theta]
    while len(out) < 50:
        field = rng.choice([GAUSS, SQRT2, CUBIC])
        coords = [rng.randint(-3, 3) for _ in range(field.degree)]
        if rng.random() < 0.4:
            coords[0] = 0
        a = field.element(coords)
        if not a.is_zero():
            out.append(a)
    return out


def test_conjugates_negate_matches_float_oracle():
    for a in conjugate_corpus():
        assert conjugates_negate(a) == _float_oracle(a), a
