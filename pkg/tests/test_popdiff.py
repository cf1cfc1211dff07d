from __future__ import annotations

import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ringdyn.errors import EmptyRange
from ringdyn.intpoly import PolyOverK
from ringdyn.multipoly import MultiPolyQ
from ringdyn.popdiff import (
    GridSet,
    intersection_count,
    intersection_count_naive,
    interval_set,
    popular_differences,
    quadratic_residue_set,
    random_set,
    residue_class_set,
    structured_instances,
)
from ringdyn.ring import make_field

n = MultiPolyQ.variable(1, 0)


def rolled_table(mask: np.ndarray):
    """Row v holds the indicator of {x : x + v in E}, built with numpy.roll."""
    N, d = mask.shape[0], mask.ndim
    vecs = list(itertools.product(range(N), repeat=d))
    rows = [np.roll(mask, tuple(-c for c in v), axis=tuple(range(d))).ravel() for v in vecs]
    return vecs, np.array(rows)


def random_mask(rng, N, d, p=0.5):
    return np.array([rng.random() < p for _ in range(N ** d)]).reshape((N,) * d)


@pytest.mark.parametrize("d,Ns", [(1, range(1, 17)), (2, range(1, 17))])
def test_fast_equals_naive_exhaustive_pairs(d, Ns):
    rng = random.Random(d)
    for N in Ns:
        mask = random_mask(rng, N, d)
        E = GridSet.from_mask(mask)
        vecs, R = rolled_table(mask)
        for i, v1 in enumerate(vecs):
            expected = (R & R[i]).sum(axis=1)
            for j, v2 in enumerate(vecs):
                assert intersection_count(E, [v1, v2]) == expected[j]


def test_fast_equals_loop_oracle_random_large():
    rng = random.Random(100)
    for trial in range(100):
        d = rng.choice([1, 2, 2, 3])
        N = {1: rng.randint(100, 2000), 2: 64, 3: rng.randint(8, 14)}[d]
        E = GridSet.from_mask(random_mask(rng, N, d, rng.random()))
        shifts = [tuple(rng.randrange(N) for _ in range(d)) for _ in range(rng.randint(1, 3))]
        assert intersection_count(E, shifts) == intersection_count_naive(E, shifts)


def test_count_examples():
    full = GridSet.full(2, 7)
    assert intersection_count(full, [(3, 4), (1, 6)]) == 49
    E = GridSet.from_points(2, 7, [(0, 0), (1, 2), (5, 5)])
    assert intersection_count(E, [(0, 0)]) == 3
    assert intersection_count(E, []) == 49


@given(st.integers(2, 20), st.randoms(use_true_random=False), st.integers(1, 4))
def test_permutation_translation_and_layer_bound(N, rng, k):
    E = GridSet.from_mask(random_mask(rng, N, 2))
    shifts = [(rng.randrange(N), rng.randrange(N)) for _ in range(k)]
    c = intersection_count(E, shifts)
    perm = shifts[:]
    rng.shuffle(perm)
    assert intersection_count(E, perm) == c
    t = (rng.randrange(N), rng.randrange(N))
    assert intersection_count(E.translate(t), shifts) == c
    assert intersection_count(E, [(0, 0)] + shifts) <= E.popcount


@given(st.integers(1, 12), st.integers(1, 3), st.randoms(use_true_random=False))
def test_io_round_trips(N, d, rng):
    E = GridSet.from_mask(random_mask(rng, N, d, rng.random()))
    assert GridSet.from_bytes(E.to_bytes()) == E
    assert GridSet.from_rle(E.to_rle()) == E
    assert E.to_bytes()[:4] == b"GSET" and len(E.to_bytes()) >= 16


def test_popular_differences_examples():
    full = GridSet.full(1, 101)
    rep = popular_differences(full, [n, n * n], Fraction(1, 100))
    assert rep.popular_fraction == 1.0
    empty = GridSet(1, 101)
    assert popular_differences(empty, [n, n * n], Fraction(1, 100)).popular == []
    with pytest.raises(EmptyRange):
        popular_differences(full, [n], Fraction(1, 100), n_range=[])
    with pytest.raises(ValueError):
        popular_differences(full, [n], 0)


def test_popular_counts_include_base_point():
    E = residue_class_set(30, 3)
    rep = popular_differences(E, [3 * n], Fraction(1, 100), n_range=[(1,), (2,)])
    assert rep.counts == {(1,): 10, (2,): 10}
    rep = popular_differences(E, [n], Fraction(1, 100), n_range=[(1,), (3,)])
    assert rep.counts == {(1,): 0, (3,): 10}
    assert rep.popular == [(3,)]


def test_gaussian_family_on_2d_grid():
    G = make_field([1, 0, 1])
    sq = PolyOverK.rational(G, [0, 0, 1])
    E = random_set(24, 0.5, seed=2, d=2).grid
    rep = popular_differences(E, [sq], Fraction(1, 50))
    for m in list(rep.counts)[:30]:
        v = sq(G.element(list(m)))
        shift = tuple(int(c) % 24 for c in v.coords)
        assert rep.counts[m] == intersection_count_naive(E, [(0, 0), shift])


def test_structured_instances():
    assert residue_class_set(96, 3).density == Fraction(1, 3)
    assert interval_set(96, 0, 48).density == Fraction(1, 2)
    assert interval_set(12, 0, 6, d=2).density == Fraction(1, 2)
    assert quadratic_residue_set(7).points() == [(1,), (2,), (4,)]
    lib = structured_instances()
    assert lib["residue_0_mod_3"].density == Fraction(1, 3)
    for seed in range(20):
        rs = random_set(128, 0.3, seed, d=2)
        assert rs.concentrated
    assert structured_instances(seed=5) == structured_instances(seed=5)
