import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from tacegar.dbm import INF, LE, ZERO, Dbm, bound_add
from tacegar.domain import AbstractDomain
from tacegar.interpolation import (INTERSECTING, Interpolant, density, interpolant, interpolant_simple,
                                   minimal_interpolant, refine_by_interpolant)
from tacegar.oracle import random_dbm

from conftest import no_single_constraint_pair, min_density_exhaustive, random_disjoint_pair

# B as usually printed, entry (i, j) bounding j - i; rows 0, x, y, z
B_PRINTED = [[0, 3, 4, 2], [-1, 0, 1, 1], [-2, 1, 0, 0], [0, 1, 2, 0]]


def test_reference_pair_matches_transposed_matrix():
    a, b = no_single_constraint_pair()
    for i in range(4):
        for j in range(4):
            assert b.entry(j, i) == LE(B_PRINTED[i][j])
    assert density(b) == 12
    assert a.intersect(b).is_empty()


def test_reference_pair_has_no_simple_interpolant():
    a, b = no_single_constraint_pair()
    for x in range(4):
        for y in range(4):
            if x != y:
                assert bound_add(a.entry(x, y), b.entry(y, x)) >= ZERO
    assert min_density_exhaustive(a, b) == 2
    # and the other way round: nothing with one constraint holds b and misses a
    assert min_density_exhaustive(b, a) == 2
    r = minimal_interpolant(a, b)
    assert r.k == 2 and r.separates(a, b)
    s = interpolant_simple(a, b)
    assert s is not None and s.separates(a, b) and s.density <= 2


def test_intersecting_pairs():
    z = Dbm.from_constraints(3, [(1, 0, LE(3))])
    assert minimal_interpolant(z, z) is INTERSECTING
    assert not minimal_interpolant(z, z)
    assert interpolant_simple(z, z) is None
    with pytest.raises(ValueError):
        interpolant(z, z)


def test_empty_input_rejected():
    with pytest.raises(ValueError):
        minimal_interpolant(Dbm.empty(2), Dbm.universe(2))


def test_single_constraint_density():
    assert density(Dbm.raw(3, [LE(0), LE(2), INF, INF, LE(0), INF, INF, INF, LE(0)])) == 1
    assert density(Dbm.raw(2, [LE(0), INF, INF, LE(0)])) == 0


def test_refine_by_interpolant_separates_abstractions():
    a, b = no_single_constraint_pair()
    itp = interpolant(a, b)
    d = refine_by_interpolant(AbstractDomain.empty(4), itp)
    assert d.alpha(a).intersect(d.alpha(b)).is_empty()


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_minimal_interpolant_is_valid_and_minimal(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    a, b = random_disjoint_pair(rng, n)
    r = minimal_interpolant(a, b)
    assert isinstance(r, Interpolant)
    assert r.separates(a, b)
    assert r.k <= math.ceil(a.dim / 2)
    assert r.density <= r.k
    assert r.k == min_density_exhaustive(a, b)
    s = interpolant_simple(a, b)
    assert s.separates(a, b) and s.density <= math.ceil(a.dim / 2)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_intersecting_verdict_agrees(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    a, b = random_dbm(rng, n, 4, 0.5), random_dbm(rng, n, 4, 0.5)
    r = minimal_interpolant(a, b)
    assert (r is INTERSECTING) == (not a.intersect(b).is_empty())
