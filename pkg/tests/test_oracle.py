import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tacegar.dbm import LE, LT, Dbm
from tacegar.oracle import (OracleBudgetExceeded, corpus, dbm_mask, eliminate, eval_constraints, grid,
                            integer_points, oracle_points, random_dbm, rational_empty, satisfiable,
                            zone_reach_backward, zone_reach_baseline)


def test_fourier_motzkin_small():
    # x < 1, x > 0.5 (as 2x > 1), no integer point but rationally satisfiable
    cons = [((1,), Fraction(1), True), ((-2,), Fraction(-1), True)]
    assert satisfiable(cons, 1)
    assert not satisfiable(cons + [((-1,), Fraction(-1), False)], 1)
    # eliminating y from x - y <= 0, y <= 2 leaves x <= 2
    out = eliminate([((1, -1), Fraction(0), False), ((0, 1), Fraction(2), False)], 1)
    assert ((1, 0), Fraction(2), False) in out


def test_grid_and_points():
    g = grid(2, 2)
    assert g.shape == (9, 2)
    assert not g.flags.writeable
    z = Dbm.from_constraints(3, [(1, 0, LE(1)), (2, 1, LT(0))])
    assert integer_points(z, 2) == {(1, 0)}
    half = grid(1, 1, 2)
    assert eval_constraints([((1,), Fraction(1, 2), True)], half, 2).tolist() == [True, False, False]


def test_up_oracle_on_a_point():
    z = Dbm.from_constraints(3, [(1, 0, LE(1)), (0, 1, LE(-1)), (2, 0, LE(0))])
    mask = oracle_points("up", z, None, 4)
    pts = {tuple(p) for p in grid(2, 4)[mask]}
    assert pts == {(1 + d, d) for d in range(4)}
    with pytest.raises(ValueError):
        oracle_points("rotate", z)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_rational_emptiness_agrees_with_dbm(seed):
    rng = random.Random(seed)
    z = random_dbm(rng, rng.randint(1, 3), 5, 0.6, nonempty=False)
    raw = Dbm.raw(z.dim, z.m)
    assert rational_empty(raw) == z.is_empty()


def test_forward_and_backward_baselines_agree():
    for ta in corpus(150):
        assert zone_reach_baseline(ta) == zone_reach_backward(ta)


def test_baseline_witness_replays():
    from tacegar.automaton import trace_feasible
    hits = 0
    for ta in corpus(100, first_seed=500):
        hit, path = zone_reach_baseline(ta, with_trace=True)
        if hit:
            hits += 1
            assert trace_feasible(ta, path) is not None
    assert hits > 0


def test_baseline_budget():
    from tacegar.automaton import parse_model
    ta = parse_model("clocks x\nlocation a initial\nlocation b\nlocation c\nedge a -> b\ntarget c\n")
    assert not zone_reach_baseline(ta)
    with pytest.raises(OracleBudgetExceeded):
        zone_reach_baseline(ta, max_nodes=0)


def test_random_dbm_respects_bounds():
    rng = random.Random(3)
    for _ in range(100):
        z = random_dbm(rng, 3, 4, 0.5)
        assert not z.is_empty()
        pts = grid(3, 4)
        assert np.array_equal(oracle_points("zone", z, None, 4), dbm_mask(z, pts))
