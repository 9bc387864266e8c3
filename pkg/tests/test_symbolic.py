import random

import pytest
from hypothesis import given, settings, strategies as st

from tacegar import bdd as B
from tacegar.automaton import parse_model, trace_feasible
from tacegar.dbm import LE, LT, Dbm
from tacegar.domain import AbstractDomain
from tacegar.enumerative import Verdict
from tacegar.oracle import GeneratorConfig, corpus, random_dbm, zone_reach_baseline
from tacegar.symbolic import (RESET, UP, AbstractTrace, PredicateTable, SymbolicChecker, TraceStep,
                              check_symbolic, concrete_pre, empty_refinement, forward_concrete, is_virtual,
                              negative_cycle, refine_spurious)

from conftest import FIXTURES, named_table

HARD = GeneratorConfig(max_locations=6, max_clocks=4, max_edges=14, max_constant=8,
                       guard_density=0.8, diagonal_density=0.4)


def test_virtual_constants():
    assert is_virtual(0, 1, LE(0)) and is_virtual(1, 0, LT(0))
    assert not is_virtual(0, 1, LT(0)) and not is_virtual(1, 2, LE(0))
    mgr, t, _ = named_table(["x"], [("x", "0", LE(2))])
    assert t.lit(0, 1, LE(0)) == B.TRUE
    assert t.lit(1, 0, LT(0)) == B.FALSE
    assert len(t.order) == 1


def test_mirrored_literal_is_negation():
    mgr, t, _ = named_table(["x", "y"], [("x", "y", LE(1))])
    assert t.lit(2, 1, LT(-1)) == mgr.not_(t.lit(1, 2, LE(1)))
    assert t.has(2, 1, LT(-1)) and not t.has(2, 1, LE(-1))
    with pytest.raises(KeyError):
        t.lit(1, 0, LE(7))


def test_sync_only_grows():
    mgr, t, _ = named_table(["x"], [("x", "0", LE(2))])
    key = t.order[0]
    assert key == (0, 1, LT(-2))  # stored on the (0, x) pair as the negation
    v = t.vars[key]
    assert not t.sync(AbstractDomain.of(2, [(1, 0, LE(2))]))
    assert t.sync(AbstractDomain.of(2, [(1, 0, LE(5))]))
    assert t.vars[key] == v and len(t.order) == 2


def test_location_codes():
    mgr, t, _ = named_table(["x"], [], nlocs=5)
    assert len(t.loc_vars) == 3
    for loc in range(5):
        m = mgr.pick_minterm(t.enc(loc), t.loc_vars)
        assert t.decode(m) == loc
    with pytest.raises(ValueError):
        t.enc(5)
    with pytest.raises(ValueError):
        t.decode({v: True for v in t.loc_vars})


def test_unsat_three_predicate_minterm_is_excluded():
    mgr, t, cons = named_table(["x", "y", "z"], [("x", "y", LE(1)), ("y", "z", LE(1)), ("x", "z", LE(2))])
    p1, p2, p3 = (t.lit(*c) for c in cons)
    m = mgr.and_(mgr.and_(p1, p2), mgr.not_(p3))
    assert mgr.and_(m, t.reduce2()) == B.FALSE


def test_four_predicate_formula_is_two_reduced():
    mgr, t, cons = named_table(["x", "y", "z", "w"], [("x", "y", LE(1)), ("y", "z", LE(1)), ("z", "w", LE(3)),
                                                      ("x", "w", LE(5))])
    p1, p2, p3, p4 = (t.lit(*c) for c in cons)
    phi = mgr.conj([p1, p2, p3, mgr.not_(p4)])
    assert mgr.and_(phi, t.reduce2()) == phi


def test_reduce2_keeps_every_satisfiable_cell():
    rng = random.Random(4)
    for _ in range(40):
        n = rng.randint(1, 3)
        pool = list(random_dbm(rng, n, 4, 0.6).constraints()) + list(random_dbm(rng, n, 4, 0.6).constraints())
        cons = rng.sample(pool, min(4, len(pool)))
        mgr = B.Manager()
        t = PredicateTable(mgr, n + 1, 1)
        t.sync(AbstractDomain.of(n + 1, cons))
        r2 = t.reduce2()
        for v in mgr.minterms(B.TRUE, t.pvars):
            if not t.zone_of(v).is_empty():
                assert mgr.evaluate(r2, v)


def test_negative_cycle_and_empty_refinement():
    # x-y<=1, y-z<=1, z-x<=-3: weight -1
    n = 4
    from tacegar.dbm import INF, ZERO
    m = [INF] * 16
    for i in range(n):
        m[i * n + i] = ZERO
    m[1 * n + 2], m[2 * n + 3], m[3 * n + 1] = LE(1), LE(1), LE(-3)
    cyc = negative_cycle(m, n)
    assert len(cyc) == 4 and cyc[0] == cyc[-1]
    assert negative_cycle([ZERO, INF, INF, ZERO], 2) is None
    mgr, t, cons = named_table(["x", "y", "z"], [("x", "y", LE(1)), ("y", "z", LE(1)), ("z", "x", LE(-3))])
    v = mgr.pick_minterm(mgr.conj(t.lit(*c) for c in cons), t.pvars)
    assert v[t.vars[(1, 3, LT(3))][0]] is False  # z-x<=-3 is the negated x-z<3
    assert t.zone_of(v).is_empty()
    new = empty_refinement(t, v)
    t.sync(t.domain.refine_with(new))
    assert mgr.and_(mgr.cube(v), t.reduce2()) == B.FALSE
    with pytest.raises(ValueError):
        empty_refinement(t, {t.vars[c][0]: c[2] >= LE(0) for c in t.order})


def test_concrete_pre_of_reset():
    z = Dbm.from_constraints(3, [(1, 0, LE(0)), (2, 0, LE(4)), (0, 2, LE(-2))])
    p = concrete_pre(TraceStep(RESET, 1, 0), z)
    assert p.contains((7, 3)) and not p.contains((7, 1))
    down = concrete_pre(TraceStep(UP), z)
    assert down == z  # x = 0 already, nothing lies below


def test_refine_spurious_rejects_realizable_trace():
    mgr, t, _ = named_table(["x"], [("x", "0", LE(2))])
    v = mgr.pick_minterm(t.lit(1, 0, LE(2)), t.pvars)
    tr = AbstractTrace([(0, v), (0, v)], [TraceStep(UP)])
    assert not forward_concrete(t, tr)[-1].is_empty()
    with pytest.raises(ValueError):
        refine_spurious(t, tr, t.domain)


@pytest.mark.parametrize("name, want", [("trivial_reach.ta", Verdict.REACHABLE),
                                        ("trivial_unreach.ta", Verdict.NOT_REACHABLE)])
def test_fixtures(name, want):
    ta = parse_model((FIXTURES / name).read_text())
    r = check_symbolic(ta)
    assert r.verdict is want
    if want is Verdict.REACHABLE:
        assert r.trace == [0]


def test_initial_is_target_and_budgets():
    ta = parse_model("clocks x\nlocation a initial\ntarget a\n")
    assert check_symbolic(ta).trace == []
    ta = parse_model((FIXTURES / "trivial_reach.ta").read_text())
    r = SymbolicChecker(ta, max_nodes=4).run()
    assert r.verdict is Verdict.INCONCLUSIVE
    assert SymbolicChecker(ta, time_limit=0.0).run().verdict is Verdict.INCONCLUSIVE


def test_refinement_cases_are_exercised():
    seen = {}
    for ta in corpus(200, HARD):
        c = SymbolicChecker(ta)
        r = c.run()
        for k, v in r.stats["cases"].items():
            seen[k] = seen.get(k, 0) + v
    assert seen["pre"] > 0 and seen["up"] > 0


def test_agrees_with_oracle():
    for ta in corpus(150, HARD, first_seed=20_000):
        want = zone_reach_baseline(ta)
        c = SymbolicChecker(ta)
        r = c.run()
        assert r.verdict is (Verdict.REACHABLE if want else Verdict.NOT_REACHABLE)
        if want:
            assert trace_feasible(ta, r.trace) is not None
        hs = c.trace_hashes
        assert all(hs[i] != hs[i + 1] for i in range(len(hs) - 1))
        assert r.stats["predicates"] == sum(r.stats["predicates_per_pair"].values())
