"""Boolean encoding of abstract zones and the BDD-based refinement loop.

Each stored domain constraint ``x - y ≺ k`` (``x < y`` in clock order) gets
one variable and a primed twin.  A constraint on a mirrored pair is the
negated variable of its complement.  A minterm over the variables therefore
names one cell of the partition the domain induces; its concretization is
the zone cut out by its literals.

Two bounds are treated as constants and never get variables: ``0 - y <= 0``
(true, clocks are non-negative) and its mirror ``y < 0`` (false).

Reachability runs breadth-first over layers.  A counterexample is a chain of
minterms linked by ``up``, ``r_empty`` and ``reset(x)`` steps; it is replayed
on DBMs and, when it cannot be run, the domain is refined according to why
the first impossible step failed.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import bdd as B
from .automaton import TimedAutomaton, trace_feasible
from .dbm import INF, LE, LT, ZERO, Constraint, Dbm, bound_add, complement, format_bound
from .domain import AbstractDomain, initial_domain
from .enumerative import CheckResult, Verdict
from .interpolation import INTERSECTING, minimal_interpolant, refine_by_interpolant

log = logging.getLogger(__name__)

UP = "up"
R_EMPTY = "r_empty"
RESET = "reset"


def is_virtual(x: int, y: int, b: int) -> bool:
    """Constraints fixed by clock non-negativity alone."""
    return (x == 0 and y != 0 and b == LE(0)) or (y == 0 and x != 0 and b == LT(0))


def _virtual_value(x: int, y: int, b: int) -> bool:
    return x == 0


class PredicateTable:
    """Variables for the constraints of a domain, bound to one BDD manager.

    The table only grows: ``sync`` adds variables for new constraints and
    keeps old ones where they are.  Derived formulas are cached per version.
    """

    def __init__(self, mgr: B.Manager, dim: int, nlocs: int, names: Optional[Sequence[str]] = None):
        self.mgr = mgr
        self.dim = dim
        self.nlocs = nlocs
        self.clock_names = list(names) if names else [f"c{i}" for i in range(1, dim)]
        nb = max(1, (nlocs - 1).bit_length())
        self.loc_vars = [mgr.new_var(f"b{i}") for i in range(nb)]
        self.vars: Dict[Constraint, Tuple[int, int]] = {}
        self.order: List[Constraint] = []
        self.domain = AbstractDomain.empty(dim)
        self._bounds: List[List[Tuple[int, ...]]] = []
        self._cache: Dict[tuple, int] = {}
        self.version = 0
        self._rebuild_bounds()

    # -- variables ------------------------------------------------------------
    def _name(self, c: Constraint) -> str:
        x, y, b = c
        nm = lambda i: "0" if i == 0 else self.clock_names[i - 1]
        return f"p[{nm(x)}-{nm(y)}{format_bound(b)}]"

    def sync(self, domain: AbstractDomain) -> bool:
        """Add variables for constraints of ``domain`` not yet in the table."""
        added = False
        for c in domain.constraints():
            if is_virtual(*c) or c in self.vars:
                continue
            self.vars[c] = self.mgr.new_pair(self._name(c))
            self.order.append(c)
            added = True
        self.domain = AbstractDomain(self.dim).refine_with(self.order)
        if added:
            self.version += 1
            self._cache.clear()
            self._rebuild_bounds()
        return added

    def _rebuild_bounds(self) -> None:
        n = self.dim
        tab = []
        for x in range(n):
            row = []
            for y in range(n):
                if x == y:
                    row.append(())
                    continue
                bs = set(self.domain.bounds(x, y))
                if x == 0:
                    bs.add(LE(0))
                if y == 0:
                    bs.add(LT(0))
                row.append(tuple(sorted(bs)))
            tab.append(row)
        self._bounds = tab

    def bounds(self, x: int, y: int) -> Tuple[int, ...]:
        """Bounds on ``x - y`` with a literal, constants included."""
        return self._bounds[x][y]

    @property
    def pvars(self) -> List[int]:
        return [self.vars[c][0] for c in self.order]

    @property
    def pvars_primed(self) -> List[int]:
        return [self.vars[c][1] for c in self.order]

    @property
    def support(self) -> List[int]:
        return self.loc_vars + self.pvars

    def lit(self, x: int, y: int, b: int, primed: bool = False) -> int:
        if x == y:
            return B.TRUE if b >= ZERO else B.FALSE
        if x < y:
            key, pos = (x, y, b), True
        else:
            key, pos = (y, x, complement(b)), False
        if is_virtual(*key):
            return B.TRUE if _virtual_value(*key) == pos else B.FALSE
        v = self.vars.get(key)
        if v is None:
            raise KeyError(f"constraint {key} is not in the predicate table")
        return self.mgr.literal(v[1] if primed else v[0], pos)

    def has(self, x: int, y: int, b: int) -> bool:
        if x == y:
            return True
        key = (x, y, b) if x < y else (y, x, complement(b))
        return is_virtual(*key) or key in self.vars

    # -- locations ------------------------------------------------------------
    def enc(self, loc: int) -> int:
        if not 0 <= loc < self.nlocs:
            raise ValueError(f"location index {loc} out of range")
        return self.mgr.cube({v: bool(loc >> i & 1) for i, v in enumerate(self.loc_vars)})

    def decode(self, assignment: Dict[int, bool]) -> int:
        loc = sum(1 << i for i, v in enumerate(self.loc_vars) if assignment.get(v, False))
        if loc >= self.nlocs:
            raise ValueError(f"invalid location code {loc}")
        return loc

    # -- zones ----------------------------------------------------------------
    def alpha_guard(self, g: Sequence[Constraint]) -> int:
        """Conjunction of the literals of ``g`` (each atom must be in the table)."""
        f = B.TRUE
        for x, y, b in g:
            if not self.has(x, y, b):
                raise KeyError(f"guard constraint {(x, y, b)} is not in the abstract domain")
            f = self.mgr.and_(f, self.lit(x, y, b))
        return f

    def alpha_zero(self) -> int:
        """The single cell containing the valuation where every clock is 0."""
        return self.mgr.cube({self.vars[c][0]: c[2] >= LE(0) for c in self.order})

    def concretize(self, v: Dict[int, bool]) -> Tuple[Optional[int], Dbm]:
        """Location (None when ``v`` has no location bits) and zone of a minterm."""
        loc = self.decode(v) if any(b in v for b in self.loc_vars) else None
        return loc, self.zone_of(v)

    def raw_matrix(self, v: Dict[int, bool]) -> List[int]:
        """Entrywise tightest literal bound of ``v`` (not closed)."""
        n = self.dim
        m = [INF] * (n * n)
        for i in range(n):
            m[i * n + i] = ZERO
            if i:
                m[i] = ZERO
        for (x, y, b) in self.order:
            val = v.get(self.vars[(x, y, b)][0])
            if val is None:
                raise ValueError("minterm does not assign every predicate")
            if val:
                i, bb = x * n + y, b
            else:
                i, bb = y * n + x, complement(b)
            if bb < m[i]:
                m[i] = bb
        return m

    def zone_of(self, v: Dict[int, bool]) -> Dbm:
        return Dbm.raw(self.dim, self.raw_matrix(v)).canonicalize()

    def cube_of(self, v: Dict[int, bool]) -> int:
        return self.mgr.cube(v)

    def alpha_zone(self, z: Dbm) -> int:
        """Every cell that meets ``z``, by enumeration (exponential; for tests)."""
        out = B.FALSE
        for v in self.mgr.minterms(B.TRUE, self.pvars):
            if not self.zone_of(v).intersect(z).is_empty():
                out = self.mgr.or_(out, self.mgr.cube(v))
        return out

    # -- relations --------------------------------------------------------------
    def _cached(self, key, build):
        f = self._cache.get(key)
        if f is None:
            f = build()
            self._cache[key] = f
        return f

    def reduce2(self) -> int:
        return self._cached(("reduce2",), self._build_reduce2)

    def _build_reduce2(self) -> int:
        mgr = self.mgr
        n = self.dim
        f = B.TRUE
        for x in range(n):
            for y in range(n):
                if x == y:
                    continue
                bs = self.bounds(x, y)
                for idx, k in enumerate(bs):
                    target = self.lit(x, y, k)
                    if target == B.TRUE:
                        continue
                    # same pair: the next tighter bound is enough, the chain does the rest
                    rhs = self.lit(x, y, bs[idx - 1]) if idx > 0 else B.FALSE
                    for z in range(n):
                        if z == x or z == y:
                            continue
                        right = self.bounds(z, y)
                        for l1 in self.bounds(x, z):
                            # loosest l2 with l1 + l2 <= k
                            best = None
                            for l2 in right:
                                if bound_add(l1, l2) <= k:
                                    best = l2
                                else:
                                    break
                            if best is not None:
                                rhs = mgr.or_(rhs, mgr.and_(self.lit(x, z, l1), self.lit(z, y, best)))
                    if rhs != B.FALSE:
                        f = mgr.and_(f, mgr.implies(rhs, target))
        return f

    def s_up(self) -> int:
        return self._cached(("up",), self._build_s_up)

    def _build_s_up(self) -> int:
        mgr = self.mgr
        f = B.TRUE
        for (x, y, b) in self.order:
            p, pp = self.lit(x, y, b), self.lit(x, y, b, primed=True)
            if x == 0:
                # the variable of 0 - y ≺ b is the negated upper bound y - 0 ≺⁻¹ -b:
                # lower bounds survive delays, upper bounds may be lost
                f = mgr.and_(f, mgr.implies(p, pp))
            else:
                f = mgr.and_(f, mgr.iff(pp, p))
        return f

    def s_reset(self, z: int) -> int:
        if not 1 <= z < self.dim:
            raise ValueError(f"cannot reset clock index {z}")
        return self._cached(("reset", z), lambda: self._build_s_reset(z))

    def _build_s_reset(self, z: int) -> int:
        mgr = self.mgr
        n = self.dim
        f = B.TRUE
        for k in self.bounds(z, 0):
            if k >= LE(0):
                f = mgr.and_(f, self.lit(z, 0, k, True))
        for x in range(n):
            if x == z:
                continue
            for k in self.bounds(x, z):
                if x == 0:
                    pre = B.TRUE if k >= LE(0) else B.FALSE
                else:
                    pre = mgr.disj(self.lit(x, 0, l) for l in self.bounds(x, 0) if l <= k)
                f = mgr.and_(f, mgr.implies(pre, self.lit(x, z, k, True)))
        for y in range(n):
            if y == z:
                continue
            for k in self.bounds(z, y):
                if y == 0:
                    pre = B.TRUE if k >= LE(0) else B.FALSE
                else:
                    pre = mgr.disj(self.lit(0, y, l) for l in self.bounds(0, y) if l <= k)
                f = mgr.and_(f, mgr.implies(pre, self.lit(z, y, k, True)))
                if k >= LE(0):
                    f = mgr.and_(f, self.lit(z, y, k, True))
        for (x, y, b) in self.order:
            if x != z and y != z:
                f = mgr.and_(f, mgr.iff(self.lit(x, y, b, True), self.lit(x, y, b)))
        return f

    # -- images -----------------------------------------------------------------
    def post_rel(self, s: int, r: int) -> int:
        return self.mgr.rename_unprime(self.mgr.and_exists(s, r, self.pvars))

    def pre_rel(self, s: int, r: int) -> int:
        return self.mgr.and_exists(self.mgr.rename_prime(s), r, self.pvars_primed)

    def up_op(self, a: int) -> int:
        return self.mgr.and_(self.post_rel(a, self.s_up()), self.reduce2())

    def reset_op(self, a: int, z: int) -> int:
        return self.mgr.and_(self.post_rel(a, self.s_reset(z)), self.reduce2())


@dataclass(frozen=True)
class TraceStep:
    action: str  # UP, R_EMPTY or RESET
    clock: Optional[int] = None
    edge: Optional[int] = None

    def __str__(self) -> str:
        if self.action == RESET:
            return f"r({self.clock})"
        return self.action


@dataclass
class AbstractTrace:
    """Minterms A_1..A_n (location, assignment over the predicates) and the
    n - 1 steps between them."""
    states: List[Tuple[int, Dict[int, bool]]]
    steps: List[TraceStep]

    @property
    def edges(self) -> List[int]:
        # every edge occurrence is a delay followed by one or more edge steps
        return [s.edge for i, s in enumerate(self.steps)
                if s.action != UP and i > 0 and self.steps[i - 1].action == UP]


class SymbolicEngine:
    """Reachability in a fixed domain over one predicate table."""

    def __init__(self, ta: TimedAutomaton, table: PredicateTable):
        self.ta = ta
        self.t = table
        self.mgr = table.mgr

    def inv(self) -> int:
        t = self.t
        return t._cached(("inv",), lambda: self.mgr.disj(
            self.mgr.and_(t.enc(l), t.alpha_guard(self.ta.invariants[l])) for l in range(len(self.ta.locations))))

    def initial(self) -> int:
        t = self.t
        return self.mgr.and_(t.enc(self.ta.initial), t.alpha_zero())

    def up_inv(self, a: int) -> int:
        return self.mgr.and_(self.t.up_op(a), self.inv())

    def edge_chain(self, u: int, ei: int) -> List[int]:
        """Intermediate images of ``u`` (already delayed) through edge ``ei``:
        guard applied, then one entry per reset clock, the last one carrying
        the target location and its invariant."""
        t, mgr = self.t, self.mgr
        e = self.ta.edges[ei]
        s = mgr.exists(mgr.and_(u, t.enc(e.src)), t.loc_vars)
        s = mgr.and_(s, t.alpha_guard(e.guard))
        chain = [s]
        for z in sorted(e.resets):
            s = t.reset_op(s, z)
            chain.append(s)
        chain[-1] = mgr.and_(mgr.and_(chain[-1], t.enc(e.dst)), t.alpha_guard(self.ta.invariants[e.dst]))
        return chain

    def apply_edges(self, u: int) -> int:
        out = B.FALSE
        for ei in range(len(self.ta.edges)):
            out = self.mgr.or_(out, self.edge_chain(u, ei)[-1])
        return out

    def sym_reach(self, max_layers: Optional[int] = None):
        """``None`` when the target is unreachable in the abstraction, else an
        ``AbstractTrace``.  ``layers[0]`` holds the initial states."""
        mgr, t = self.mgr, self.t
        nexts = self.initial()
        self.layers = [nexts]
        tgt = t.enc(self.ta.target)
        if mgr.and_(nexts, tgt) != B.FALSE:
            return self.extract_trace(self.layers)
        reachable = B.FALSE
        while mgr.and_(mgr.not_(reachable), nexts) != B.FALSE:
            reachable = mgr.or_(reachable, nexts)
            nexts = mgr.and_(self.apply_edges(self.up_inv(nexts)), mgr.not_(reachable))
            self.layers.append(nexts)
            if mgr.and_(nexts, tgt) != B.FALSE:
                return self.extract_trace(self.layers)
            if max_layers is not None and len(self.layers) > max_layers:
                raise B.BddBudgetExceeded(f"more than {max_layers} layers")
        return None

    def _pick(self, f: int) -> Dict[int, bool]:
        m = self.mgr.pick_minterm(f, self.t.support)
        if m is None:
            raise AssertionError("trace extraction found no predecessor")
        return m

    def _split(self, m: Dict[int, bool]) -> Tuple[int, Dict[int, bool]]:
        t = self.t
        return t.decode(m), {v: m[v] for v in t.pvars}

    def extract_trace(self, layers: List[int]) -> AbstractTrace:
        mgr, t = self.mgr, self.t
        cur = self._pick(mgr.and_(layers[-1], t.enc(self.ta.target)))
        states = [self._split(cur)]
        steps: List[TraceStep] = []
        for j in range(len(layers) - 1, 0, -1):
            prev = layers[j - 1]
            u_all = self.up_inv(prev)
            cur_f = mgr.cube(cur)
            found = False
            for ei, e in enumerate(self.ta.edges):
                chain = self.edge_chain(u_all, ei)
                if mgr.and_(chain[-1], cur_f) == B.FALSE:
                    continue
                resets = sorted(e.resets)
                # walk the resets backwards; intermediate minterms carry no location
                p = {v: cur[v] for v in t.pvars}
                seq = []
                for r_i in range(len(resets) - 1, -1, -1):
                    pred = mgr.and_(chain[r_i], t.pre_rel(mgr.cube(p), t.s_reset(resets[r_i])))
                    m = mgr.pick_minterm(pred, t.pvars)
                    if m is None:
                        raise AssertionError("no reset predecessor inside the edge image")
                    seq.append((e.src, m, TraceStep(RESET, resets[r_i], ei)))
                    p = m
                if not resets:
                    seq.append((e.src, p, TraceStep(R_EMPTY, None, ei)))
                # p is the delayed state before the edge
                u = mgr.and_(mgr.and_(u_all, t.enc(e.src)), mgr.cube(p))
                if u == B.FALSE:
                    raise AssertionError("edge predecessor outside the delayed layer")
                a = self._pick(mgr.and_(mgr.and_(prev, t.enc(e.src)), t.pre_rel(mgr.cube(p), t.s_up())))
                for loc, m, step in seq:
                    steps.append(step)
                    states.append((loc, m))
                steps.append(TraceStep(UP, None, ei))
                states.append(self._split(a))
                cur = a
                found = True
                break
            if not found:
                raise AssertionError(f"no edge leads into layer {j}")
        states.reverse()
        steps.reverse()
        return AbstractTrace(states, steps)


# -- concrete replay and refinement ---------------------------------------------

def concrete_post(step: TraceStep, z: Dbm) -> Dbm:
    if step.action == UP:
        return z.up()
    if step.action == RESET:
        return z.reset([step.clock])
    return z


def concrete_pre(step: TraceStep, z: Dbm) -> Dbm:
    if step.action == UP:
        return z.down()
    if step.action == RESET:
        return z.constrain(step.clock, 0, LE(0)).constrain(0, step.clock, LE(0)).free(step.clock)
    return z


def forward_concrete(table: PredicateTable, trace: AbstractTrace) -> List[Dbm]:
    """B_1..B_n: the concrete states that follow the trace.  Guards and
    invariants are not part of the step alphabet, so each B_i is also cut
    down to the concretization of A_i (which satisfies them)."""
    n = table.dim
    zs = [Dbm.zero(n).intersect(table.zone_of(trace.states[0][1]))]
    for step, (_, v) in zip(trace.steps, trace.states[1:]):
        zs.append(concrete_post(step, zs[-1]).intersect(table.zone_of(v)))
    return zs


def negative_cycle(m: Sequence[int], n: int) -> Optional[List[int]]:
    """Vertices s_1..s_m, s_{m+1} = s_1 of a fewest-edges negative cycle of a
    (not closed) matrix; None if there is none."""
    best = None
    for s in range(n):
        dist = [INF] * n
        dist[s] = ZERO
        parents = []
        for length in range(1, n + 1):
            nd = [INF] * n
            par = [-1] * n
            for u in range(n):
                if dist[u] >= INF:
                    continue
                for v in range(n):
                    w = m[u * n + v]
                    if u == v or w >= INF:
                        continue
                    c = bound_add(dist[u], w)
                    if c < nd[v]:
                        nd[v], par[v] = c, u
            parents.append(par)
            dist = nd
            if dist[s] < ZERO:
                if best is None or length < best[0]:
                    best = (length, s, parents)
                break
    if best is None:
        return None
    length, s, parents = best
    verts = [s]
    v = s
    for layer in range(length - 1, -1, -1):
        v = parents[layer][v]
        verts.append(v)
    verts.reverse()
    return verts


def empty_refinement(table: PredicateTable, v: Dict[int, bool]) -> List[Constraint]:
    """Constraints that make ``reduce2`` reject the unsatisfiable minterm ``v``:
    each step of a negative cycle of its raw matrix, and each prefix sum from
    the first vertex."""
    n = table.dim
    m = table.raw_matrix(v)
    cyc = negative_cycle(m, n)
    if cyc is None:
        raise ValueError("minterm is satisfiable")
    out = []
    total = ZERO
    for i in range(len(cyc) - 1):
        a, b = cyc[i], cyc[i + 1]
        w = m[a * n + b]
        out.append((a, b, w))
        total = bound_add(total, w)
        if 0 < i < len(cyc) - 2:
            out.append((cyc[0], cyc[i + 1], total))
    return [c for c in out if c[0] != c[1] and not is_virtual(*_norm(c))]


def _norm(c: Constraint) -> Constraint:
    x, y, b = c
    return (x, y, b) if x < y else (y, x, complement(b))


@dataclass
class Refinement:
    case: str
    constraints: List[Constraint] = field(default_factory=list)
    index: int = 0


def refine_spurious(table: PredicateTable, trace: AbstractTrace, domain: AbstractDomain,
                    chain: Optional[List[Dbm]] = None) -> Tuple[AbstractDomain, Refinement]:
    """Refined domain for a trace whose concrete replay dies."""
    chain = chain if chain is not None else forward_concrete(table, trace)
    if not chain[-1].is_empty():
        raise ValueError("trace is realizable")
    i0 = max(i for i, z in enumerate(chain) if not z.is_empty())
    a1 = table.zone_of(trace.states[i0][1])
    a2 = table.zone_of(trace.states[i0 + 1][1])
    step = trace.steps[i0]
    if a2.is_empty():
        cons = empty_refinement(table, trace.states[i0 + 1][1])
        return domain.refine_with(cons), Refinement("empty", cons, i0)
    preds = concrete_pre(step, a2).intersect(a1)
    if not preds.is_empty():
        itp = minimal_interpolant(preds, chain[i0])
        assert itp is not INTERSECTING, "predecessors meet the reachable states"
        d2 = refine_by_interpolant(domain, itp)
        return d2, Refinement("pre", list(itp.constraints + itp.witness), i0)
    if step.action == UP:
        left, right, case = a1.up(), a2.down(), "up"
    elif step.action == RESET:
        left, right, case = a1.free(step.clock), a2.free(step.clock), "reset"
    else:
        raise AssertionError("an identity step cannot lose concrete states")
    itp = minimal_interpolant(left, right)
    if itp is INTERSECTING:
        # this case relies on each cell being a satisfiable reduced
        # minterm; when that fails, make both cells definable instead
        cons = list(a1.constraints()) + list(a2.constraints())
        return domain.refine_with(cons), Refinement(case + "-fallback", cons, i0)
    return refine_by_interpolant(domain, itp), Refinement(case, list(itp.constraints + itp.witness), i0)


def trace_key(table: PredicateTable, trace: AbstractTrace) -> tuple:
    """Domain-independent fingerprint: concretized cells and step labels."""
    cells = tuple((loc, table.zone_of(v).m) for loc, v in trace.states)
    return cells, tuple(str(s) for s in trace.steps)


class SymbolicChecker:
    def __init__(self, ta: TimedAutomaton, max_refinements: int = 2000, max_nodes: int = 2_000_000,
                 time_limit: Optional[float] = None, max_layers: Optional[int] = None):
        self.ta = ta
        self.max_refinements = max_refinements
        self.time_limit = time_limit
        self.max_layers = max_layers
        self.mgr = B.Manager(max_nodes=max_nodes)
        self.table = PredicateTable(self.mgr, ta.dim, len(ta.locations), ta.clocks)
        self.domain = initial_domain(ta)
        self.trace_hashes: List[tuple] = []
        self.stats: Dict[str, object] = dict(iterations=0, refinements=0, layers=0,
                                             cases={"empty": 0, "pre": 0, "up": 0, "reset": 0,
                                                    "up-fallback": 0, "reset-fallback": 0})

    def run(self) -> CheckResult:
        start = time.perf_counter()
        try:
            res = self._run(start)
        except (B.BddBudgetExceeded, _Budget) as exc:
            res = CheckResult(Verdict.INCONCLUSIVE, reason=str(exc))
        self.stats["time_ms"] = round((time.perf_counter() - start) * 1000, 3)
        self.stats["peak_nodes"] = self.mgr.peak_nodes
        self.stats["predicates"] = len(self.table.order)
        self.stats["predicates_per_pair"] = self._per_pair()
        res.stats = dict(self.stats)
        return res

    def _grows(self, d: AbstractDomain) -> bool:
        return any(not is_virtual(*c) and c not in self.table.vars for c in d.constraints())

    def _per_pair(self) -> Dict[str, int]:
        out: Dict[str, int] = {}
        nm = lambda i: "0" if i == 0 else self.ta.clocks[i - 1]
        for (x, y, _) in self.table.order:
            key = f"{nm(x)},{nm(y)}"
            out[key] = out.get(key, 0) + 1
        return out

    def _run(self, start: float) -> CheckResult:
        while True:
            if self.time_limit is not None and time.perf_counter() - start > self.time_limit:
                raise _Budget(f"time limit of {self.time_limit}s exceeded")
            self.mgr.collect([])
            self.table.sync(self.domain)
            eng = SymbolicEngine(self.ta, self.table)
            self.stats["iterations"] += 1
            trace = eng.sym_reach(self.max_layers)
            self.stats["layers"] = len(eng.layers)
            if trace is None:
                return CheckResult(Verdict.NOT_REACHABLE)
            self.trace_hashes.append(trace_key(self.table, trace))
            edges = trace.edges
            if trace_feasible(self.ta, edges) is not None:
                return CheckResult(Verdict.REACHABLE, edges)
            if self.stats["refinements"] >= self.max_refinements:
                raise _Budget(f"refinement budget of {self.max_refinements} exhausted")
            chain = forward_concrete(self.table, trace)
            if not chain[-1].is_empty():
                raise AssertionError("concrete replay succeeds on an infeasible edge sequence")
            new, info = refine_spurious(self.table, trace, self.domain, chain)
            self.stats["cases"][info.case] += 1
            if not self._grows(new):
                raise AssertionError(f"refinement ({info.case}) added no predicate")
            self.domain = new
            self.stats["refinements"] += 1


class _Budget(RuntimeError):
    pass


def check_symbolic(ta: TimedAutomaton, **kw) -> CheckResult:
    return SymbolicChecker(ta, **kw).run()
