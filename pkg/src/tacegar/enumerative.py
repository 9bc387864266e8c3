"""Lazy abstraction over zones.

The search builds a tree of nodes (location, zone, domain).  A popped node
is either covered by an already expanded node of the same location, or its
zone is abstracted with its domain and its successors are pushed.  When the
tree reaches the target, the path is checked on exact zones; if it cannot be
run, the refinement walks back from the end, finds the last node whose exact
zone misses the backward zone, and tightens zones (and, when the abstraction
is too coarse, domains) from there on.  One node of the modified stretch is
then cut so that exploration resumes from it.
"""

from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional

from .automaton import TimedAutomaton, trace_feasible
from .dbm import Dbm
from .domain import AbstractDomain, DomainMode, initial_domain
from .interpolation import minimal_interpolant

log = logging.getLogger(__name__)


class Verdict(Enum):
    REACHABLE = "reachable"
    NOT_REACHABLE = "not_reachable"
    INCONCLUSIVE = "inconclusive"


FEASIBLE = "feasible"
NOT_FEASIBLE = "not_feasible"


@dataclass
class CheckResult:
    verdict: Verdict
    trace: Optional[List[int]] = None  # edge indices of a concrete witness path
    stats: Dict[str, object] = field(default_factory=dict)
    reason: str = ""


class DomainRef:
    """Mutable handle on a persistent domain; modes differ in how handles are shared."""

    __slots__ = ("domain",)

    def __init__(self, domain: AbstractDomain):
        self.domain = domain


class Node:
    __slots__ = ("id", "loc", "zone", "dref", "parent", "edge", "children", "covered_by",
                 "covering", "in_passed", "wait_gen", "deleted", "mods")

    def __init__(self, nid: int, loc: int, zone: Dbm, dref: DomainRef,
                 parent: Optional["Node"] = None, edge: Optional[int] = None):
        self.id = nid
        self.loc = loc
        self.zone = zone
        self.dref = dref
        self.parent = parent
        self.edge = edge
        self.children: List[Node] = []
        self.covered_by: Optional[Node] = None
        self.covering: set = set()
        self.in_passed = False
        self.wait_gen = 0  # 0 = not in wait
        self.deleted = False
        self.mods = 0

    @property
    def domain(self) -> AbstractDomain:
        return self.dref.domain

    def path(self) -> List["Node"]:
        out = []
        n = self
        while n is not None:
            out.append(n)
            n = n.parent
        out.reverse()
        return out

    def __repr__(self) -> str:
        return f"Node({self.id}, loc={self.loc})"


@dataclass
class RefinementOutcome:
    verdict: str
    modified: List[int] = field(default_factory=list)
    cut_node: Optional[int] = None


class BudgetExceeded(RuntimeError):
    pass


class EnumerativeChecker:
    """One reachability question on one automaton.

    ``check_invariants`` turns on the tree-wide checks (every successor covered
    by a child after each search phase and each refinement, and zone
    monotonicity across refinements).
    Violations are collected in ``violations``.
    """

    def __init__(self, ta: TimedAutomaton, mode: DomainMode = DomainMode.GLOBAL,
                 search: str = "dfs", max_nodes: int = 100000, max_refinements: int = 10000,
                 time_limit: Optional[float] = None, check_invariants: bool = False,
                 seed_domain: bool = True):
        if search not in ("dfs", "bfs"):
            raise ValueError(f"unknown search order {search!r}")
        self.ta = ta
        self.mode = DomainMode(mode)
        self.search = search
        self.max_nodes = max_nodes
        self.max_refinements = max_refinements
        self.time_limit = time_limit
        self.check_invariants = check_invariants
        self.violations: List[str] = []
        self.trace_hashes: List[tuple] = []
        self.stats = dict(nodes=0, expanded=0, covered=0, deleted=0, refinements=0,
                          interpolants=0, strengthen=0, cuts=0, peak_wait=0, uncovered=0)
        # seed_domain=False starts from the empty domain, which forces refinement
        d0 = initial_domain(ta, self.mode) if seed_domain else AbstractDomain.empty(ta.dim)
        self._global = DomainRef(d0)
        self._per_loc = {loc: DomainRef(d0) for loc in range(len(ta.locations))}
        self._wait = deque()
        self._gen = 0
        self._passed: Dict[int, set] = {}
        self._next_id = 0
        self._start = None
        root_ref = self._root_ref(d0)
        self.root = self._new_node(ta.initial, ta.initial_zone(), root_ref, None, None)
        self._push(self.root)

    # -- domains ----------------------------------------------------------------
    def _root_ref(self, d0: AbstractDomain) -> DomainRef:
        if self.mode is DomainMode.GLOBAL:
            return self._global
        if self.mode is DomainMode.PER_LOCATION:
            return self._per_loc[self.ta.initial]
        return DomainRef(d0)

    def choose_dom(self, n: Node, edge_index: int) -> DomainRef:
        if self.mode is DomainMode.GLOBAL:
            return self._global
        if self.mode is DomainMode.PER_LOCATION:
            return self._per_loc[self.ta.edges[edge_index].dst]
        return DomainRef(n.domain)

    # -- lists ------------------------------------------------------------------
    def _new_node(self, loc, zone, dref, parent, edge) -> Node:
        if parent is not None and self._next_id >= self.max_nodes:
            raise BudgetExceeded(f"node budget of {self.max_nodes} exhausted")
        n = Node(self._next_id, loc, zone, dref, parent, edge)
        self._next_id += 1
        self.stats["nodes"] += 1
        if parent is not None:
            parent.children.append(n)
        return n

    def _push(self, n: Node) -> None:
        if n.wait_gen or n.deleted:
            return
        self._gen += 1
        n.wait_gen = self._gen
        self._wait.append((self._gen, n))
        if len(self._wait) > self.stats["peak_wait"]:
            self.stats["peak_wait"] = len(self._wait)

    def _pop(self) -> Optional[Node]:
        while self._wait:
            gen, n = self._wait.pop() if self.search == "dfs" else self._wait.popleft()
            if n.wait_gen == gen and not n.deleted:
                n.wait_gen = 0
                return n
        return None

    def _unwait(self, n: Node) -> None:
        n.wait_gen = 0

    def _add_passed(self, n: Node) -> None:
        n.in_passed = True
        self._passed.setdefault(n.loc, set()).add(n)

    def _remove_passed(self, n: Node) -> None:
        if n.in_passed:
            n.in_passed = False
            self._passed[n.loc].discard(n)
            self._release_all(n)

    def _release(self, m: Node) -> None:
        """``m`` is no longer covered; send it back to wait."""
        cov = m.covered_by
        if cov is not None:
            cov.covering.discard(m)
        m.covered_by = None
        if not m.deleted:
            self.stats["uncovered"] += 1
            self._push(m)

    def _release_all(self, n: Node) -> None:
        # by id, so the wait order does not depend on set iteration
        for m in sorted(n.covering, key=lambda m: m.id):
            self._release(m)

    def _release_invalid(self, n: Node) -> None:
        for m in sorted(n.covering, key=lambda m: m.id):
            if not n.zone.includes(m.zone):
                self._release(m)

    def _coverer(self, n: Node, exclude=None) -> Optional[Node]:
        best = None
        for m in self._passed.get(n.loc, ()):
            if m is n or m.deleted or (exclude is not None and m in exclude):
                continue
            if (best is None or m.id < best.id) and m.zone.includes(n.zone):
                best = m
        return best

    # -- search -----------------------------------------------------------------
    def _tick(self) -> None:
        if self.time_limit is not None and time.perf_counter() - self._start > self.time_limit:
            raise BudgetExceeded(f"time limit of {self.time_limit}s exceeded")

    def abs_reach(self) -> Optional[List[Node]]:
        ta = self.ta
        while True:
            n = self._pop()
            if n is None:
                return None
            self._tick()
            if n.covered_by is not None:
                n.covered_by.covering.discard(n)
                n.covered_by = None
            if n.loc == ta.target:
                return n.path()
            cov = self._coverer(n)
            if cov is not None:
                n.covered_by = cov
                cov.covering.add(n)
                self.stats["covered"] += 1
                continue
            n.zone = n.domain.alpha(n.zone)
            self._add_passed(n)
            self.stats["expanded"] += 1
            for ei in ta.outgoing(n.loc):
                z = ta.post(n.zone, ei)
                if z.is_empty():
                    continue
                child = self._new_node(ta.edges[ei].dst, z, self.choose_dom(n, ei), n, ei)
                self._push(child)

    def concrete(self, n: Node) -> Dbm:
        if n.parent is None:
            return self.ta.initial_zone()
        return self.ta.post(n.parent.zone, n.edge)

    def strengthen(self, n: Node, z: Dbm, c: Dbm) -> None:
        self.stats["strengthen"] += 1
        d = n.domain
        if not c.is_empty() and d.alpha(c).intersects(z):
            itp = minimal_interpolant(c, z)
            n.dref.domain = d.refine_with(itp.constraints)
            self.stats["interpolants"] += 1
        n.zone = n.domain.alpha(c)
        n.mods += 1
        self._release_invalid(n)

    def refine_rec(self, trace: List[Node]) -> tuple:
        """Backward pass of the refinement.  Returns (verdict, strengthened nodes)."""
        ta = self.ta
        k = len(trace) - 1
        zs: List[Optional[Dbm]] = [None] * (k + 1)
        zs[k] = trace[k].zone
        i0 = None
        c0 = None
        for i in range(k, -1, -1):
            c = self.concrete(trace[i])
            if not c.intersects(zs[i]):
                i0, c0 = i, c
                break
            if i == 0:
                return FEASIBLE, []
            zs[i - 1] = ta.pre(zs[i], trace[i].edge).intersect(trace[i - 1].zone)
        done = []
        for i in range(i0, k + 1):
            c = c0 if i == i0 else self.concrete(trace[i])
            self.strengthen(trace[i], zs[i], c)
            done.append(trace[i])
        return NOT_FEASIBLE, done

    def cut_heuristic(self, chain: List[Node]) -> Node:
        for n in chain:
            if n.zone.is_empty():
                continue
            if self._coverer(n, exclude=set(self._subtree(n))) is not None:
                return n
        return chain[-1]

    def _subtree(self, n: Node) -> List[Node]:
        out = []
        stack = [n]
        while stack:
            m = stack.pop()
            out.append(m)
            stack.extend(reversed(m.children))
        return out

    def _delete(self, n: Node) -> None:
        for m in self._subtree(n):
            if m.deleted:
                continue
            m.deleted = True
            self.stats["deleted"] += 1
            self._unwait(m)
            if m.covered_by is not None:
                m.covered_by.covering.discard(m)
                m.covered_by = None
            self._remove_passed(m)
        if n.parent is not None and n in n.parent.children:
            n.parent.children.remove(n)

    def cut(self, n: Node) -> None:
        self.stats["cuts"] += 1
        for c in list(n.children):
            self._delete(c)
        n.children = []
        if n.zone.is_empty():
            self._delete(n)
            return
        self._remove_passed(n)
        n.zone = self.concrete(n)
        if n.zone.is_empty():
            self._delete(n)
            return
        self._push(n)

    def refine(self, trace: List[Node]) -> RefinementOutcome:
        before = None
        if self.check_invariants:
            before = {n: n.zone for n in self._live_nodes()}
        verdict, chain = self.refine_rec(trace)
        if verdict == FEASIBLE:
            return RefinementOutcome(FEASIBLE)
        j0 = next((i for i, n in enumerate(chain) if n.zone.is_empty()), len(chain) - 1)
        chain = chain[:j0 + 1]
        n_cut = self.cut_heuristic(chain)
        self.cut(n_cut)
        if before is not None:
            for n, z in before.items():
                if not n.deleted and not z.includes(n.zone):
                    self.violations.append(f"zone of node {n.id} grew during refinement")
        return RefinementOutcome(NOT_FEASIBLE, [n.id for n in chain], n_cut.id)

    # -- checks -----------------------------------------------------------------
    def _live_nodes(self) -> List[Node]:
        return [n for n in self._subtree(self.root) if not n.deleted] if not self.root.deleted else []

    def successor_coverage(self) -> List[str]:
        """Passed nodes with a successor no child over-approximates (whole tree)."""
        bad = []
        ta = self.ta
        for n in self._live_nodes():
            if not n.in_passed:
                continue
            for ei in ta.outgoing(n.loc):
                p = ta.post(n.zone, ei)
                if p.is_empty():
                    continue
                ok = False
                for c in n.children:
                    if c.edge != ei or c.deleted or not c.zone.includes(p):
                        continue
                    if c.in_passed and not c.zone.includes(c.domain.alpha(p)):
                        continue
                    ok = True
                    break
                if not ok:
                    bad.append(f"node {n.id} edge {ei}: no child over-approximating the successor")
        return bad

    def _checkpoint(self) -> None:
        if self.check_invariants:
            self.violations.extend(self.successor_coverage())

    # -- main loop ----------------------------------------------------------------
    def run(self) -> CheckResult:
        self._start = time.perf_counter()
        try:
            result = self._run()
        except BudgetExceeded as exc:
            result = CheckResult(Verdict.INCONCLUSIVE, reason=str(exc))
        self.stats["time_ms"] = round((time.perf_counter() - self._start) * 1000, 3)
        self.stats["domain_size"] = self._domain_size()
        result.stats = dict(self.stats)
        return result

    def _domain_size(self) -> int:
        if self.mode is DomainMode.GLOBAL:
            return self._global.domain.size()
        if self.mode is DomainMode.PER_LOCATION:
            return max(r.domain.size() for r in self._per_loc.values())
        return max((n.domain.size() for n in self._live_nodes()), default=0)

    def _run(self) -> CheckResult:
        while True:
            trace = self.abs_reach()
            self._checkpoint()
            if trace is None:
                return CheckResult(Verdict.NOT_REACHABLE)
            edges = [n.edge for n in trace[1:]]
            self.trace_hashes.append(trace_key(trace))
            if trace_feasible(self.ta, edges) is not None:
                return CheckResult(Verdict.REACHABLE, edges)
            if self.stats["refinements"] >= self.max_refinements:
                raise BudgetExceeded(f"refinement budget of {self.max_refinements} exhausted")
            out = self.refine(trace)
            if out.verdict == FEASIBLE:
                raise AssertionError("refinement found a feasible trace the feasibility check rejected")
            self.stats["refinements"] += 1
            self._checkpoint()

    def domain_dump(self) -> str:
        names = self.ta.clocks
        if self.mode is DomainMode.GLOBAL:
            return self._global.domain.dump(names)
        if self.mode is DomainMode.PER_LOCATION:
            return "\n".join(f"[{self.ta.locations[l]}]\n{r.domain.dump(names)}"
                             for l, r in sorted(self._per_loc.items()))
        return ""


def trace_key(trace: List[Node]) -> tuple:
    """Content of an abstract counterexample: edges and zones, not node ids
    (which refinement renews anyway)."""
    return tuple((n.loc, n.edge, n.zone.m) for n in trace)


def check(ta: TimedAutomaton, mode: DomainMode = DomainMode.GLOBAL, **kw) -> CheckResult:
    return EnumerativeChecker(ta, mode, **kw).run()
