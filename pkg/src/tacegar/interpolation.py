"""Zone interpolants.

For disjoint zones ``a`` and ``b`` an interpolant is a zone ``I`` with
``a ⊆ I`` and ``I ∩ b = ∅``.  Disjointness shows up as a negative cycle in the
entrywise minimum of the two matrices.  A shortest such cycle alternates
between entries taken from ``a`` and entries taken from ``b``, and the ``a``
entries on it form an interpolant with at most ``ceil(dim / 2)`` constraints.

``minimal_interpolant`` finds a cycle with the fewest ``b`` entries by
growing, one ``b`` step at a time, the cheapest paths that use at most ``i``
such steps.  That number is also the smallest possible density.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

from .dbm import INF, ZERO, Constraint, Dbm, Status, bound_add

Step = Tuple[int, int, str]  # (from, to, "A" or "B")


@dataclass(frozen=True)
class Interpolant:
    dim: int
    constraints: Tuple[Constraint, ...]
    k: int = 0
    # b-side entries of the same negative cycle; ``witness`` holds on ``b``
    # and cannot hold together with ``constraints``.
    witness: Tuple[Constraint, ...] = ()

    @property
    def density(self) -> int:
        return len({(x, y) for x, y, _ in self.constraints})

    def as_dbm(self) -> Dbm:
        return Dbm.from_constraints(self.dim, self.constraints)

    def separates(self, a: Dbm, b: Dbm) -> bool:
        z = self.as_dbm()
        return z.includes(a) and z.intersect(b).is_empty()


class _Intersecting:
    def __repr__(self) -> str:
        return "INTERSECTING"

    def __bool__(self) -> bool:
        return False


INTERSECTING = _Intersecting()


class AlternationError(AssertionError):
    pass


def density(d: Dbm) -> int:
    """Number of finite off-diagonal entries of the matrix as stored."""
    n = d.dim
    return sum(1 for x in range(n) for y in range(n) if x != y and d.m[x * n + y] < INF)


def _prepare(a: Dbm, b: Dbm):
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    a, b = a.canonicalize(), b.canonicalize()
    if a.status is Status.EMPTY or b.status is Status.EMPTY:
        raise ValueError("interpolation needs non-empty zones")
    return a, b


def _check_alternation(cycle: List[Step]) -> None:
    for i, (_, _, s) in enumerate(cycle):
        if cycle[i - 1][2] == s:
            raise AlternationError(f"negative cycle repeats source {s!r}: {cycle}")


def _from_cycle(a: Dbm, b: Dbm, cycle: List[Step], k: int) -> Interpolant:
    n = a.dim
    cons = tuple((x, y, a.m[x * n + y]) for x, y, s in cycle if s == "A")
    wit = tuple((x, y, b.m[x * n + y]) for x, y, s in cycle if s == "B")
    return Interpolant(n, cons, k, wit)


def interpolant_simple(a: Dbm, b: Dbm) -> Optional[Interpolant]:
    """Interpolant from a negative cycle of min(a, b) with the fewest edges."""
    a, b = _prepare(a, b)
    if not a.intersect(b).is_empty():
        return None
    n = a.dim
    cm, src = [], []
    for i in range(n * n):
        if a.m[i] <= b.m[i]:
            cm.append(a.m[i])
            src.append("A")
        else:
            cm.append(b.m[i])
            src.append("B")
    best = None
    for s in range(n):
        # layered Bellman-Ford: dist[v] = cheapest walk s -> v with exactly L edges
        dist = [INF] * n
        dist[s] = ZERO
        parents = []
        for length in range(1, n + 1):
            nd = [INF] * n
            par = [-1] * n
            for u in range(n):
                du = dist[u]
                if du >= INF:
                    continue
                for v in range(n):
                    if u == v:
                        continue
                    w = cm[u * n + v]
                    if w >= INF:
                        continue
                    c = bound_add(du, w)
                    if c < nd[v]:
                        nd[v] = c
                        par[v] = u
            parents.append(par)
            dist = nd
            if dist[s] < ZERO:
                if best is None or length < best[0]:
                    best = (length, s, parents)
                break
    if best is None:
        raise AssertionError("disjoint zones without a negative cycle")
    length, s, parents = best
    verts = [s]
    v = s
    for layer in range(length - 1, -1, -1):
        v = parents[layer][v]
        verts.append(v)
    verts.reverse()
    cycle = [(verts[i], verts[i + 1], src[verts[i] * n + verts[i + 1]]) for i in range(length)]
    if len(set(verts[:-1])) != length:
        raise AssertionError(f"shortest negative cycle is not simple: {verts}")
    _check_alternation(cycle)
    return _from_cycle(a, b, cycle, sum(1 for c in cycle if c[2] == "B"))


def minimal_interpolant(a: Dbm, b: Dbm):
    """``INTERSECTING`` or an ``Interpolant`` whose ``k`` is the least number
    of b-entries on any negative cycle (equal to the least possible density)."""
    a, b = _prepare(a, b)
    if not a.intersect(b).is_empty():
        return INTERSECTING
    n = a.dim
    A, B = a.m, b.m
    # N[x][y] = (weight, path) with path a list of steps
    N = [[(INF, None)] * n for _ in range(n)]
    for x in range(n):
        N[x][x] = (ZERO, [])
        for y in range(n):
            if x != y and A[x * n + y] <= B[x * n + y] and A[x * n + y] < INF:
                N[x][y] = (A[x * n + y], [(x, y, "A")])
    # closure over A-edges only
    for z in range(n):
        for x in range(n):
            wxz, pxz = N[x][z]
            if wxz >= INF:
                continue
            for y in range(n):
                wzy, pzy = N[z][y]
                if wzy >= INF:
                    continue
                c = bound_add(wxz, wzy)
                if c < N[x][y][0]:
                    N[x][y] = (c, pxz + pzy)
    sc_b = [[z for z in range(n) if z != y and B[z * n + y] < A[z * n + y]] for y in range(n)]
    sc_a = [[z for z in range(n) if z != y and A[z * n + y] <= B[z * n + y] and A[z * n + y] < INF]
            for y in range(n)]
    for i in range(1, n + 1):
        M = [row[:] for row in N]
        for x in range(n):
            for y in range(n):
                for z in sc_b[y]:
                    w, p = N[x][z]
                    if w >= INF:
                        continue
                    c = bound_add(w, B[z * n + y])
                    if c < M[x][y][0]:
                        M[x][y] = (c, p + [(z, y, "B")])
        N = [row[:] for row in M]
        for x in range(n):
            for y in range(n):
                for z in sc_a[y]:
                    w, p = M[x][z]
                    if w >= INF:
                        continue
                    c = bound_add(w, A[z * n + y])
                    if c < N[x][y][0]:
                        N[x][y] = (c, p + [(z, y, "A")])
        for x in range(n):
            w, p = N[x][x]
            if w < ZERO:
                cycle = _merge_runs(_simplify(p, A, B, n))
                _check_alternation(cycle)
                return _from_cycle(a, b, cycle, i)
    raise AssertionError("disjoint zones without a negative cycle")


def _walk_weight(walk: List[Step], A, B, n: int) -> int:
    w = ZERO
    for x, y, s in walk:
        w = bound_add(w, (A if s == "A" else B)[x * n + y])
    return w


def _merge_runs(cycle: List[Step]) -> List[Step]:
    """Join consecutive steps of the same source (cyclically).  Both matrices
    are canonical, so the direct entry is no heavier than the two-step path and
    the cycle stays negative without gaining b-entries."""
    cycle = list(cycle)
    changed = True
    while changed and len(cycle) > 1:
        changed = False
        for i in range(len(cycle)):
            (x, _, s1), (_, z, s2) = cycle[i - 1], cycle[i]
            if s1 != s2:
                continue
            if i == 0:
                rest = cycle[1:-1]
            else:
                rest = cycle[:i - 1] + cycle[i + 1:]
            pos = len(rest) if i == 0 else i - 1
            if x != z:
                rest.insert(pos, (x, z, s1))
            cycle = rest
            changed = True
            break
    return cycle


def _simplify(walk: List[Step], A, B, n: int) -> List[Step]:
    """Cut a negative closed walk down to a negative simple cycle."""
    while True:
        seen = {}
        split = None
        for i, (x, _, _) in enumerate(walk):
            if x in seen:
                split = (seen[x], i)
                break
            seen[x] = i
        if split is None:
            return walk
        i, j = split
        inner = walk[i:j]
        outer = walk[:i] + walk[j:]
        walk = inner if _walk_weight(inner, A, B, n) < ZERO else outer


def interpolant(a: Dbm, b: Dbm) -> Interpolant:
    """Minimal interpolant, raising if the zones intersect."""
    r = minimal_interpolant(a, b)
    if r is INTERSECTING:
        raise ValueError("zones intersect; no interpolant exists")
    return r


def refine_by_interpolant(domain, itp: Interpolant):
    """Add both halves of the interpolant's cycle to an abstract domain.

    With only ``itp.constraints`` added, ``alpha(a)`` stays inside the
    interpolant but ``alpha(b)`` may grow back over it once the density is 2
    or more.  Adding the b-side entries as well keeps the two abstractions
    apart: each lies inside its half of a negative cycle.
    """
    return domain.refine_with(itp.constraints + itp.witness)
