"""Ground truth for differential testing.

Three independent pieces:

* set-level semantics of zone operations, evaluated on grid points.  Each
  operation is written as a first-order formula over linear constraints
  (``p in up(Z)  iff  exists t >= 0 with p - t in Z``), the existential
  variables are removed by Fourier-Motzkin elimination, and the remaining
  constraints are evaluated with numpy over every point of a box.  None of
  this touches the shortest-path code of ``dbm``.
* plain forward zone-graph reachability (no abstraction) and a backward
  variant built on predecessors.
* a seeded random model generator.
"""

from __future__ import annotations

import functools
import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .automaton import Edge, TimedAutomaton, emit_model, parse_model
from .dbm import INF, LE, LT, Dbm

# A linear constraint ``sum(coef[i] * var[i]) ≺ k``; strict when ``strict``.
Lin = Tuple[Tuple[int, ...], Fraction, bool]


def _norm(coef: Sequence[int], k, strict: bool) -> Optional[Lin]:
    """Normalize; returns None for a constraint that always holds."""
    coef = tuple(int(c) for c in coef)
    if not any(coef):
        ok = (0 < k) or (0 == k and not strict)
        if ok:
            return None
        return (coef, Fraction(k), strict)  # kept as a visible contradiction
    return (coef, Fraction(k), strict)


def _dedupe(cons: Iterable[Lin]) -> List[Lin]:
    best: Dict[Tuple[int, ...], Tuple[Fraction, bool]] = {}
    for coef, k, strict in cons:
        cur = best.get(coef)
        if cur is None or k < cur[0] or (k == cur[0] and strict and not cur[1]):
            best[coef] = (k, strict)
    return [(c, k, s) for c, (k, s) in best.items()]


def eliminate(cons: Sequence[Lin], var: int) -> List[Lin]:
    """Fourier-Motzkin: constraints equivalent to ``exists var. cons``."""
    keep, pos, neg = [], [], []
    for c in cons:
        a = c[0][var]
        (keep if a == 0 else pos if a > 0 else neg).append(c)
    out = list(keep)
    for cp, kp, sp in pos:
        a = cp[var]
        for cn, kn, sn in neg:
            b = -cn[var]
            coef = [b * u + a * w for u, w in zip(cp, cn)]
            n = _norm(coef, b * kp + a * kn, sp or sn)
            if n is not None:
                out.append(n)
    return _dedupe(out)


def satisfiable(cons: Sequence[Lin], nvars: int) -> bool:
    """Rational feasibility of a constraint system."""
    cur = _dedupe(c for c in cons if c is not None)
    for v in range(nvars):
        cur = eliminate(cur, v)
    for coef, k, strict in cur:
        if not any(coef) and (k < 0 or (k == 0 and strict)):
            return False
    return True


def _zone_cons(z: Dbm, wexpr: Sequence[Sequence[int]]) -> List[Lin]:
    """Constraints saying that the valuation ``w`` (given as linear expressions
    over the working variables) lies in ``z`` (raw entries read literally)."""
    n = z.dim
    out = []
    width = len(wexpr[0])
    for x in range(n):
        for y in range(n):
            b = z.m[x * n + y]
            if x == y or b >= INF:
                if x == y and b < LE(0):
                    out.append(((0,) * width, Fraction(b >> 1), not (b & 1)))
                continue
            coef = [u - w for u, w in zip(wexpr[x], wexpr[y])]
            c = _norm(coef, b >> 1, not (b & 1))
            if c is not None:
                out.append(c)
    for x in range(1, n):
        c = _norm([-u for u in wexpr[x]], 0, False)
        if c is not None:
            out.append(c)
    return out


def _ident(nclocks: int, extra: int) -> List[List[int]]:
    """Expressions w_x = p_x over variables (q_1..q_extra, p_1..p_n)."""
    width = extra + nclocks
    rows = [[0] * width]
    for x in range(1, nclocks + 1):
        r = [0] * width
        r[extra + x - 1] = 1
        rows.append(r)
    return rows


def _project(cons: List[Lin], extra: int) -> List[Lin]:
    cur = _dedupe(cons)
    for v in range(extra):
        cur = eliminate(cur, v)
    return [(c[extra:], k, s) for c, k, s in cur]


def op_constraints(op: str, z: Dbm, arg=None) -> List[Lin]:
    """Constraints over ``p`` describing the image of ``z`` under ``op``.

    ``op`` is one of ``zone``, ``up``, ``down``, ``free`` (arg: clock),
    ``reset`` (arg: iterable of clocks), ``intersect`` (arg: other Dbm).
    """
    n = z.dim - 1
    if op == "zone":
        return _project(_zone_cons(z, _ident(n, 0)), 0)
    if op == "intersect":
        return _project(_zone_cons(z, _ident(n, 0)) + _zone_cons(arg, _ident(n, 0)), 0)
    if op in ("up", "down"):
        w = _ident(n, 1)
        sign = -1 if op == "up" else 1
        for x in range(1, n + 1):
            w[x][0] = sign
        t_nonneg = ((-1,) + (0,) * n, Fraction(0), False)
        return _project(_zone_cons(z, w) + [t_nonneg], 1)
    if op == "free":
        x = arg
        w = _ident(n, 1)
        w[x] = [0] * (n + 1)
        w[x][0] = 1
        return _project(_zone_cons(z, w), 1)
    if op == "reset":
        clocks = sorted(set(arg))
        m = len(clocks)
        w = _ident(n, m)
        extra = []
        for i, x in enumerate(clocks):
            w[x] = [0] * (m + n)
            w[x][i] = 1
            for s in (1, -1):
                coef = [0] * (m + n)
                coef[m + x - 1] = s
                extra.append((tuple(coef), Fraction(0), False))
        return _project(_zone_cons(z, w) + extra, m)
    raise ValueError(f"unknown operation {op!r}")


@functools.lru_cache(maxsize=64)
def _grid(nclocks: int, box_max: int, scale: int) -> np.ndarray:
    axis = np.arange(box_max * scale + 1, dtype=np.int64)
    if nclocks == 0:
        out = np.zeros((1, 0), dtype=np.int64)
    else:
        mesh = np.meshgrid(*([axis] * nclocks), indexing="ij")
        out = np.stack([m.ravel() for m in mesh], axis=1)
    out.setflags(write=False)
    return out


def grid(nclocks: int, box_max: int, scale: int = 1) -> np.ndarray:
    """All points of ``{0, 1/scale, ..., box_max}^n`` as a (N, n) array of
    numerators (denominator ``scale``).  Cached and read-only."""
    return _grid(nclocks, box_max, scale)


def eval_constraints(cons: Sequence[Lin], pts: np.ndarray, scale: int = 1) -> np.ndarray:
    """Boolean mask of the points (numerators over ``scale``) satisfying all
    constraints."""
    mask = np.ones(len(pts), dtype=bool)
    if not cons:
        return mask
    # lhs/scale ≺ num/den  iff  lhs * den ≺ num * scale; coefficients are
    # sparse, so sum the few columns involved instead of a full product
    cols = _columns(pts)
    for co, k, strict in cons:
        lhs = None
        for v, c in enumerate(co):
            if c:
                term = cols[v] * (c * k.denominator)
                lhs = term if lhs is None else lhs + term
        rhs = k.numerator * scale
        if lhs is None:  # constant constraint 0 ≺ k
            if (rhs <= 0) if strict else (rhs < 0):
                mask[:] = False
            continue
        mask &= (lhs < rhs) if strict else (lhs <= rhs)
    return mask


_COLUMNS: Dict[int, Tuple[np.ndarray, List[np.ndarray]]] = {}


def _columns(pts: np.ndarray) -> List[np.ndarray]:
    """Contiguous columns of ``pts``, remembered for the cached grids."""
    hit = _COLUMNS.get(id(pts))
    if hit is not None and hit[0] is pts:
        return hit[1]
    cols = [np.ascontiguousarray(pts[:, v]) for v in range(pts.shape[1])]
    if not pts.flags.writeable:
        _COLUMNS[id(pts)] = (pts, cols)
    return cols


def dbm_mask(z: Dbm, pts: np.ndarray, scale: int = 1) -> np.ndarray:
    """Membership of grid points in a Dbm read entry by entry."""
    n = z.dim
    mask = np.ones(len(pts), dtype=bool)
    if z.status.value == "empty":
        mask[:] = False
        return mask
    cols = [None] + _columns(pts)
    for x in range(n):
        for y in range(n):
            b = z.m[x * n + y]
            if x == y:
                if b < LE(0):
                    mask[:] = False
                continue
            if b >= INF:
                continue
            k = (b >> 1) * scale
            if y == 0:
                diff = cols[x]
            elif x == 0:
                diff = -cols[y]
            else:
                diff = cols[x] - cols[y]
            mask &= (diff <= k) if (b & 1) else (diff < k)
    return mask


def integer_points(z: Dbm, box_max: int) -> set:
    """Integer valuations of ``z`` inside ``[0, box_max]^n``."""
    n = z.dim - 1
    if n > 4:
        raise ValueError("integer point enumeration is limited to 4 clocks")
    pts = grid(n, box_max)
    mask = dbm_mask(z, pts)
    return {tuple(int(v) for v in p) for p in pts[mask]}


def oracle_points(op: str, z: Dbm, arg=None, box_max: int = 10, scale: int = 1) -> np.ndarray:
    """Mask over ``grid(n, box_max, scale)`` of the set-level image."""
    pts = grid(z.dim - 1, box_max, scale)
    return eval_constraints(op_constraints(op, z, arg), pts, scale)


def rational_empty(z: Dbm) -> bool:
    n = z.dim - 1
    return not satisfiable(_zone_cons(z, _ident(n, 0)), n)


# -- zone graph ---------------------------------------------------------------

class OracleBudgetExceeded(RuntimeError):
    pass


def zone_reach_baseline(ta: TimedAutomaton, max_nodes: int = 200000,
                        with_trace: bool = False):
    """Forward zone-graph search with inclusion covering, no abstraction.

    Returns a boolean, or ``(bool, edge path)`` when ``with_trace`` is set.
    Terminates when all clocks are bounded by invariants (which the generator
    guarantees); otherwise the node budget may be hit.
    """
    init = ta.initial_zone()
    if ta.initial == ta.target and not init.is_empty():
        return (True, []) if with_trace else True
    passed: Dict[int, List[Dbm]] = {}
    queue = [(ta.initial, init, ())]
    passed[ta.initial] = [init]
    count = 0
    while queue:
        loc, z, path = queue.pop(0)
        for ei in ta.outgoing(loc):
            nz = ta.post(z, ei)
            if nz.is_empty():
                continue
            dst = ta.edges[ei].dst
            npath = path + (ei,)
            if dst == ta.target:
                return (True, list(npath)) if with_trace else True
            bucket = passed.setdefault(dst, [])
            if any(o.includes(nz) for o in bucket):
                continue
            count += 1
            if count > max_nodes:
                raise OracleBudgetExceeded(f"more than {max_nodes} zones")
            bucket[:] = [o for o in bucket if not nz.includes(o)]
            bucket.append(nz)
            queue.append((dst, nz, npath))
    return (False, None) if with_trace else False


def zone_reach_backward(ta: TimedAutomaton, max_nodes: int = 200000) -> bool:
    """Backward search from the target invariant with predecessor zones."""
    init = ta.initial_zone()
    start = ta.invariant_zone(ta.target)
    if ta.initial == ta.target and init.intersects(start):
        return True
    incoming: List[List[int]] = [[] for _ in ta.locations]
    for i, e in enumerate(ta.edges):
        incoming[e.dst].append(i)
    passed: Dict[int, List[Dbm]] = {ta.target: [start]}
    queue = [(ta.target, start)]
    count = 0
    while queue:
        loc, z = queue.pop(0)
        for ei in incoming[loc]:
            pz = ta.pre(z, ei).constrain_all(ta.invariants[ta.edges[ei].src])
            if pz.is_empty():
                continue
            src = ta.edges[ei].src
            if src == ta.initial and pz.intersects(init):
                return True
            bucket = passed.setdefault(src, [])
            if any(o.includes(pz) for o in bucket):
                continue
            count += 1
            if count > max_nodes:
                raise OracleBudgetExceeded(f"more than {max_nodes} zones")
            bucket[:] = [o for o in bucket if not pz.includes(o)]
            bucket.append(pz)
            queue.append((src, pz))
    return False


# -- generator ----------------------------------------------------------------

@dataclass(frozen=True)
class GeneratorConfig:
    max_locations: int = 5
    max_clocks: int = 3
    max_edges: int = 8
    max_constant: int = 5
    guard_density: float = 0.5
    reset_density: float = 0.3
    diagonal_density: float = 0.15
    seed: int = 0

    def __post_init__(self):
        for name in ("max_locations", "max_clocks", "max_edges", "max_constant"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        for name in ("guard_density", "reset_density", "diagonal_density"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")


def _random_atom(rng: random.Random, nclocks: int, cmax: int, diag: float):
    if nclocks >= 2 and rng.random() < diag:
        x, y = rng.sample(range(1, nclocks + 1), 2)
        k = rng.randint(-cmax, cmax)
    else:
        x, y = rng.randint(1, nclocks), 0
        k = rng.randint(0, cmax)
    rel = rng.choice(["<", "<=", ">", ">="])
    if rel == "<":
        return (x, y, LT(k))
    if rel == "<=":
        return (x, y, LE(k))
    if rel == ">":
        return (y, x, LT(-k))
    return (y, x, LE(-k))


def generate_model(cfg: GeneratorConfig) -> TimedAutomaton:
    """A random automaton whose clocks are all bounded by location invariants.

    Every location carries ``x <= c_x`` for each clock (with ``c_x`` at most
    ``max_constant``), which keeps the exact zone graph finite.  Guards are
    small conjunctions over the same constants.
    """
    rng = random.Random(cfg.seed)
    nloc = rng.randint(2, max(2, cfg.max_locations))
    nclk = rng.randint(1, cfg.max_clocks)
    cmax = cfg.max_constant
    clocks = [chr(ord("x") + i) if i < 3 else f"c{i}" for i in range(nclk)]
    locations = [f"l{i}" for i in range(nloc)]
    invariants = []
    for i in range(nloc):
        inv = []
        for x in range(1, nclk + 1):
            inv.append((x, 0, LE(rng.randint(max(1, cmax // 2), cmax))))
        invariants.append(tuple(inv))
    nedges = rng.randint(1, cfg.max_edges)
    edges = []
    for _ in range(nedges):
        src = rng.randrange(nloc)
        dst = rng.randrange(nloc)
        guard = []
        natoms = sum(1 for _ in range(2) if rng.random() < cfg.guard_density)
        for _ in range(natoms):
            guard.append(_random_atom(rng, nclk, cmax, cfg.diagonal_density))
        resets = frozenset(x for x in range(1, nclk + 1) if rng.random() < cfg.reset_density)
        edges.append(Edge(src, dst, tuple(guard), resets))
    target = rng.randrange(1, nloc)
    ta = TimedAutomaton(clocks, locations, invariants, edges, 0, target)
    # round-trip through text so the result is exactly what a user would load
    return parse_model(emit_model(ta))


def generate_text(cfg: GeneratorConfig) -> str:
    return emit_model(generate_model(cfg))


def corpus(n: int, base: Optional[GeneratorConfig] = None, first_seed: int = 0) -> List[TimedAutomaton]:
    base = base or GeneratorConfig()
    out = []
    for s in range(first_seed, first_seed + n):
        cfg = GeneratorConfig(**{**base.__dict__, "seed": s})
        out.append(generate_model(cfg))
    return out


def random_dbm(rng: random.Random, nclocks: int, cmax: int, density: float = 0.5,
               nonempty: bool = True, tries: int = 100) -> Dbm:
    """Random canonical zone with constants in [-cmax, cmax]."""
    dim = nclocks + 1
    for _ in range(tries):
        cons = []
        for x, y in itertools.permutations(range(dim), 2):
            if rng.random() < density:
                if y == 0:
                    k = rng.randint(0, cmax)
                elif x == 0:
                    k = -rng.randint(0, cmax)
                else:
                    k = rng.randint(-cmax, cmax)
                cons.append((x, y, LE(k) if rng.random() < 0.6 else LT(k)))
        z = Dbm.from_constraints(dim, cons)
        if not nonempty or not z.is_empty():
            return z
    return Dbm.zero(dim)
