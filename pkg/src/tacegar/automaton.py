"""Timed automata: data model, text format, and trace feasibility.

Model text is line oriented::

    clocks x y
    location l0 initial invariant x<=5
    location l1
    edge l0 -> l1 guard x>=2 and x-y<3 reset x y
    target l1

Every atomic guard is normalized to an upper bound on a difference,
``(x, y, b)`` meaning ``x - y ≺ k``, with clock 0 standing for the constant
zero.  So ``x >= 2`` becomes ``(0, x, (-2, <=))``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

from .dbm import INF, LE, LT, Constraint, Dbm, post_edge, pre_edge

Guard = Tuple[Constraint, ...]

KEYWORDS = {"clocks", "location", "initial", "invariant", "edge", "guard", "reset",
            "target", "and", "->"}
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_ATOM = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)(?:-([A-Za-z_][A-Za-z0-9_]*))?(<=|>=|<|>)([+-]?[0-9]+)\Z")


class ModelError(ValueError):
    """Problem in model text, with a 1-based line and column."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    guard: Guard = ()
    resets: FrozenSet[int] = frozenset()

    def __post_init__(self):
        if 0 in self.resets:
            raise ValueError("clock 0 cannot be reset")


@dataclass
class TimedAutomaton:
    clocks: List[str]
    locations: List[str]
    invariants: List[Guard]
    edges: List[Edge]
    initial: int
    target: int
    _out: Optional[List[List[int]]] = field(default=None, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.clocks) + 1

    def clock_index(self, name: str) -> int:
        return self.clocks.index(name) + 1

    def clock_name(self, x: int) -> str:
        return "0" if x == 0 else self.clocks[x - 1]

    def outgoing(self, loc: int) -> List[int]:
        """Indices of edges leaving ``loc``, in declaration order."""
        if self._out is None:
            out: List[List[int]] = [[] for _ in self.locations]
            for i, e in enumerate(self.edges):
                out[e.src].append(i)
            self._out = out
        return self._out[loc]

    def initial_zone(self) -> Dbm:
        return Dbm.zero(self.dim).up().constrain_all(self.invariants[self.initial])

    def post(self, z: Dbm, edge_index: int) -> Dbm:
        e = self.edges[edge_index]
        return post_edge(z, e, self.invariants[e.src], self.invariants[e.dst])

    def pre(self, z: Dbm, edge_index: int) -> Dbm:
        e = self.edges[edge_index]
        return pre_edge(z, e, self.invariants[e.src], self.invariants[e.dst])

    def invariant_zone(self, loc: int) -> Dbm:
        return Dbm.from_constraints(self.dim, self.invariants[loc])

    def constants(self) -> List[int]:
        out = []
        for g in list(self.invariants) + [e.guard for e in self.edges]:
            out.extend(abs(b >> 1) for _, _, b in g)
        return out

    def max_constant(self) -> int:
        return max(self.constants(), default=0)

    def validate(self) -> None:
        n = self.dim
        nl = len(self.locations)
        if not (0 <= self.initial < nl and 0 <= self.target < nl):
            raise ModelError("initial or target location out of range")
        for g in self.invariants:
            _check_guard(g, n)
        for e in self.edges:
            if not (0 <= e.src < nl and 0 <= e.dst < nl):
                raise ModelError("edge endpoint out of range")
            _check_guard(e.guard, n)
            if any(not (0 < x < n) for x in e.resets):
                raise ModelError("reset of an undeclared clock")
        if Dbm.zero(n).constrain_all(self.invariants[self.initial]).is_empty():
            raise ModelError("the invariant of the initial location excludes the zero valuation")


def _check_guard(g: Guard, n: int) -> None:
    for x, y, b in g:
        if not (0 <= x < n and 0 <= y < n) or x == y or b >= INF:
            raise ModelError(f"malformed constraint {(x, y, b)}")


@dataclass(frozen=True)
class SymbolicTrace:
    """A path given by its edges; a delay is implied before and after each edge."""

    edges: Tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.edges)


def _as_edges(trace: Union[SymbolicTrace, Sequence[int]]) -> Tuple[int, ...]:
    return trace.edges if isinstance(trace, SymbolicTrace) else tuple(trace)


def check_path(ta: TimedAutomaton, trace) -> None:
    loc = ta.initial
    for i in _as_edges(trace):
        e = ta.edges[i]
        if e.src != loc:
            raise ValueError(f"edge {i} does not start at location {ta.locations[loc]}")
        loc = e.dst


def forward_chain(ta: TimedAutomaton, trace) -> List[Dbm]:
    """Concrete zones C_1..C_{n+1} along the path, starting at the initial zone."""
    check_path(ta, trace)
    zones = [ta.initial_zone()]
    for i in _as_edges(trace):
        zones.append(ta.post(zones[-1], i))
    return zones


def backward_chain(ta: TimedAutomaton, trace) -> List[Dbm]:
    """Zones Z_1..Z_{n+1}; Z_{n+1} is the invariant of the last location and
    Z_i = pre(Z_{i+1}) (not yet intersected with the initial zone)."""
    edges = _as_edges(trace)
    check_path(ta, trace)
    last = ta.edges[edges[-1]].dst if edges else ta.initial
    zones = [ta.invariant_zone(last)]
    for i in reversed(edges):
        zones.append(ta.pre(zones[-1], i))
    zones.reverse()
    return zones


def trace_feasible(ta: TimedAutomaton, trace) -> Optional[Dbm]:
    """Initial valuations from which the path can be run, or None if spurious."""
    z = backward_chain(ta, trace)[0].intersect(ta.initial_zone())
    return None if z.is_empty() else z


# -- text format ---------------------------------------------------------------

def _atom(tok: str, clocks: Dict[str, int], line: int, col: int) -> Constraint:
    mt = _ATOM.match(tok)
    if not mt:
        raise ModelError(f"bad atomic constraint {tok!r}", line, col)
    a, b, rel, k = mt.group(1), mt.group(2), mt.group(3), int(mt.group(4))
    for name in (a, b):
        if name is not None and name not in clocks:
            raise ModelError(f"undeclared clock {name!r}", line, col)
    x = clocks[a]
    y = clocks[b] if b is not None else 0
    if x == y:
        raise ModelError(f"constraint {tok!r} compares a clock with itself", line, col)
    if rel == "<":
        return (x, y, LT(k))
    if rel == "<=":
        return (x, y, LE(k))
    if rel == ">":
        return (y, x, LT(-k))
    return (y, x, LE(-k))


def _conjunction(words: List[Tuple[str, int]], clocks, line: int) -> Guard:
    """Parse ``a and b and c`` where the words may be split around operators."""
    out = []
    cur: List[Tuple[str, int]] = []
    for w, col in words + [("and", -1)]:
        if w == "and":
            if not cur:
                raise ModelError("empty conjunct", line, col if col > 0 else 1)
            out.append(_atom("".join(t for t, _ in cur), clocks, line, cur[0][1]))
            cur = []
        else:
            cur.append((w, col))
    return tuple(out)


def _words(text: str) -> List[Tuple[str, int]]:
    return [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", text)]


def parse_model(text: Union[str, bytes]) -> TimedAutomaton:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ModelError(f"input is not UTF-8: {exc}") from None
    clocks: Dict[str, int] = {}
    clock_names: List[str] = []
    loc_index: Dict[str, int] = {}
    locations: List[str] = []
    invariants: List[Guard] = []
    initial: Optional[int] = None
    pending_edges = []
    target = None
    clocks_line = None

    def name_ok(name: str, line: int, col: int) -> None:
        if not _NAME.match(name) or name in KEYWORDS:
            raise ModelError(f"bad name {name!r}", line, col)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        words = _words(body)
        if not words:
            continue
        head, hcol = words[0]
        rest = words[1:]
        if head == "clocks":
            if clocks_line is not None:
                raise ModelError(f"clocks already declared on line {clocks_line}", lineno, hcol)
            clocks_line = lineno
            for w, col in rest:
                name_ok(w, lineno, col)
                if w in clocks:
                    raise ModelError(f"duplicate clock {w!r}", lineno, col)
                clock_names.append(w)
                clocks[w] = len(clock_names)
        elif head == "location":
            if not rest:
                raise ModelError("location needs a name", lineno, hcol)
            name, col = rest[0]
            name_ok(name, lineno, col)
            if name in loc_index:
                raise ModelError(f"duplicate location {name!r}", lineno, col)
            inv: Guard = ()
            i = 1
            is_initial = False
            if i < len(rest) and rest[i][0] == "initial":
                is_initial = True
                i += 1
            if i < len(rest):
                if rest[i][0] != "invariant":
                    raise ModelError(f"unexpected {rest[i][0]!r}", lineno, rest[i][1])
                if i + 1 >= len(rest):
                    raise ModelError("invariant clause is empty", lineno, rest[i][1])
                inv = _conjunction(rest[i + 1:], clocks, lineno)
            if is_initial:
                if initial is not None:
                    raise ModelError("second initial location", lineno, col)
                initial = len(locations)
            loc_index[name] = len(locations)
            locations.append(name)
            invariants.append(inv)
        elif head == "edge":
            if len(rest) < 3 or rest[1][0] != "->":
                raise ModelError("expected 'edge SRC -> DST'", lineno, hcol)
            src, dst = rest[0], rest[2]
            tail = rest[3:]
            guard: Guard = ()
            resets: List[int] = []
            i = 0
            if i < len(tail) and tail[i][0] == "guard":
                j = i + 1
                while j < len(tail) and tail[j][0] != "reset":
                    j += 1
                if j == i + 1:
                    raise ModelError("guard clause is empty", lineno, tail[i][1])
                guard = _conjunction(tail[i + 1:j], clocks, lineno)
                i = j
            if i < len(tail) and tail[i][0] == "reset":
                if i + 1 >= len(tail):
                    raise ModelError("reset clause is empty", lineno, tail[i][1])
                for w, col in tail[i + 1:]:
                    if w not in clocks:
                        raise ModelError(f"undeclared clock {w!r}", lineno, col)
                    if clocks[w] in resets:
                        raise ModelError(f"clock {w!r} reset twice", lineno, col)
                    resets.append(clocks[w])
                i = len(tail)
            if i < len(tail):
                raise ModelError(f"unexpected {tail[i][0]!r}", lineno, tail[i][1])
            pending_edges.append((src, dst, guard, frozenset(resets), lineno))
        elif head == "target":
            if len(rest) != 1:
                raise ModelError("expected 'target NAME'", lineno, hcol)
            if target is not None:
                raise ModelError("second target declaration", lineno, hcol)
            target = (rest[0][0], rest[0][1], lineno)
        else:
            raise ModelError(f"unknown declaration {head!r}", lineno, hcol)

    if not locations:
        raise ModelError("no locations declared")
    if initial is None:
        raise ModelError("no initial location")
    if target is None:
        raise ModelError("no target location")
    edges = []
    for (sname, scol), (dname, dcol), guard, resets, lineno in pending_edges:
        if sname not in loc_index:
            raise ModelError(f"undeclared location {sname!r}", lineno, scol)
        if dname not in loc_index:
            raise ModelError(f"undeclared location {dname!r}", lineno, dcol)
        edges.append(Edge(loc_index[sname], loc_index[dname], guard, resets))
    tname, tcol, tline = target
    if tname not in loc_index:
        raise ModelError(f"undeclared location {tname!r}", tline, tcol)
    ta = TimedAutomaton(clock_names, locations, invariants, edges, initial, loc_index[tname])
    try:
        ta.validate()
    except ModelError as exc:
        if not exc.line:
            raise ModelError(exc.message, 1, 1) from None
        raise
    return ta


def format_constraint(ta: TimedAutomaton, c: Constraint) -> str:
    x, y, b = c
    k = b >> 1
    weak = bool(b & 1)
    if y == 0:
        return f"{ta.clock_name(x)}{'<=' if weak else '<'}{k}"
    if x == 0:
        return f"{ta.clock_name(y)}{'>=' if weak else '>'}{-k}"
    return f"{ta.clock_name(x)}-{ta.clock_name(y)}{'<=' if weak else '<'}{k}"


def emit_model(ta: TimedAutomaton) -> str:
    lines = []
    if ta.clocks:
        lines.append("clocks " + " ".join(ta.clocks))
    for i, name in enumerate(ta.locations):
        parts = ["location", name]
        if i == ta.initial:
            parts.append("initial")
        if ta.invariants[i]:
            parts.append("invariant")
            parts.append(" and ".join(format_constraint(ta, c) for c in ta.invariants[i]))
        lines.append(" ".join(parts))
    for e in ta.edges:
        parts = ["edge", ta.locations[e.src], "->", ta.locations[e.dst]]
        if e.guard:
            parts.append("guard")
            parts.append(" and ".join(format_constraint(ta, c) for c in e.guard))
        if e.resets:
            parts.append("reset")
            parts.extend(ta.clock_name(x) for x in sorted(e.resets))
        lines.append(" ".join(parts))
    lines.append("target " + ta.locations[ta.target])
    return "\n".join(lines) + "\n"
