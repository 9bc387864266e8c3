"""Abstract domains: finite sets of allowed bounds per clock pair.

Only pairs ``x < y`` (clock 0 first, then declaration order) are stored.  The
set for the mirrored pair is derived: the constraint ``y - x ≺ k`` belongs to
``D[y, x]`` exactly when its negation ``x - y ≺⁻¹ -k`` belongs to ``D[x, y]``.
Keeping both directions in step costs nothing and is what the Boolean
encoding needs, and it only makes the enumerative abstraction finer.
"""

from __future__ import annotations

from bisect import bisect_left
from enum import Enum
from typing import Dict, Iterable, Optional, Sequence, Tuple

from .dbm import INF, ZERO, Constraint, Dbm, Status, complement, format_bound

Pair = Tuple[int, int]


class DomainMode(Enum):
    GLOBAL = "global"
    PER_NODE = "per_node"
    PER_LOCATION = "per_location"

    @classmethod
    def parse(cls, text: str) -> "DomainMode":
        return cls(text.replace("-", "_"))


class AbstractDomain:
    """Immutable; ``refine_with`` returns a new domain sharing unchanged sets."""

    __slots__ = ("dim", "_table", "_full", "_hash")

    def __init__(self, dim: int, table: Optional[Dict[Pair, Tuple[int, ...]]] = None):
        self.dim = dim
        self._table: Dict[Pair, Tuple[int, ...]] = dict(table or {})
        self._full = None
        self._hash = None

    @classmethod
    def empty(cls, dim: int) -> "AbstractDomain":
        return cls(dim)

    @classmethod
    def of(cls, dim: int, constraints: Iterable[Constraint]) -> "AbstractDomain":
        return cls(dim).refine_with(constraints)

    # -- queries --------------------------------------------------------------
    def bounds(self, x: int, y: int) -> Tuple[int, ...]:
        """Sorted bounds allowed for ``x - y``."""
        if x < y:
            return self._table.get((x, y), ())
        if x == y:
            return ()
        return tuple(complement(b) for b in reversed(self._table.get((y, x), ())))

    def __contains__(self, c: Constraint) -> bool:
        x, y, b = c
        if x == y:
            return False
        if x < y:
            return b in self._table.get((x, y), ())
        return complement(b) in self._table.get((y, x), ())

    def pairs(self):
        """Materialized pairs ``x < y`` with their bound sets, sorted."""
        return sorted(self._table.items())

    def size(self) -> int:
        return sum(len(v) for v in self._table.values())

    def constraints(self):
        """Every stored constraint ``(x, y, b)`` with ``x < y``."""
        return [(x, y, b) for (x, y), bs in self.pairs() for b in bs]

    def _full_table(self):
        if self._full is None:
            n = self.dim
            self._full = [self.bounds(x, y) for x in range(n) for y in range(n)]
        return self._full

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AbstractDomain):
            return NotImplemented
        return self.dim == other.dim and self._table == other._table

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dim, tuple(sorted(self._table.items()))))
        return self._hash

    def __le__(self, other: "AbstractDomain") -> bool:
        return all(set(v) <= set(other._table.get(k, ())) for k, v in self._table.items())

    # -- refinement -----------------------------------------------------------
    def refine_with(self, constraints: Iterable[Constraint]) -> "AbstractDomain":
        added: Dict[Pair, set] = {}
        for x, y, b in constraints:
            if x == y or b >= INF:
                continue
            if x > y:
                x, y, b = y, x, complement(b)
            if b not in self._table.get((x, y), ()):
                added.setdefault((x, y), set()).add(b)
        if not added:
            return self
        table = dict(self._table)
        for key, new in added.items():
            table[key] = tuple(sorted(set(table.get(key, ())) | new))
        return AbstractDomain(self.dim, table)

    # -- abstraction ----------------------------------------------------------
    def alpha(self, z: Dbm) -> Dbm:
        """Smallest zone containing ``z`` whose constraints all come from the
        domain (clock non-negativity is always kept)."""
        z = z.canonicalize()
        if z.status is Status.EMPTY:
            return z
        n = self.dim
        full = self._full_table()
        m = list(z.m)
        for i in range(n * n):
            if i % (n + 1) == 0:
                continue
            bs = full[i]
            b = m[i]
            if b >= INF:
                continue
            j = bisect_left(bs, b)
            m[i] = bs[j] if j < len(bs) else INF
        return Dbm.raw(n, m).canonicalize()

    def is_definable(self, z: Dbm) -> bool:
        return self.alpha(z) == z

    # -- text -----------------------------------------------------------------
    def dump(self, names: Optional[Sequence[str]] = None) -> str:
        def nm(i: int) -> str:
            if i == 0:
                return "0"
            return names[i - 1] if names else f"c{i}"
        lines = []
        for (x, y), bs in self.pairs():
            lines.append(f"{nm(x)}-{nm(y)}: " + " ".join(format_bound(b) for b in bs))
        return "\n".join(lines)

    def __repr__(self) -> str:
        return f"AbstractDomain(dim={self.dim}, size={self.size()})"


def alpha(d: AbstractDomain, z: Dbm) -> Dbm:
    return d.alpha(z)


def refine_with(d: AbstractDomain, constraints: Iterable[Constraint]) -> AbstractDomain:
    return d.refine_with(constraints)


def initial_domain(ta, mode: DomainMode = DomainMode.GLOBAL) -> AbstractDomain:
    """Every guard and invariant constraint of ``ta`` (the mode does not change
    the contents, only how the engine shares the result)."""
    cons = []
    for g in ta.invariants:
        cons.extend(g)
    for e in ta.edges:
        cons.extend(e.guard)
    return AbstractDomain(ta.dim).refine_with(cons)
