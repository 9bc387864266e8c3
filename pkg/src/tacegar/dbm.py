"""Bounds and difference-bound matrices.

A bound ``(k, <)`` or ``(k, <=)`` is stored as one integer: ``2k`` for the
strict form and ``2k + 1`` for the weak one.  Integer order then matches the
bound order, and ``(+inf, <)`` is the sentinel ``INF``.

A ``Dbm`` over ``n`` clocks has dimension ``n + 1``; index 0 is the reference
clock whose value is always zero.  ``entry(x, y)`` bounds the difference
``x - y``.  Matrices are stored row-major in flat tuples, which is faster than
numpy at the sizes this package deals with (dimension 2 to 6).
"""

from __future__ import annotations

from enum import Enum
from typing import Iterable, NamedTuple, Optional, Sequence, Tuple

INF = 1 << 62
# Largest magnitude a finite encoded bound may reach before we refuse to go on.
LIMIT = 1 << 40


def LE(k: int) -> int:
    """Encoded bound ``(k, <=)``."""
    return 2 * k + 1


def LT(k: int) -> int:
    """Encoded bound ``(k, <)``."""
    return 2 * k


ZERO = LE(0)


class Bound(NamedTuple):
    """Readable view of an encoded bound; ``value`` is None for infinity."""

    value: Optional[int]
    strict: bool

    def encode(self) -> int:
        if self.value is None:
            return INF
        return LT(self.value) if self.strict else LE(self.value)

    @staticmethod
    def decode(b: int) -> "Bound":
        if b >= INF:
            return Bound(None, True)
        return Bound(b >> 1, not (b & 1))

    def __str__(self) -> str:
        return format_bound(self.encode())


def bound_value(b: int) -> Optional[int]:
    return None if b >= INF else b >> 1


def is_strict(b: int) -> bool:
    return b >= INF or not (b & 1)


def bound_add(a: int, b: int) -> int:
    """Sum of two bounds; strict if either side is strict, top absorbs."""
    if a >= INF or b >= INF:
        return INF
    s = ((a & ~1) + (b & ~1)) | (a & b & 1)
    if -LIMIT > s or s > LIMIT:
        raise OverflowError(f"bound sum out of range: {format_bound(a)} + {format_bound(b)}")
    return s


def complement(b: int) -> int:
    """Bound of the negated constraint, read on the mirrored pair.

    ``not (x - y < k)`` is ``y - x <= -k`` and ``not (x - y <= k)`` is
    ``y - x < -k``.  In the integer encoding both cases are ``1 - b``.
    """
    if b >= INF:
        raise ValueError("the top bound has no complement")
    return 1 - b


def format_bound(b: int) -> str:
    if b >= INF:
        return "inf"
    return f"({b >> 1},{'<=' if b & 1 else '<'})"


def parse_bound(tok: str) -> int:
    tok = tok.strip()
    if tok == "inf":
        return INF
    if not (tok.startswith("(") and tok.endswith(")")):
        raise ValueError(f"bad bound token {tok!r}")
    k, rel = tok[1:-1].split(",")
    if rel == "<=":
        return LE(int(k))
    if rel == "<":
        return LT(int(k))
    raise ValueError(f"bad bound token {tok!r}")


class Status(Enum):
    RAW = "raw"
    CANONICAL = "canonical"
    EMPTY = "empty"


Constraint = Tuple[int, int, int]


def _closure(m: list, n: int) -> bool:
    """Floyd-Warshall in place.  Returns False when a negative cycle shows up."""
    for k in range(n):
        rk = k * n
        for i in range(n):
            ik = m[i * n + k]
            if ik >= INF:
                continue
            ri = i * n
            for j in range(n):
                kj = m[rk + j]
                if kj >= INF:
                    continue
                s = ((ik & ~1) + (kj & ~1)) | (ik & kj & 1)
                if s < m[ri + j]:
                    m[ri + j] = s
        if m[rk + k] < ZERO:
            return False
    for i in range(n):
        if m[i * n + i] < ZERO:
            return False
    return True


def _check_range(m: Sequence[int]) -> None:
    for b in m:
        if b < INF and (b > LIMIT or b < -LIMIT):
            raise OverflowError(f"DBM entry {format_bound(b)} exceeds the supported range")


class Dbm:
    """A zone over clocks ``1..dim-1`` given as a difference-bound matrix.

    Instances are immutable.  Operations other than ``raw`` construction return
    canonical or empty matrices.  Every zone lives in the non-negative orthant,
    so constructors always add the constraints ``0 - x <= 0``.
    """

    __slots__ = ("dim", "m", "status", "_hash")

    def __init__(self, dim: int, m: Sequence[int], status: Status):
        self.dim = dim
        self.m = tuple(m)
        self.status = status
        self._hash = None
        if len(self.m) != dim * dim:
            raise ValueError("matrix size does not match dimension")

    # -- construction -------------------------------------------------------
    @classmethod
    def raw(cls, dim: int, entries: Sequence[int]) -> "Dbm":
        return cls(dim, entries, Status.RAW)

    @classmethod
    def unconstrained(cls, dim: int) -> list:
        m = [INF] * (dim * dim)
        for i in range(dim):
            m[i * dim + i] = ZERO
        for x in range(1, dim):
            m[x] = ZERO  # entry (0, x): 0 - x <= 0
        return m

    @classmethod
    def universe(cls, dim: int) -> "Dbm":
        return cls(dim, cls.unconstrained(dim), Status.CANONICAL)

    @classmethod
    def zero(cls, dim: int) -> "Dbm":
        return cls(dim, [ZERO] * (dim * dim), Status.CANONICAL)

    @classmethod
    def empty(cls, dim: int) -> "Dbm":
        m = cls.unconstrained(dim)
        m[0] = LT(0)
        return cls(dim, m, Status.EMPTY)

    @classmethod
    def from_constraints(cls, dim: int, constraints: Iterable[Constraint]) -> "Dbm":
        """Canonical zone of a conjunction of ``x - y < or <= k`` constraints."""
        m = cls.unconstrained(dim)
        for x, y, b in constraints:
            if x == y:
                if b < ZERO:
                    return cls.empty(dim)
                continue
            i = x * dim + y
            if b < m[i]:
                m[i] = b
        return cls(dim, m, Status.RAW).canonicalize()

    # -- access -------------------------------------------------------------
    def entry(self, x: int, y: int) -> int:
        return self.m[x * self.dim + y]

    @property
    def nclocks(self) -> int:
        return self.dim - 1

    def is_empty(self) -> bool:
        if self.status is Status.RAW:
            return self.canonicalize().status is Status.EMPTY
        return self.status is Status.EMPTY

    def constraints(self) -> list:
        """Finite off-diagonal entries as ``(x, y, bound)`` triples."""
        n = self.dim
        return [(x, y, self.m[x * n + y]) for x in range(n) for y in range(n)
                if x != y and self.m[x * n + y] < INF]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dbm):
            return NotImplemented
        if self.dim != other.dim:
            return False
        a, b = self._cmp_form(), other._cmp_form()
        return a == b

    def _cmp_form(self):
        d = self if self.status is not Status.RAW else self.canonicalize()
        return ("empty",) if d.status is Status.EMPTY else d.m

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dim, self._cmp_form()))
        return self._hash

    def __repr__(self) -> str:
        if self.status is Status.EMPTY:
            return f"Dbm(dim={self.dim}, empty)"
        return f"Dbm(dim={self.dim}, {self.status.value}, {self.to_text()!r})"

    # -- canonical form ------------------------------------------------------
    def canonicalize(self) -> "Dbm":
        if self.status is not Status.RAW:
            return self
        n = self.dim
        m = list(self.m)
        for x in range(1, n):
            if m[x] > ZERO:
                m[x] = ZERO
        if not _closure(m, n):
            return Dbm.empty(n)
        _check_range(m)
        return Dbm(n, m, Status.CANONICAL)

    def _canon(self) -> "Dbm":
        d = self.canonicalize()
        return d

    # -- set operations -------------------------------------------------------
    def intersect(self, other: "Dbm") -> "Dbm":
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        a, b = self._canon(), other._canon()
        if a.status is Status.EMPTY:
            return a
        if b.status is Status.EMPTY:
            return b
        m = [p if p < q else q for p, q in zip(a.m, b.m)]
        return Dbm(self.dim, m, Status.RAW).canonicalize()

    def constrain(self, x: int, y: int, b: int) -> "Dbm":
        """Intersect with the single constraint ``x - y ≺ k`` (incremental closure)."""
        d = self._canon()
        if d.status is Status.EMPTY:
            return d
        n = self.dim
        if x == y:
            return d if b >= ZERO else Dbm.empty(n)
        m = d.m
        if b >= m[x * n + y]:
            return d
        back = m[y * n + x]
        if back < INF and bound_add(back, b) < ZERO:
            return Dbm.empty(n)
        out = list(m)
        col_x = [m[i * n + x] for i in range(n)]
        row_y = m[y * n:(y + 1) * n]
        for i in range(n):
            ix = col_x[i]
            if ix >= INF:
                continue
            left = bound_add(ix, b)
            ri = i * n
            for j in range(n):
                yj = row_y[j]
                if yj >= INF:
                    continue
                s = ((left & ~1) + (yj & ~1)) | (left & yj & 1)
                if s < out[ri + j]:
                    out[ri + j] = s
        _check_range(out)
        return Dbm(n, out, Status.CANONICAL)

    def constrain_all(self, constraints: Iterable[Constraint]) -> "Dbm":
        d = self._canon()
        for x, y, b in constraints:
            if d.status is Status.EMPTY:
                break
            d = d.constrain(x, y, b)
        return d

    def up(self) -> "Dbm":
        """Time successors: drop upper bounds ``x - 0``."""
        d = self._canon()
        if d.status is Status.EMPTY:
            return d
        n = self.dim
        m = list(d.m)
        for x in range(1, n):
            m[x * n] = INF
        return Dbm(n, m, Status.RAW).canonicalize()

    def down(self) -> "Dbm":
        """Time predecessors: each lower bound relaxes to the tightest difference
        constraint that still forces it (or to ``x >= 0``)."""
        d = self._canon()
        if d.status is Status.EMPTY:
            return d
        n = self.dim
        m = list(d.m)
        for x in range(1, n):
            best = ZERO
            for y in range(1, n):
                b = d.m[y * n + x]
                if b < best:
                    best = b
            m[x] = best
        return Dbm(n, m, Status.RAW).canonicalize()

    def free(self, x: int) -> "Dbm":
        """Forget every constraint on clock ``x`` (it may take any value >= 0)."""
        if x == 0:
            raise ValueError("clock 0 cannot be freed")
        d = self._canon()
        if d.status is Status.EMPTY:
            return d
        n = self.dim
        m = list(d.m)
        for y in range(n):
            if y != x:
                m[x * n + y] = INF
                m[y * n + x] = d.m[y * n]
        return Dbm(n, m, Status.RAW).canonicalize()

    def reset(self, clocks: Iterable[int]) -> "Dbm":
        """Set every clock of ``clocks`` to zero, one clock at a time."""
        d = self._canon()
        n = self.dim
        for x in clocks:
            if x == 0:
                raise ValueError("clock 0 cannot be reset")
            if d.status is Status.EMPTY:
                return d
            m = list(d.m)
            for y in range(n):
                if y != x:
                    m[x * n + y] = d.m[y]
                    m[y * n + x] = d.m[y * n]
            d = Dbm(n, m, Status.RAW).canonicalize()
        return d

    def includes(self, other: "Dbm") -> bool:
        """True iff ``other`` is a subset of ``self``."""
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        a, b = self._canon(), other._canon()
        if b.status is Status.EMPTY:
            return True
        if a.status is Status.EMPTY:
            return False
        return all(q <= p for p, q in zip(a.m, b.m))

    def intersects(self, other: "Dbm") -> bool:
        return not self.intersect(other).is_empty()

    def contains(self, point: Sequence) -> bool:
        """Membership of a valuation (values for clocks 1..n; ints or Fractions)."""
        d = self._canon()
        if d.status is Status.EMPTY:
            return False
        v = (0,) + tuple(point)
        n = self.dim
        if any(c < 0 for c in v):
            return False
        for x in range(n):
            for y in range(n):
                b = d.m[x * n + y]
                if b >= INF or x == y:
                    continue
                diff = v[x] - v[y]
                k = b >> 1
                if diff > k or (diff == k and not (b & 1)):
                    return False
        return True

    # -- text form ----------------------------------------------------------
    def to_text(self) -> str:
        n = self.dim
        rows = []
        for x in range(n):
            rows.append(" ".join(format_bound(self.m[x * n + y]) for y in range(n)))
        return "\n".join(rows)

    @classmethod
    def from_text(cls, text: str) -> "Dbm":
        rows = [r.split() for r in text.strip().splitlines() if r.strip()]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("matrix text is not square")
        return cls.raw(n, [parse_bound(t) for r in rows for t in r])


def guard_zone(dim: int, guard: Iterable[Constraint]) -> Dbm:
    return Dbm.from_constraints(dim, guard)


def post_edge(z: Dbm, edge, inv_src: Sequence[Constraint] = (),
              inv_dst: Sequence[Constraint] = ()) -> Dbm:
    """Successor zone ``I' ∩ (I' ∩ reset_R(z ∩ I ∩ g))↑``.

    The inner invariant is redundant for upper-bound invariants; it keeps the
    result exact when a target invariant also bounds clocks from below.
    Abstracted zones may leave the source invariant ``I``, so it is applied
    again here; this keeps ``post`` and ``pre_edge`` dual.
    """
    r = z.constrain_all(inv_src).constrain_all(edge.guard)
    if r.is_empty():
        return r
    r = r.reset(sorted(edge.resets)).constrain_all(inv_dst)
    if r.is_empty():
        return r
    return r.up().constrain_all(inv_dst)


def pre_edge(z: Dbm, edge, inv_src: Sequence[Constraint] = (),
             inv_dst: Sequence[Constraint] = ()) -> Dbm:
    """Valuations at the source (before waiting) from which some delay, then
    ``edge``, then some delay, reaches ``z``.

    Computed as ``(I ∩ g ∩ free_R(R=0 ∩ I' ∩ (z ∩ I')↓))↓``.  Clocks of ``R``
    are freed one at a time, each followed by canonicalization.
    """
    r = z.constrain_all(inv_dst)
    if r.is_empty():
        return r
    r = r.down().constrain_all(inv_dst)
    for x in sorted(edge.resets):
        r = r.constrain(x, 0, ZERO)
    for x in sorted(edge.resets):
        if r.is_empty():
            return r
        r = r.free(x)
    r = r.constrain_all(edge.guard).constrain_all(inv_src)
    if r.is_empty():
        return r
    return r.down()
