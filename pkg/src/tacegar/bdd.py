"""Reduced ordered binary decision diagrams.

Formulas are plain ``int`` handles into one ``Manager``.  Nodes are
hash-consed, so two formulas are equivalent exactly when their handles are
equal.  The variable order is the order of creation and never changes.
Variables can be created in pairs (``p``, ``p'``) that sit next to each other
in the order; ``rename_prime`` / ``rename_unprime`` swap along those pairs.
"""

from __future__ import annotations

import sys
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

FALSE = 0
TRUE = 1
_TERMINAL_LEVEL = 1 << 30

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


class BddBudgetExceeded(RuntimeError):
    pass


class SupportError(ValueError):
    pass


class Manager:
    def __init__(self, max_nodes: int = 2_000_000, cache_limit: int = 1 << 20):
        self.max_nodes = max_nodes
        self.cache_limit = cache_limit
        self._var: List[int] = [_TERMINAL_LEVEL, _TERMINAL_LEVEL]
        self._lo: List[int] = [0, 1]
        self._hi: List[int] = [0, 1]
        self._unique: Dict[Tuple[int, int, int], int] = {}
        self._free: List[int] = []
        self._cache: Dict[tuple, int] = {}
        self.names: List[str] = []
        self.prime_of: Dict[int, int] = {}
        self.unprime_of: Dict[int, int] = {}
        self.peak_nodes = 2

    # -- variables ------------------------------------------------------------
    @property
    def nvars(self) -> int:
        return len(self.names)

    def new_var(self, name: Optional[str] = None) -> int:
        v = len(self.names)
        self.names.append(name or f"v{v}")
        return v

    def new_pair(self, name: Optional[str] = None) -> Tuple[int, int]:
        """A variable and its primed twin, adjacent in the order."""
        v = self.new_var(name)
        w = self.new_var((name or f"v{v}") + "'")
        self.prime_of[v] = w
        self.unprime_of[w] = v
        return v, w

    def var(self, v: int) -> int:
        if not 0 <= v < len(self.names):
            raise IndexError(f"unknown variable {v}")
        return self._mk(v, FALSE, TRUE)

    def nvar(self, v: int) -> int:
        if not 0 <= v < len(self.names):
            raise IndexError(f"unknown variable {v}")
        return self._mk(v, TRUE, FALSE)

    def literal(self, v: int, positive: bool) -> int:
        return self.var(v) if positive else self.nvar(v)

    # -- nodes ----------------------------------------------------------------
    def _mk(self, v: int, lo: int, hi: int) -> int:
        if lo == hi:
            return lo
        key = (v, lo, hi)
        u = self._unique.get(key)
        if u is not None:
            return u
        if self._free:
            u = self._free.pop()
            self._var[u], self._lo[u], self._hi[u] = v, lo, hi
        else:
            u = len(self._var)
            if len(self._unique) + 2 >= self.max_nodes:
                raise BddBudgetExceeded(f"more than {self.max_nodes} BDD nodes")
            self._var.append(v)
            self._lo.append(lo)
            self._hi.append(hi)
        self._unique[key] = u
        live = len(self._unique) + 2
        if live > self.peak_nodes:
            self.peak_nodes = live
        return u

    def node_count(self) -> int:
        """Live nodes including the two terminals."""
        return len(self._unique) + 2

    def top(self, f: int) -> int:
        return self._var[f]

    def low(self, f: int) -> int:
        return self._lo[f]

    def high(self, f: int) -> int:
        return self._hi[f]

    def _cache_put(self, key, value) -> int:
        if len(self._cache) >= self.cache_limit:
            self._cache.clear()
        self._cache[key] = value
        return value

    # -- Boolean operations ---------------------------------------------------
    def not_(self, f: int) -> int:
        if f <= 1:
            return 1 - f
        key = ("not", f)
        r = self._cache.get(key)
        if r is not None:
            return r
        r = self._mk(self._var[f], self.not_(self._lo[f]), self.not_(self._hi[f]))
        return self._cache_put(key, r)

    def and_(self, f: int, g: int) -> int:
        if f == FALSE or g == FALSE:
            return FALSE
        if f == TRUE:
            return g
        if g == TRUE or f == g:
            return f
        if f > g:
            f, g = g, f
        key = ("and", f, g)
        r = self._cache.get(key)
        if r is not None:
            return r
        vf, vg = self._var[f], self._var[g]
        v = min(vf, vg)
        f0, f1 = (self._lo[f], self._hi[f]) if vf == v else (f, f)
        g0, g1 = (self._lo[g], self._hi[g]) if vg == v else (g, g)
        r = self._mk(v, self.and_(f0, g0), self.and_(f1, g1))
        return self._cache_put(key, r)

    def or_(self, f: int, g: int) -> int:
        if f == TRUE or g == TRUE:
            return TRUE
        if f == FALSE:
            return g
        if g == FALSE or f == g:
            return f
        if f > g:
            f, g = g, f
        key = ("or", f, g)
        r = self._cache.get(key)
        if r is not None:
            return r
        vf, vg = self._var[f], self._var[g]
        v = min(vf, vg)
        f0, f1 = (self._lo[f], self._hi[f]) if vf == v else (f, f)
        g0, g1 = (self._lo[g], self._hi[g]) if vg == v else (g, g)
        r = self._mk(v, self.or_(f0, g0), self.or_(f1, g1))
        return self._cache_put(key, r)

    def xor(self, f: int, g: int) -> int:
        if f == g:
            return FALSE
        if f == FALSE:
            return g
        if g == FALSE:
            return f
        if f == TRUE:
            return self.not_(g)
        if g == TRUE:
            return self.not_(f)
        if f > g:
            f, g = g, f
        key = ("xor", f, g)
        r = self._cache.get(key)
        if r is not None:
            return r
        vf, vg = self._var[f], self._var[g]
        v = min(vf, vg)
        f0, f1 = (self._lo[f], self._hi[f]) if vf == v else (f, f)
        g0, g1 = (self._lo[g], self._hi[g]) if vg == v else (g, g)
        r = self._mk(v, self.xor(f0, g0), self.xor(f1, g1))
        return self._cache_put(key, r)

    def implies(self, f: int, g: int) -> int:
        return self.or_(self.not_(f), g)

    def iff(self, f: int, g: int) -> int:
        return self.not_(self.xor(f, g))

    def ite(self, f: int, g: int, h: int) -> int:
        if f == TRUE:
            return g
        if f == FALSE:
            return h
        if g == h:
            return g
        if g == TRUE and h == FALSE:
            return f
        key = ("ite", f, g, h)
        r = self._cache.get(key)
        if r is not None:
            return r
        v = min(self._var[f], self._var[g], self._var[h])
        c = [self._cofactors(x, v) for x in (f, g, h)]
        r = self._mk(v, self.ite(c[0][0], c[1][0], c[2][0]), self.ite(c[0][1], c[1][1], c[2][1]))
        return self._cache_put(key, r)

    def _cofactors(self, f: int, v: int) -> Tuple[int, int]:
        if self._var[f] == v:
            return self._lo[f], self._hi[f]
        return f, f

    def conj(self, fs: Iterable[int]) -> int:
        r = TRUE
        for f in fs:
            r = self.and_(r, f)
            if r == FALSE:
                break
        return r

    def disj(self, fs: Iterable[int]) -> int:
        r = FALSE
        for f in fs:
            r = self.or_(r, f)
            if r == TRUE:
                break
        return r

    def cube(self, lits: Dict[int, bool]) -> int:
        """Conjunction of literals ``{var: polarity}``."""
        r = TRUE
        for v in sorted(lits, reverse=True):
            r = self._mk(v, FALSE, r) if lits[v] else self._mk(v, r, FALSE)
        return r

    # -- quantification -------------------------------------------------------
    def _varset(self, vs: Iterable[int]) -> Tuple[int, ...]:
        return tuple(sorted(set(vs)))

    def exists(self, f: int, vs: Iterable[int]) -> int:
        vs = self._varset(vs)
        if not vs:
            return f
        return self._exists(f, vs, 0)

    def _exists(self, f: int, vs: Tuple[int, ...], i: int) -> int:
        if f <= 1:
            return f
        v = self._var[f]
        while i < len(vs) and vs[i] < v:
            i += 1
        if i == len(vs):
            return f
        key = ("ex", f, vs, i)
        r = self._cache.get(key)
        if r is not None:
            return r
        lo = self._exists(self._lo[f], vs, i)
        if vs[i] == v:
            r = lo if lo == TRUE else self.or_(lo, self._exists(self._hi[f], vs, i))
        else:
            r = self._mk(v, lo, self._exists(self._hi[f], vs, i))
        return self._cache_put(key, r)

    def forall(self, f: int, vs: Iterable[int]) -> int:
        return self.not_(self.exists(self.not_(f), vs))

    def and_exists(self, f: int, g: int, vs: Iterable[int]) -> int:
        """``exists(and_(f, g), vs)`` without building the conjunction."""
        vs = self._varset(vs)
        return self._and_exists(f, g, vs, 0)

    def _and_exists(self, f: int, g: int, vs: Tuple[int, ...], i: int) -> int:
        if f == FALSE or g == FALSE:
            return FALSE
        if f == TRUE and g == TRUE:
            return TRUE
        if f == TRUE or f == g:
            return self._exists(g, vs, i)
        if g == TRUE:
            return self._exists(f, vs, i)
        if f > g:
            f, g = g, f
        v = min(self._var[f], self._var[g])
        while i < len(vs) and vs[i] < v:
            i += 1
        if i == len(vs):
            return self.and_(f, g)
        key = ("ae", f, g, vs, i)
        r = self._cache.get(key)
        if r is not None:
            return r
        f0, f1 = self._cofactors(f, v)
        g0, g1 = self._cofactors(g, v)
        lo = self._and_exists(f0, g0, vs, i)
        if vs[i] == v:
            r = lo if lo == TRUE else self.or_(lo, self._and_exists(f1, g1, vs, i))
        else:
            r = self._mk(v, lo, self._and_exists(f1, g1, vs, i))
        return self._cache_put(key, r)

    # -- substitution ---------------------------------------------------------
    def rename(self, f: int, mapping: Dict[int, int]) -> int:
        """Substitute variables by variables.  Order-preserving maps are rebuilt
        node by node; others fall back to if-then-else composition."""
        mapping = {a: b for a, b in mapping.items() if a != b}
        if not mapping:
            return f
        sup = self.support(f)
        targets = [mapping.get(v, v) for v in sorted(sup)]
        if len(set(targets)) != len(targets):
            raise SupportError("renaming would merge two variables of the support")
        key_map = tuple(sorted(mapping.items()))
        if all(targets[i] < targets[i + 1] for i in range(len(targets) - 1)):
            return self._rename_mono(f, mapping, key_map, {})
        return self._rename_ite(f, mapping, {})

    def _rename_mono(self, f: int, mapping, key_map, memo) -> int:
        if f <= 1:
            return f
        r = memo.get(f)
        if r is None:
            v = self._var[f]
            r = self._mk(mapping.get(v, v), self._rename_mono(self._lo[f], mapping, key_map, memo),
                         self._rename_mono(self._hi[f], mapping, key_map, memo))
            memo[f] = r
        return r

    def _rename_ite(self, f: int, mapping, memo) -> int:
        if f <= 1:
            return f
        r = memo.get(f)
        if r is None:
            v = self._var[f]
            r = self.ite(self.var(mapping.get(v, v)), self._rename_ite(self._hi[f], mapping, memo),
                         self._rename_ite(self._lo[f], mapping, memo))
            memo[f] = r
        return r

    def rename_prime(self, f: int) -> int:
        """Replace every unprimed paired variable by its primed twin."""
        sup = self.support(f)
        bad = [v for v in sup if v in self.unprime_of]
        if bad:
            raise SupportError(f"rename_prime: primed variables in support: {self._names(bad)}")
        return self.rename(f, {v: self.prime_of[v] for v in sup if v in self.prime_of})

    def rename_unprime(self, f: int) -> int:
        """Replace every primed variable by its unprimed twin."""
        sup = self.support(f)
        bad = [v for v in sup if v in self.prime_of]
        if bad:
            raise SupportError(f"rename_unprime: unprimed paired variables in support: {self._names(bad)}")
        return self.rename(f, {v: self.unprime_of[v] for v in sup if v in self.unprime_of})

    def _names(self, vs) -> str:
        return ", ".join(self.names[v] for v in sorted(vs))

    # -- inspection -----------------------------------------------------------
    def support(self, f: int) -> frozenset:
        seen = set()
        out = set()
        stack = [f]
        while stack:
            u = stack.pop()
            if u <= 1 or u in seen:
                continue
            seen.add(u)
            out.add(self._var[u])
            stack.append(self._lo[u])
            stack.append(self._hi[u])
        return frozenset(out)

    def size(self, f: int) -> int:
        """Number of internal nodes reachable from ``f``."""
        seen = set()
        stack = [f]
        while stack:
            u = stack.pop()
            if u <= 1 or u in seen:
                continue
            seen.add(u)
            stack.append(self._lo[u])
            stack.append(self._hi[u])
        return len(seen)

    def evaluate(self, f: int, assignment) -> bool:
        """``assignment`` maps variables to booleans (dict or sequence)."""
        while f > 1:
            f = self._hi[f] if assignment[self._var[f]] else self._lo[f]
        return f == TRUE

    def sat_count(self, f: int, support: Sequence[int]) -> int:
        sup = sorted(set(support))
        missing = self.support(f) - set(sup)
        if missing:
            raise SupportError(f"support does not cover {self._names(missing)}")
        pos = {v: i for i, v in enumerate(sup)}
        n = len(sup)
        memo: Dict[int, int] = {}

        def level(u):
            return n if u <= 1 else pos[self._var[u]]

        def count(u):
            # models over the variables at positions >= level(u)
            if u == FALSE:
                return 0
            if u == TRUE:
                return 1
            r = memo.get(u)
            if r is None:
                lv = level(u)
                lo, hi = self._lo[u], self._hi[u]
                r = (count(lo) << (level(lo) - lv - 1)) + (count(hi) << (level(hi) - lv - 1))
                memo[u] = r
            return r

        return count(f) << level(f)

    def minterms(self, f: int, support: Sequence[int]) -> Iterator[Dict[int, bool]]:
        """Satisfying total assignments over ``support``, lexicographic in
        variable order (False before True)."""
        sup = sorted(set(support))
        missing = self.support(f) - set(sup)
        if missing:
            raise SupportError(f"support does not cover {self._names(missing)}")
        cur: Dict[int, bool] = {}

        def walk(u, i):
            if u == FALSE:
                return
            if i == len(sup):
                yield dict(cur)
                return
            v = sup[i]
            if u > 1 and self._var[u] == v:
                branches = ((False, self._lo[u]), (True, self._hi[u]))
            else:
                branches = ((False, u), (True, u))
            for val, child in branches:
                if child == FALSE:
                    continue
                cur[v] = val
                yield from walk(child, i + 1)
            cur.pop(v, None)

        yield from walk(f, 0)

    def pick_minterm(self, f: int, support: Sequence[int]) -> Optional[Dict[int, bool]]:
        return next(self.minterms(f, support), None)

    def to_dot(self, f: int, name: str = "bdd") -> str:
        lines = [f"digraph {name} {{", '  n0 [shape=box,label="0"];', '  n1 [shape=box,label="1"];']
        seen = set()
        stack = [f]
        while stack:
            u = stack.pop()
            if u <= 1 or u in seen:
                continue
            seen.add(u)
            lines.append(f'  n{u} [label="{self.names[self._var[u]]}"];')
            lines.append(f"  n{u} -> n{self._lo[u]} [style=dashed];")
            lines.append(f"  n{u} -> n{self._hi[u]};")
            stack.extend((self._lo[u], self._hi[u]))
        lines.append("}")
        return "\n".join(lines)

    # -- memory ---------------------------------------------------------------
    def collect(self, roots: Iterable[int]) -> int:
        """Mark-and-sweep: free every node not reachable from ``roots``.
        Handles not listed as roots become invalid.  Returns the number freed."""
        marked = {0, 1}
        stack = list(roots)
        while stack:
            u = stack.pop()
            if u in marked:
                continue
            marked.add(u)
            stack.append(self._lo[u])
            stack.append(self._hi[u])
        freed = 0
        for key, u in list(self._unique.items()):
            if u not in marked:
                del self._unique[key]
                self._free.append(u)
                freed += 1
        self._cache.clear()
        return freed
